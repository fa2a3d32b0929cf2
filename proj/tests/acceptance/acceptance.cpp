// End-to-end checks, one PASS/FAIL line per criterion. Tolerances are fixed
// here. Set WBA_ACCEPTANCE_FULL=1 to run the critical-epsilon search at
// t_max = 1e4 with the tight band (tens of minutes on one core).

#include "wba/birkhoff.hpp"
#include "wba/commands.hpp"
#include "wba/scan.hpp"
#include "wba/systems.hpp"
#include "wba/weights.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace wba;

namespace {

IntegratorConfig const kCfg{};  // tol 1e-13

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(char const* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double wba_of(ModelSystem const& s, State const& x0, std::string const& obs, double T,
              WeightFunction const& g = WeightFunction::bump(1.0)) {
    return weighted_birkhoff_average(s.field, s.complete_state(x0), s.observable(obs), g, T, kCfg).average;
}

DigitAccuracy dig_of(ModelSystem const& s, State const& x0, std::string const& obs, double T,
                     WeightFunction const& g = WeightFunction::bump(1.0)) {
    return digit_accuracy(s.field, s.complete_state(x0), s.observable(obs), g, T, kCfg);
}

ModelSystem two_wave(double mu) { return make_system({"two-wave", {{"mu", mu}}}); }
ModelSystem farey(double eps) { return make_system({"farey", {{"epsilon", eps}}}); }
ModelSystem qp(double b_over_nu) { return make_system({"qp-pendulum", {{"b_over_nu", b_over_nu}}}); }

ScanSpec two_wave_scan(unsigned workers) {
    ScanSpec spec;
    spec.system = {"two-wave", {{"mu", 0.03}}};
    spec.x0 = {0.0, 0.0, 0.0};
    spec.grid = {"p0", 0.0, 0.5, 501};
    spec.T = 1000.0;
    spec.observable = "p";
    spec.workers = workers;
    spec.record_timing = false;
    return spec;
}

std::string csv_of(ScanResult const& r) {
    std::ostringstream os;
    write_scan_csv(os, r);
    return os.str();
}

// Shared between criteria 5 and 12.
std::string g_scan_csv;

Outcome weight_normalization() {
    double const C = WeightFunction::bump(1.0).norm_constant();
    double const rel = std::fabs(C / 142.2503758 - 1.0);
    double worst = 0.0;
    for (double w : {0.25, 1.0, 5.0}) {
        auto const g = WeightFunction::bump(w);
        // Trapezoid sums are spectrally accurate for endpoint-flat integrands.
        int const n = 20000;
        double sum = 0.0;
        for (int i = 1; i < n; ++i) sum += g(static_cast<double>(i) / n);
        worst = std::max(worst, std::fabs(sum / n - 1.0));
    }
    return {rel <= 1e-6 && worst <= 1e-12, fmt("C = %.10f (rel err %.2e), max |int g - 1| = %.2e", C, rel, worst)};
}

Outcome constant_observable() {
    double worst = 0.0;
    for (auto const& s : {two_wave(0.03), qp(1.1), farey(0.5)}) {
        worst = std::max(worst, std::fabs(wba_of(s, State{0.1, 0.2}, "one", 100.0) - 1.0));
    }
    return {worst <= 1e-12, fmt("max |WB_100(1) - 1| = %.2e over three systems", worst)};
}

Outcome integrable_limits() {
    double worst = 0.0;
    for (double p0 : {0.1, 0.45}) worst = std::max(worst, std::fabs(wba_of(two_wave(0.0), {0.0, p0}, "p", 1000.0) - p0));
    for (double psi0 : {0.1, 0.27, 0.45, 0.8})
        worst = std::max(worst, std::fabs(wba_of(farey(0.0), {psi0, 0.0}, "psi", 1000.0) - psi0));
    return {worst <= 1e-11, fmt("max |WB - initial value| = %.2e", worst)};
}

Outcome two_wave_dichotomy() {
    auto const s = two_wave(0.03);
    double const island = dig_of(s, {0.0, 0.45}, "p", 1000.0).maxdig;
    double const layer = dig_of(s, {0.0, 0.3}, "p", 1000.0).maxdig;
    return {island >= 8.0 && layer <= 4.0, fmt("maxdig %.2f at p0 = 0.45 (>= 8), %.2f at p0 = 0.3 (<= 4)", island, layer)};
}

Outcome two_wave_scan_gap() {
    ScanResult const r = run_scan(two_wave_scan(1));
    g_scan_csv = csv_of(r);
    std::size_t low = 0, gap = 0, high = 0;
    for (auto const& rec : r.records) {
        if (!rec.ok()) continue;
        if (rec.maxdig <= 4.0) ++low;
        else if (rec.maxdig < 7.0) ++gap;
        else ++high;
    }
    bool const bimodal = low > 0 && high > 0;
    return {bimodal && gap <= 15 && r.failed == 0,
            fmt("%zu points with maxdig <= 4, %zu in (4, 7), %zu >= 7, %zu failed", low, gap, high, r.failed)};
}

Outcome rotation_numbers() {
    auto const s = two_wave(0.03);
    double worst_lib = 0.0;
    for (double p0 : {0.02, 0.05, 0.1}) {
        worst_lib = std::max(worst_lib, std::fabs(rotation_number(s.field, s.complete_state(State{0.0, p0}),
                                                                  s.observable("p"), WeightFunction::bump(1.0), 1000.0,
                                                                  kCfg)));
    }
    double const island =
        rotation_number(s.field, s.complete_state(State{0.0, 0.45}), s.observable("p"), WeightFunction::bump(1.0), 1000.0,
                        kCfg);
    double const err = std::fabs(island - 0.5);
    return {worst_lib <= 1e-6 && err <= 1e-6, fmt("max |rho| = %.2e on librations, |rho - 1/2| = %.2e in the island",
                                                  worst_lib, err)};
}

Outcome sin2_rate() {
    auto const s = two_wave(0.03);
    std::vector<double> const Ts{250.0, 500.0, 1000.0, 2000.0, 4000.0};
    std::vector<double> xs, ys;
    for (double T : Ts) {
        xs.push_back(std::log10(T));
        ys.push_back(dig_of(s, {0.0, 0.45}, "p", T, WeightFunction::sin2()).maxdig);
    }
    // Least-squares slope.
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / xs.size();
        my += ys[i] / ys.size();
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    double const slope = sxy / sxx;
    double const bump = dig_of(s, {0.0, 0.45}, "p", 2000.0).maxdig;
    double const sin2 = ys[3];
    return {std::fabs(slope - 2.0) <= 0.7 && bump - sin2 >= 2.0,
            fmt("sin2 slope %.3f (2 +- 0.7); maxdig at T = 2000: bump %.2f, sin2 %.2f", slope, bump, sin2)};
}

Outcome qp_stratification() {
    State const x0{0.0, 0.0, 0.0, 2.0};
    double const d11 = dig_of(qp(1.1), x0, "p", 1200.0).maxdig;
    double const d133 = dig_of(qp(1.33), x0, "p", 1200.0).maxdig;
    double const d177 = dig_of(qp(1.77), x0, "p", 1200.0).maxdig;
    bool const ok = d11 >= 11.0 && d133 <= 4.0 && d177 >= 4.0 && d177 <= 8.0;
    return {ok, fmt("maxdig %.2f at b = 1.1 nu (>= 11), %.2f at 1.33 nu (<= 4), %.2f at 1.77 nu (in [4, 8])", d11, d133,
                    d177)};
}

Outcome farey_overlap() {
    auto const entries = overlap_check(default_farey_modes(), 1.0);
    double worst = 0.0;
    for (auto const& e : entries) worst = std::max(worst, std::fabs(e.half_width_sum * e.first.m * e.second.m - 1.0));
    return {entries.size() == 6 && worst <= 1e-12, fmt("%zu neighbour pairs, max |(D1 + D2) m1 m2 - 1| = %.2e",
                                                       entries.size(), worst)};
}

Outcome farey_critical() {
    bool const full = std::getenv("WBA_ACCEPTANCE_FULL") != nullptr;
    double const t_max = full ? 1e4 : 1e3;
    double const band = full ? 0.02 : 0.08;
    std::vector<double> grid;
    for (int i = 0; i <= 200; ++i) grid.push_back(0.005 * i);
    State const x0 = cli::default_critical_x0();
    unsigned const workers = cli::resolve_workers(0);
    auto const r = critical_epsilon_crossing(grid, x0, t_max, 0.45, kCfg, workers, -1.0);
    std::string detail = fmt("eps_cr = %.3f at t_max = %g (0.665 +- %.2f, amplitude sign -1)", r.epsilon, t_max, band);
    // Informational: the printed sign from the same point.
    try {
        auto const printed = critical_epsilon_crossing(grid, x0, t_max, 0.45, kCfg, workers, 1.0);
        detail += fmt("; printed sign gives %.3f", printed.epsilon);
    } catch (NoCrossingFound const&) {
        detail += "; printed sign: no crossing on [0, 1]";
    }
    return {std::fabs(r.epsilon - 0.665) <= band + 1e-12, detail};
}

Outcome farey_onset() {
    std::vector<std::size_t> counts;
    for (double eps : {0.05, 0.25, 0.5, 1.0}) {
        ScanSpec spec;
        spec.system = {"farey", {{"epsilon", eps}}};
        spec.x0 = {0.0, 0.0, 0.0};
        spec.grid = {"psi0", 0.0, 0.5, 501};
        spec.T = 1000.0;
        spec.observable = "psi";
        spec.workers = cli::resolve_workers(0);
        spec.record_timing = false;
        counts.push_back(run_scan(spec).chaotic);
    }
    bool const ordered = counts[0] < counts[1] && counts[1] < counts[2] && counts[2] < counts[3];
    return {ordered && counts[0] <= 10 && counts[1] <= 30,
            fmt("chaotic counts %zu, %zu, %zu, %zu at eps = 0.05, 0.25, 0.5, 1 (ordered; <= 10, <= 30)", counts[0],
                counts[1], counts[2], counts[3])};
}

Outcome determinism() {
    if (g_scan_csv.empty()) g_scan_csv = csv_of(run_scan(two_wave_scan(1)));
    std::string const eight = csv_of(run_scan(two_wave_scan(8)));
    return {eight == g_scan_csv, fmt("workers 1 vs 8: %zu vs %zu bytes, %s", g_scan_csv.size(), eight.size(),
                                     eight == g_scan_csv ? "identical" : "different")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        char const* name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> const criteria = {
        {1, "weight normalization", weight_normalization},
        {2, "constant observable", constant_observable},
        {3, "integrable limits", integrable_limits},
        {4, "two-wave dichotomy", two_wave_dichotomy},
        {5, "two-wave scan separation", two_wave_scan_gap},
        {6, "rotation numbers", rotation_numbers},
        {7, "sin2 weight rate", sin2_rate},
        {8, "qp pendulum stratification", qp_stratification},
        {9, "farey overlap identity", farey_overlap},
        {10, "farey critical epsilon", farey_critical},
        {11, "farey chaos onset", farey_onset},
        {12, "determinism", determinism},
    };
    int failed = 0;
    for (auto const& c : criteria) {
        auto const start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (std::exception const& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2d %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !out.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
