#include "wba/commands.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace wba::cli {

namespace fs = std::filesystem;

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_file(fs::path const& path, std::string const& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("write failed: " + path.string());
}

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

struct Plot {
    std::string csv{};
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::string columns;
    bool logx = false;
    std::string style = "linespoints pt 7 ps 0.6";
};

std::string gnuplot_script(Plot const& p) {
    std::string const stem = fs::path(p.csv).stem().string();
    std::ostringstream s;
    s << "# gnuplot " << stem << ".gp  (run from this directory)\n";
    s << "set terminal pngcairo size 900,600\n";
    s << "set output '" << stem << ".png'\n";
    s << "set datafile separator ','\n";
    s << "set title '" << p.title << "'\n";
    s << "set xlabel '" << p.xlabel << "'\n";
    s << "set ylabel '" << p.ylabel << "'\n";
    if (p.logx) s << "set logscale x\n";
    s << "set grid\n";
    s << "plot '" << p.csv << "' every ::1 using " << p.columns << " with " << p.style << " notitle\n";
    return s.str();
}

std::string observable_or_default(ModelSystem const& system, std::string const& name) {
    return name.empty() ? system.default_observable : name;
}

class Runner {
public:
    Runner(RunConfig config, std::ostream& out, std::ostream& err, DispatchOptions options)
        : c_(std::move(config)), out_(out), err_(err), opt_(options), dir_(c_.output) {}

    int run() {
        switch (c_.command) {
            case Command::Wba: return wba();
            case Command::Dig: return dig();
            case Command::Scan: return scan("scan");
            case Command::Poincare: return poincare();
            case Command::Fraction: return c_.outer ? fraction_curve() : scan("fraction");
            case Command::Widths: return widths();
            case Command::Rotation: return rotation();
            case Command::EpsCritical: return eps_critical();
        }
        return kExitValidation;
    }

private:
    RunConfig c_;
    std::ostream& out_;
    std::ostream& err_;
    DispatchOptions opt_;
    fs::path dir_;

    void summary(std::string const& line) {
        if (!opt_.quiet) out_ << line << '\n';
    }

    void emit(std::string const& csv_name, std::string const& csv, Plot plot) {
        write_file(dir_ / csv_name, csv);
        plot.csv = csv_name;
        write_file(dir_ / (fs::path(csv_name).stem().string() + ".gp"), gnuplot_script(plot));
    }

    int failures(std::size_t failed, std::string const& what) {
        if (failed == 0) return kExitOk;
        err_ << failed << ' ' << what << " failed to integrate\n";
        return c_.strict ? kExitRuntime : kExitOk;
    }

    int wba() {
        ModelSystem const system = make_system(c_.system);
        std::string const obs = observable_or_default(system, c_.observable);
        WbaResult const r = weighted_birkhoff_average(system.field, system.complete_state(c_.x0),
                                                      system.observable(obs), c_.weight.make(), c_.T, c_.integrator);
        emit("wba.csv", "T,observable,wba\n" + format_real(c_.T) + "," + obs + "," + format_real(r.average) + "\n",
             {.title = "weighted Birkhoff average", .xlabel = "T", .ylabel = "WB_T(" + obs + ")", .columns = "1:3",
              .style = "points pt 7"});
        summary("WB_T(" + obs + ") = " + format_real(r.average) + "  (T = " + format_real(c_.T) + ")");
        return kExitOk;
    }

    int dig() {
        std::vector<double> const Ts = c_.T_list.empty() ? std::vector<double>{c_.T} : c_.T_list;
        auto const curve = dig_vs_T_curve(c_.system, c_.x0, c_.observable, c_.weight, Ts, c_.integrator, c_.threshold,
                                          c_.workers);
        std::string csv = "T,wba_first,wba_second,absdig,reldig,maxdig,label\n";
        for (auto const& [T, d] : curve) {
            csv += format_real(T) + ',' + format_real(d.wba_first) + ',' + format_real(d.wba_second) + ',' +
                   format_real(d.absdig) + ',' + format_real(d.reldig) + ',' + format_real(d.maxdig) + ',' +
                   to_string(d.label) + '\n';
        }
        emit("dig.csv", csv,
             {.title = "digit accuracy", .xlabel = "T", .ylabel = "maxdig", .columns = "1:6", .logx = Ts.size() > 1});
        auto const& [T, d] = curve.back();
        summary("maxdig = " + fixed(d.maxdig, 2) + "  (absdig " + fixed(d.absdig, 2) + ", reldig " + fixed(d.reldig, 2) +
                ", T = " + format_real(T) + "): " + to_string(d.label));
        return kExitOk;
    }

    // Finished rows are streamed to <name>.partial.csv; the rendered config
    // next to it decides whether a rerun may resume from them.
    int scan(std::string const& name) {
        ScanSpec spec = make_scan_spec(c_);
        fs::path const partial = dir_ / (name + ".partial.csv");
        fs::path const stamp = dir_ / (name + ".partial.cfg");
        RunConfig key = c_;
        key.workers = 0;
        key.strict = false;
        std::string const fingerprint = render_config(key);
        bool resumable = false;
        if (fs::exists(partial) && fs::exists(stamp)) {
            std::ifstream in(stamp, std::ios::binary);
            std::string const previous((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            resumable = previous == fingerprint;
        }
        if (!resumable) {
            fs::remove(partial);
            write_file(stamp, fingerprint);
        } else if (!opt_.quiet) {
            err_ << "resuming from " << partial.string() << '\n';
        }
        spec.checkpoint = partial;

        ScanResult const result = run_scan(spec);

        std::ostringstream csv;
        write_scan_csv(csv, result);
        emit(name + ".csv", csv.str(),
             {.title = c_.system.name + " digit accuracy", .xlabel = spec.grid.name, .ylabel = "maxdig",
              .columns = "2:6", .style = "points pt 7 ps 0.5"});
        write_file(dir_ / (name + ".summary.json"), scan_summary_json(spec, result) + "\n");
        fs::remove(partial);
        fs::remove(stamp);

        summary("chaotic fraction " + fixed(result.chaotic_fraction(), 3) + "  (" + std::to_string(result.chaotic) +
                " of " + std::to_string(result.records.size()) + " chaotic, " + std::to_string(result.failed) +
                " failed)");
        return failures(result.failed, "grid points");
    }

    int fraction_curve() {
        ScanSpec const inner = make_scan_spec(c_);
        auto const curve = chaotic_fraction_curve(inner, *c_.outer);
        std::string csv = "index,value,fraction,chaotic,count\n";
        for (std::size_t i = 0; i < curve.size(); ++i) {
            auto const& p = curve[i];
            csv += std::to_string(i) + ',' + format_real(p.value) + ',' + format_real(p.fraction) + ',' +
                   std::to_string(p.chaotic) + ',' + std::to_string(p.count) + '\n';
        }
        emit("fraction.csv", csv,
             {.title = "chaotic fraction", .xlabel = c_.outer->name, .ylabel = "fraction chaotic", .columns = "2:3"});
        auto const [lo, hi] = std::minmax_element(curve.begin(), curve.end(),
                                                  [](auto const& a, auto const& b) { return a.fraction < b.fraction; });
        summary("chaotic fraction " + fixed(lo->fraction, 3) + " .. " + fixed(hi->fraction, 3) + " over " +
                std::to_string(curve.size()) + " values of " + c_.outer->name);
        return kExitOk;
    }

    int poincare() {
        std::vector<GridPoint> starts;
        if (c_.grid) {
            for (double v : c_.grid->values()) starts.push_back(resolve_grid_point(c_.system, c_.x0, c_.grid->name, v));
        } else {
            ModelSystem system = make_system(c_.system);
            State x0 = system.complete_state(c_.x0);
            starts.push_back({std::move(system), std::move(x0)});
        }
        std::vector<std::vector<State>> orbits(starts.size());
        detail::parallel_for(starts.size(), c_.workers, [&](std::size_t i) {
            orbits[i] = poincare_section(starts[i].system, starts[i].x0, c_.crossings, c_.integrator);
        });

        ModelSystem const& system = starts.front().system;
        // Horizontal axis: the first non-clock angle; vertical: the default observable.
        std::size_t xi = 0;
        while (xi < system.dimension() && (!system.is_angle[xi] || xi == system.clock_index)) ++xi;
        std::size_t const yi = system.coordinate_index(system.default_observable);
        std::ostringstream csv;
        write_poincare_csv(csv, orbits);
        emit("poincare.csv", csv.str(),
             {.title = c_.system.name + " Poincare section", .xlabel = system.coordinates[xi],
              .ylabel = system.coordinates[yi], .columns = std::to_string(xi + 3) + ":" + std::to_string(yi + 3),
              .style = "dots"});
        summary(std::to_string(orbits.size()) + " orbit(s), " + std::to_string(c_.crossings) +
                " crossings each, written to " + (dir_ / "poincare.csv").string());
        return kExitOk;
    }

    int widths() {
        auto const sweep =
            width_sweep(c_.system, c_.x0, c_.observable, c_.widths, c_.T, c_.integrator, c_.threshold, c_.workers);
        std::string csv = "width,wba,absdig,reldig,maxdig,label,status\n";
        std::size_t failed = 0;
        WidthPoint const* best = nullptr;
        for (auto const& p : sweep) {
            csv += format_real(p.width) + ',';
            if (p.accuracy) {
                auto const& d = *p.accuracy;
                csv += format_real(d.wba_first) + ',' + format_real(d.absdig) + ',' + format_real(d.reldig) + ',' +
                       format_real(d.maxdig) + ',' + to_string(d.label);
                if (!best || d.maxdig > best->accuracy->maxdig) best = &p;
            } else {
                csv += "nan,nan,nan,nan,none";
                ++failed;
            }
            csv += ',' + p.status + '\n';
        }
        emit("widths.csv", csv,
             {.title = "digit accuracy against bump width", .xlabel = "w", .ylabel = "maxdig", .columns = "1:5",
              .logx = true});
        if (best) {
            summary("best maxdig " + fixed(best->accuracy->maxdig, 2) + " at w = " + format_real(best->width) + " (" +
                    std::to_string(sweep.size() - failed) + " of " + std::to_string(sweep.size()) + " widths usable)");
        } else {
            summary("no width produced a finite result");
        }
        return failures(failed, "widths");
    }

    int rotation() {
        auto const profile = rotation_profile(make_scan_spec(c_));
        std::string csv = "index,grid_value,rho,status\n";
        std::size_t failed = 0;
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < profile.size(); ++i) {
            auto const& p = profile[i];
            csv += std::to_string(i) + ',' + format_real(p.grid_value) + ',' + format_real(p.rho) + ',' + p.status + '\n';
            if (p.status != "ok") {
                ++failed;
                continue;
            }
            lo = std::min(lo, p.rho);
            hi = std::max(hi, p.rho);
        }
        emit("rotation.csv", csv,
             {.title = "rotation number", .xlabel = c_.grid->name, .ylabel = "rho", .columns = "2:3",
              .style = "points pt 7 ps 0.5"});
        summary("rotation number " + format_real(lo) + " .. " + format_real(hi) + " over " +
                std::to_string(profile.size()) + " points");
        return failures(failed, "grid points");
    }

    int eps_critical() {
        State const x0 = c_.x0.empty() ? default_critical_x0() : c_.x0;
        auto const grid = c_.critical.grid();
        CriticalEpsilon const r = critical_epsilon_crossing(grid, x0, c_.critical.t_max, c_.critical.psi_target,
                                                            c_.integrator, c_.workers, c_.critical.mode_sign);
        emit("eps_critical.csv",
             "epsilon,crossing_time,t_max,psi_target,mode_sign\n" + format_real(r.epsilon) + ',' +
                 format_real(r.crossing_time) + ',' + format_real(c_.critical.t_max) + ',' +
                 format_real(c_.critical.psi_target) + ',' + format_real(c_.critical.mode_sign) + '\n',
             {.title = "first escaping epsilon", .xlabel = "epsilon", .ylabel = "crossing time", .columns = "1:2",
              .style = "points pt 7"});
        summary("epsilon_cr = " + fixed(r.epsilon, 3) + "  (psi crosses " + format_real(c_.critical.psi_target) +
                " at t = " + fixed(r.crossing_time, 1) + ")");
        return kExitOk;
    }
};

}  // namespace

unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    if (char const* env = std::getenv(kWorkersEnv)) {
        char* end = nullptr;
        long const n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(std::min(n, 65535L));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

State default_critical_x0() { return {0.27, 0.375, 0.0}; }

int dispatch(RunConfig const& config, std::ostream& out, std::ostream& err, DispatchOptions const& options) {
    auto const diags = validate(config);
    if (!diags.empty()) {
        for (auto const& d : diags) err << d.str() << '\n';
        return kExitValidation;
    }
    RunConfig c = config;
    c.workers = resolve_workers(c.workers);
    try {
        std::error_code ec;
        fs::create_directories(c.output, ec);
        if (ec) throw IoError("cannot create output directory " + c.output + ": " + ec.message());
        return Runner(std::move(c), out, err, options).run();
    } catch (IoError const& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (fs::filesystem_error const& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace wba::cli
