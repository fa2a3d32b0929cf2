#include "wba/systems.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

namespace wba {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SinCos {
    double s;
    double c;
};

// sin and cos of 2 pi x after an exact reduction of x to [-1/2, 1/2], so that
// lifted angles far from the origin lose no phase accuracy.
SinCos sincos_2pi(double x) noexcept {
    double const r = x - std::nearbyint(x);
    return {std::sin(kTwoPi * r), std::cos(kTwoPi * r)};
}

double cos_2pi(double x) noexcept { return std::cos(kTwoPi * (x - std::nearbyint(x))); }

template <class System>
VectorField field_of(System const& system) {
    VectorField f;
    f.dimension = System::kDimension;
    f.rhs = [system](double t, std::span<const double> x, std::span<double> dx) { system.derivative(t, x, dx); };
    return f;
}

template <class System>
State derivative_of(System const& system, std::span<const double> x, double t) {
    if (x.size() != System::kDimension) throw std::invalid_argument("state has the wrong dimension");
    State dx(System::kDimension);
    system.derivative(t, x, dx);
    return dx;
}

}  // namespace

// ---------------------------------------------------------------------------
// Two-wave model

void TwoWaveSystem::derivative(double, std::span<const double> x, std::span<double> dx) const noexcept {
    SinCos const q = sincos_2pi(x[0]);
    SinCos const t = sincos_2pi(x[2]);
    double const sin_q_minus_t = q.s * t.c - q.c * t.s;
    dx[0] = x[1];
    dx[1] = -kTwoPi * mu_ * (q.s + sin_q_minus_t);
    dx[2] = 1.0;
}

State TwoWaveSystem::eval_derivative(std::span<const double> x, double t) const {
    return derivative_of(*this, x, t);
}

double TwoWaveSystem::hamiltonian(std::span<const double> x) const noexcept {
    return 0.5 * x[1] * x[1] - mu_ * cos_2pi(x[0]) - mu_ * cos_2pi(x[0] - x[2]);
}

double TwoWaveSystem::explicit_time_derivative(std::span<const double> x) const noexcept {
    return -kTwoPi * mu_ * sincos_2pi(x[0] - x[2]).s;
}

VectorField TwoWaveSystem::vector_field() const { return field_of(*this); }

// ---------------------------------------------------------------------------
// Quasiperiodically forced pendulum

QpPendulumSystem::Parameters QpPendulumSystem::defaults(double b_over_nu) {
    double const nu = 6.0 * std::numbers::pi;
    return Parameters{nu, nu, b_over_nu * nu, 0.55 * nu, 0.5 * (std::sqrt(5.0) - 1.0)};
}

void QpPendulumSystem::derivative(double, std::span<const double> x, std::span<double> dx) const noexcept {
    auto const& P = params_;
    dx[0] = x[3];
    dx[1] = P.gamma;
    dx[2] = 1.0;
    dx[3] = -P.nu * x[3] + P.a * cos_2pi(x[0]) + P.b + P.c * (cos_2pi(x[1]) + cos_2pi(x[2]));
}

State QpPendulumSystem::eval_derivative(std::span<const double> x, double t) const {
    return derivative_of(*this, x, t);
}

VectorField QpPendulumSystem::vector_field() const { return field_of(*this); }

// ---------------------------------------------------------------------------
// Farey field-line flow

std::vector<FareyMode> default_farey_modes() {
    return {{4, 1, 72.0}, {3, 1, 27.0}, {5, 2, 25.0}, {2, 1, 96.0}, {5, 3, 25.0}, {3, 2, 27.0}, {4, 3, 72.0}};
}

FareyFieldSystem::FareyFieldSystem(double epsilon, std::vector<FareyMode> modes, double denominator)
    : epsilon_(epsilon), modes_(std::move(modes)), denominator_(denominator) {
    if (!std::isfinite(epsilon_)) throw std::invalid_argument("epsilon must be finite");
    if (!(denominator_ > 0.0)) throw std::invalid_argument("mode denominator must be positive");
    for (auto const& mode : modes_) {
        if (mode.m <= 0 || mode.n < 0) throw std::invalid_argument("Farey modes need m > 0 and n >= 0");
        if (std::gcd(mode.m, mode.n) != 1) {
            std::ostringstream msg;
            msg << "Farey mode (" << mode.m << "," << mode.n << ") is not coprime";
            throw std::invalid_argument(msg.str());
        }
        amplitudes_.push_back(epsilon_ * mode.numerator / denominator_);
        max_m_ = std::max(max_m_, mode.m);
        max_n_ = std::max(max_n_, mode.n);
    }
}

double FareyFieldSystem::amplitude(std::size_t i) const noexcept { return amplitudes_[i]; }

void FareyFieldSystem::derivative(double, std::span<const double> x, std::span<double> dx) const noexcept {
    double const psi = x[0];
    // Harmonics e^{2 pi i m theta} and e^{-2 pi i n zeta} by repeated multiplication.
    constexpr int kMaxHarmonic = 16;
    std::array<SinCos, kMaxHarmonic + 1> th{};
    std::array<SinCos, kMaxHarmonic + 1> ze{};
    int const mm = std::min(max_m_, kMaxHarmonic);
    int const nn = std::min(max_n_, kMaxHarmonic);
    bool const recurse = max_m_ <= kMaxHarmonic && max_n_ <= kMaxHarmonic;
    if (recurse) {
        th[0] = {0.0, 1.0};
        ze[0] = {0.0, 1.0};
        SinCos const t1 = sincos_2pi(x[1]);
        SinCos const z1 = sincos_2pi(x[2]);
        for (int k = 1; k <= mm; ++k) {
            th[k] = {th[k - 1].s * t1.c + th[k - 1].c * t1.s, th[k - 1].c * t1.c - th[k - 1].s * t1.s};
        }
        for (int k = 1; k <= nn; ++k) {
            ze[k] = {ze[k - 1].s * z1.c + ze[k - 1].c * z1.s, ze[k - 1].c * z1.c - ze[k - 1].s * z1.s};
        }
    }
    double sum_sin = 0.0;
    double sum_cos = 0.0;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        auto const& mode = modes_[i];
        SinCos phase;
        if (recurse) {
            SinCos const a = th[mode.m];
            SinCos const b = ze[mode.n];
            phase = {a.s * b.c - a.c * b.s, a.c * b.c + a.s * b.s};
        } else {
            double const mt = x[1] * mode.m;
            double const nz = x[2] * mode.n;
            phase = sincos_2pi((mt - std::nearbyint(mt)) - (nz - std::nearbyint(nz)));
        }
        sum_sin += mode.m * amplitudes_[i] * phase.s;
        sum_cos += amplitudes_[i] * phase.c;
    }
    dx[0] = -kTwoPi * psi * (psi - 1.0) * sum_sin;
    dx[1] = psi - (2.0 * psi - 1.0) * sum_cos;
    dx[2] = 1.0;
}

State FareyFieldSystem::eval_derivative(std::span<const double> x, double t) const {
    return derivative_of(*this, x, t);
}

VectorField FareyFieldSystem::vector_field() const { return field_of(*this); }

// ---------------------------------------------------------------------------
// Type-erased construction

std::size_t ModelSystem::coordinate_index(std::string const& key) const {
    for (std::size_t i = 0; i < coordinates.size(); ++i) {
        if (coordinates[i] == key || coordinates[i] + "0" == key) return i;
    }
    throw std::invalid_argument("system '" + name + "' has no coordinate '" + key + "'");
}

bool ModelSystem::has_coordinate(std::string const& key) const {
    return std::any_of(coordinates.begin(), coordinates.end(),
                       [&](std::string const& c) { return c == key || c + "0" == key; });
}

Observable ModelSystem::observable(std::string const& key) const {
    if (key == "one") return Observable{"one", [](std::span<const double>) { return 1.0; }};
    std::size_t const i = coordinate_index(key);
    return Observable{coordinates[i], [i](std::span<const double> x) { return x[i]; }};
}

State ModelSystem::complete_state(std::span<const double> x0) const {
    if (x0.size() > dimension()) {
        std::ostringstream msg;
        msg << "initial condition for '" << name << "' has at most " << dimension() << " components";
        throw std::invalid_argument(msg.str());
    }
    State x(dimension(), 0.0);
    std::copy(x0.begin(), x0.end(), x.begin());
    return x;
}

std::vector<std::string> system_names() { return {"two-wave", "qp-pendulum", "farey"}; }

std::vector<std::string> system_parameter_names(std::string const& name) {
    if (name == "two-wave") return {"mu"};
    if (name == "qp-pendulum") return {"nu", "a", "b", "b_over_nu", "c", "c_over_nu", "gamma"};
    if (name == "farey") return {"epsilon"};
    throw std::invalid_argument("unknown system '" + name + "' (expected two-wave, qp-pendulum or farey)");
}

ModelSystem make_system(SystemDescriptor const& descriptor) {
    auto const allowed = system_parameter_names(descriptor.name);
    for (auto const& [key, value] : descriptor.parameters) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw UnknownParameter("system '" + descriptor.name + "' has no parameter '" + key + "'");
        }
        if (!std::isfinite(value)) throw std::invalid_argument("parameter '" + key + "' must be finite");
    }
    auto get = [&](std::string const& key) -> std::optional<double> {
        auto it = descriptor.parameters.find(key);
        if (it == descriptor.parameters.end()) return std::nullopt;
        return it->second;
    };
    auto require = [&](std::string const& key) {
        auto v = get(key);
        if (!v) throw std::invalid_argument("system '" + descriptor.name + "' requires parameter '" + key + "'");
        return *v;
    };
    if (descriptor.name != "farey" && !descriptor.modes.empty()) {
        throw std::invalid_argument("mode lists are only accepted by the farey system");
    }

    ModelSystem out;
    out.name = descriptor.name;
    if (descriptor.name == "two-wave") {
        out.field = TwoWaveSystem(require("mu")).vector_field();
        out.coordinates = {"q", "p", "t"};
        out.is_angle = {true, false, true};
        out.clock_index = 2;
        out.default_observable = "p";
    } else if (descriptor.name == "qp-pendulum") {
        auto b = get("b");
        auto b_over_nu = get("b_over_nu");
        if (b.has_value() == b_over_nu.has_value()) {
            throw std::invalid_argument("qp-pendulum needs exactly one of 'b' or 'b_over_nu'");
        }
        auto params = QpPendulumSystem::defaults(0.0);
        if (auto nu = get("nu")) params.nu = *nu;
        params.a = get("a").value_or(params.nu);
        if (get("c") && get("c_over_nu")) throw std::invalid_argument("qp-pendulum accepts only one of 'c' or 'c_over_nu'");
        params.c = get("c").value_or(get("c_over_nu").value_or(0.55) * params.nu);
        params.b = b ? *b : *b_over_nu * params.nu;
        if (auto gamma = get("gamma")) params.gamma = *gamma;
        out.field = QpPendulumSystem(params).vector_field();
        out.coordinates = {"theta", "psi1", "psi2", "p"};
        out.is_angle = {true, true, true, false};
        out.clock_index = 2;
        out.default_observable = "p";
    } else {
        double const epsilon = require("epsilon");
        auto modes = descriptor.modes.empty() ? default_farey_modes() : descriptor.modes;
        out.field = FareyFieldSystem(epsilon, std::move(modes), descriptor.mode_denominator).vector_field();
        out.coordinates = {"psi", "theta", "zeta"};
        out.is_angle = {false, true, true};
        out.clock_index = 2;
        out.default_observable = "psi";
    }
    return out;
}

State reduce_angles(ModelSystem const& system, std::span<const double> x) {
    State out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size() && i < system.is_angle.size(); ++i) {
        if (system.is_angle[i]) {
            out[i] -= std::floor(out[i]);
            if (out[i] >= 1.0) out[i] = 0.0;
        }
    }
    return out;
}

std::vector<State> poincare_section(ModelSystem const& system, std::span<const double> x0, std::size_t n_crossings,
                                    IntegratorConfig const& cfg) {
    if (x0.size() != system.dimension()) throw std::invalid_argument("initial state has the wrong dimension");
    double const clock0 = x0[system.clock_index];
    double const first = std::floor(clock0) + 1.0;
    std::vector<double> times(n_crossings);
    for (std::size_t k = 0; k < n_crossings; ++k) times[k] = (first + static_cast<double>(k)) - clock0;
    auto samples = sample_at(system.field, x0, 0.0, times, cfg);
    for (auto& s : samples) s = reduce_angles(system, s);
    return samples;
}

// ---------------------------------------------------------------------------
// Farey island algebra

double island_half_width(int m, int n, double eps_mn) {
    if (m <= 0 || n <= 0 || n >= m) {
        std::ostringstream msg;
        msg << "resonance " << n << "/" << m << " lies outside (0,1)";
        throw std::domain_error(msg.str());
    }
    if (eps_mn < 0.0) throw std::domain_error("island amplitude must be non-negative");
    double const r = static_cast<double>(n) / static_cast<double>(m);
    return 2.0 * std::sqrt(eps_mn * r * (1.0 - r));
}

std::vector<OverlapEntry> overlap_check(std::vector<FareyMode> modes, double epsilon, double denominator) {
    std::sort(modes.begin(), modes.end(), [](FareyMode const& l, FareyMode const& r) {
        return static_cast<long>(l.n) * r.m < static_cast<long>(r.n) * l.m;
    });
    std::vector<OverlapEntry> out;
    for (std::size_t i = 0; i + 1 < modes.size(); ++i) {
        auto const& a = modes[i];
        auto const& b = modes[i + 1];
        long const det = static_cast<long>(a.n) * b.m - static_cast<long>(b.n) * a.m;
        if (std::abs(det) != 1) {
            std::ostringstream msg;
            msg << a.n << "/" << a.m << " and " << b.n << "/" << b.m << " are not Farey neighbors";
            throw NotFareyNeighbors(msg.str());
        }
        double const sum = island_half_width(a.m, a.n, epsilon * a.numerator / denominator) +
                           island_half_width(b.m, b.n, epsilon * b.numerator / denominator);
        double const gap = 1.0 / (static_cast<double>(a.m) * static_cast<double>(b.m));
        out.push_back({a, b, sum, gap, sum / gap});
    }
    return out;
}

CriticalEpsilon critical_epsilon_crossing(std::span<const double> eps_grid, std::span<const double> x0,
                                          double t_max, double psi_target, IntegratorConfig const& cfg,
                                          unsigned workers, double mode_sign) {
    if (mode_sign != 1.0 && mode_sign != -1.0) throw std::invalid_argument("mode_sign must be +1 or -1");
    if (!std::is_sorted(eps_grid.begin(), eps_grid.end())) throw std::invalid_argument("epsilon grid must be ascending");
    if (x0.size() != FareyFieldSystem::kDimension) throw std::invalid_argument("initial state must be (psi, theta, zeta)");
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");

    std::size_t const batch = std::max(1u, workers);
    for (std::size_t start = 0; start < eps_grid.size(); start += batch) {
        std::size_t const count = std::min(batch, eps_grid.size() - start);
        std::vector<std::optional<double>> crossing(count);
        detail::parallel_for(count, workers, [&](std::size_t i) {
            FareyFieldSystem const system(mode_sign * eps_grid[start + i]);
            VectorField const field = system.vector_field();
            double hit = 0.0;
            StepObserver const observer = [&](double t, std::span<const double> x) {
                if (x[0] > psi_target) {
                    hit = t;
                    return false;
                }
                return true;
            };
            if (x0[0] > psi_target) {
                crossing[i] = 0.0;
                return;
            }
            auto const run = integrate_observed(field, x0, 0.0, t_max, cfg, observer);
            if (run.stopped_early) crossing[i] = hit;
        });
        for (std::size_t i = 0; i < count; ++i) {
            if (crossing[i]) return {eps_grid[start + i], *crossing[i]};
        }
    }
    throw NoCrossingFound("no epsilon on the grid drives psi above the target before t_max");
}

}  // namespace wba
