#include "wba/odeint.hpp"

#include "dop853_tableau.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wba {

namespace {

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;
// Controller exponent for the order-7 error estimate.
constexpr double kExponent = 1.0 / 8.0;

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

char const* to_string(IntegrationErrorKind kind) noexcept {
    switch (kind) {
    case IntegrationErrorKind::StepUnderflow: return "StepUnderflow";
    case IntegrationErrorKind::NonFiniteDerivative: return "NonFiniteDerivative";
    case IntegrationErrorKind::MaxStepsExceeded: return "MaxStepsExceeded";
    }
    return "IntegrationError";
}

void IntegratorConfig::validate() const {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("abs_tol must be positive");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
    if (!(initial_step > 0.0)) throw std::invalid_argument("initial_step must be positive");
    if (!(max_step > 0.0)) throw std::invalid_argument("max_step must be positive");
    if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
}

Dop853Stepper::Dop853Stepper(VectorField const& field, IntegratorConfig const& cfg)
    : field_(field), cfg_(cfg), n_(field.dimension), k_(dop853::kStages, State(n_)), stage_(n_),
      x_new_(n_), cached_x_(n_) {
    cfg_.validate();
    if (n_ == 0 || !field_.rhs) throw std::invalid_argument("vector field is empty");
}

void Dop853Stepper::evaluate(double t, std::span<const double> x, std::span<double> out) {
    field_.rhs(t, x, out);
    ++evaluations_;
    if (!all_finite(out)) {
        std::ostringstream msg;
        msg << "non-finite derivative at t = " << t;
        throw IntegrationError(IntegrationErrorKind::NonFiniteDerivative, msg.str());
    }
}

void Dop853Stepper::count_step() {
    if (++steps_ > cfg_.max_steps) {
        std::ostringstream msg;
        msg << "exceeded max_steps = " << cfg_.max_steps;
        throw IntegrationError(IntegrationErrorKind::MaxStepsExceeded, msg.str());
    }
}

// Fills x_new_ for a trial step and returns its normalized error; k_[0] must hold f(t, x).
double Dop853Stepper::attempt(double t, State const& x, double h) {
    using dop853::a;
    using dop853::b;
    using dop853::c;
    for (int s = 1; s < dop853::kStages; ++s) {
        for (std::size_t i = 0; i < n_; ++i) {
            double acc = 0.0;
            for (int j = 0; j < s; ++j) acc += a[s][j] * k_[j][i];
            stage_[i] = x[i] + h * acc;
        }
        evaluate(t + c[s] * h, stage_, k_[s]);
    }

    double err5 = 0.0;
    double err3 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        double e5 = 0.0;
        double e3 = 0.0;
        for (int j = 0; j < dop853::kStages; ++j) {
            acc += b[j] * k_[j][i];
            e5 += dop853::e5[j] * k_[j][i];
            e3 += dop853::e3[j] * k_[j][i];
        }
        x_new_[i] = x[i] + h * acc;
        double const scale = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(x[i]), std::abs(x_new_[i]));
        err5 = std::max(err5, std::abs(e5) / scale);
        err3 = std::max(err3, std::abs(e3) / scale);
    }
    double const denom = err5 * err5 + 0.01 * err3 * err3;
    if (denom <= 0.0) return 0.0;
    return std::abs(h) * err5 * err5 / std::sqrt(denom);
}

double Dop853Stepper::propose(double h, double err, bool after_reject) const {
    double factor = err > 0.0 ? kSafety * std::pow(err, -kExponent) : kMaxFactor;
    factor = std::clamp(factor, kMinFactor, after_reject ? 1.0 : kMaxFactor);
    return std::min(h * factor, cfg_.max_step);
}

double Dop853Stepper::single_step(double& t, State& x, double& h) {
    if (x.size() != n_) throw std::invalid_argument("state dimension does not match the vector field");
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    h = std::min(h, cfg_.max_step);
    if (!have_f0_ || f0_time_ != t || !std::equal(x.begin(), x.end(), cached_x_.begin())) {
        evaluate(t, x, k_[0]);
    }
    bool rejected = false;
    for (;;) {
        count_step();
        if (!(t + h > t)) {
            std::ostringstream msg;
            msg << "step size " << h << " underflows at t = " << t;
            throw IntegrationError(IntegrationErrorKind::StepUnderflow, msg.str());
        }
        double const err = attempt(t, x, h);
        if (!std::isfinite(err)) {
            throw IntegrationError(IntegrationErrorKind::NonFiniteDerivative, "non-finite error estimate");
        }
        if (err <= 1.0) {
            double const t_new = t + h;
            double const h_next = propose(h, err, rejected);
            evaluate(t_new, x_new_, k_[0]);
            x.swap(x_new_);
            // k_[0] now holds f(t_new, x); reused by the next call if x is untouched.
            std::copy(x.begin(), x.end(), cached_x_.begin());
            have_f0_ = true;
            f0_time_ = t_new;
            t = t_new;
            h = h_next;
            return err;
        }
        h = propose(h, err, true);
        rejected = true;
    }
}

bool Dop853Stepper::advance(double& t, State& x, double t_end, double& h, StepObserver const* observer) {
    if (t_end < t) throw std::invalid_argument("advance requires t_end >= t");
    while (t < t_end) {
        double const remaining = t_end - t;
        if (h * 1.01 >= remaining) {
            double const saved = h;
            double trial = remaining;
            single_step(t, x, trial);
            if (t >= t_end || std::abs(t_end - t) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(t_end)) {
                t = t_end;
                f0_time_ = t_end;
                h = std::max(trial, saved);
            } else {
                // The shortened step was itself cut back; keep the smaller proposal.
                h = trial;
            }
        } else {
            single_step(t, x, h);
        }
        if (observer && !(*observer)(t, x)) return false;
    }
    return true;
}

StepResult step(VectorField const& field, std::span<const double> state, double t, double h_try,
                IntegratorConfig const& cfg) {
    if (!all_finite(state)) throw std::invalid_argument("state must be finite");
    Dop853Stepper stepper(field, cfg);
    State x(state.begin(), state.end());
    double h = h_try;
    double const t_start = t;
    StepResult out;
    out.err_est = stepper.single_step(t, x, h);
    out.state = std::move(x);
    out.t = t;
    out.h_taken = t - t_start;
    out.h_next = h;
    return out;
}

State integrate_to(VectorField const& field, std::span<const double> state, double t0, double t1,
                   IntegratorConfig const& cfg) {
    return integrate_observed(field, state, t0, t1, cfg, nullptr).state;
}

ObservedRun integrate_observed(VectorField const& field, std::span<const double> state, double t0,
                               double t1, IntegratorConfig const& cfg, StepObserver const& observer) {
    if (t1 < t0) throw std::invalid_argument("integrate_to requires t1 >= t0");
    if (!all_finite(state)) throw std::invalid_argument("state must be finite");
    ObservedRun run{State(state.begin(), state.end()), t0, false};
    if (t1 == t0) return run;
    Dop853Stepper stepper(field, cfg);
    double h = cfg.initial_step;
    run.stopped_early = !stepper.advance(run.t, run.state, t1, h, observer ? &observer : nullptr);
    return run;
}

std::vector<State> sample_at(VectorField const& field, std::span<const double> state, double t0,
                             std::span<const double> times, IntegratorConfig const& cfg) {
    if (!all_finite(state)) throw std::invalid_argument("state must be finite");
    if (!times.empty() && times.front() < t0) throw std::invalid_argument("sample times must start at or after t0");
    if (!std::is_sorted(times.begin(), times.end())) throw std::invalid_argument("sample times must be ascending");
    std::vector<State> out;
    out.reserve(times.size());
    Dop853Stepper stepper(field, cfg);
    State x(state.begin(), state.end());
    double t = t0;
    double h = cfg.initial_step;
    for (double target : times) {
        if (target > t) stepper.advance(t, x, target, h);
        out.push_back(x);
    }
    return out;
}

VectorField time_reversed(VectorField field) {
    VectorField reversed;
    reversed.dimension = field.dimension;
    reversed.rhs = [f = std::move(field.rhs)](double s, std::span<const double> x, std::span<double> dx) {
        f(-s, x, dx);
        for (double& v : dx) v = -v;
    };
    return reversed;
}

}  // namespace wba
