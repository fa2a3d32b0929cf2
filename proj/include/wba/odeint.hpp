#pragma once

// Adaptive explicit Runge-Kutta integration (Dormand-Prince 8(5,3)) for small
// autonomous or clock-augmented ODE systems. All entry points are pure
// functions of their arguments and may be called concurrently.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wba {

using State = std::vector<double>;

/// Right-hand side x' = f(t, x) of a first-order system of fixed dimension.
struct VectorField {
    std::size_t dimension = 0;
    std::function<void(double t, std::span<const double> x, std::span<double> dxdt)> rhs;
};

struct IntegratorConfig {
    double abs_tol = 1e-13;
    double rel_tol = 1e-13;
    double initial_step = 1e-2;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 50'000'000;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    bool operator==(IntegratorConfig const&) const = default;
};

enum class IntegrationErrorKind {
    StepUnderflow,
    NonFiniteDerivative,
    MaxStepsExceeded,
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(IntegrationErrorKind kind, std::string const& what)
        : std::runtime_error(what), kind_(kind) {}

    IntegrationErrorKind kind() const noexcept { return kind_; }

private:
    IntegrationErrorKind kind_;
};

char const* to_string(IntegrationErrorKind kind) noexcept;

struct StepResult {
    State state;
    double t = 0.0;
    double h_taken = 0.0;
    double h_next = 0.0;
    /// Normalized local error: max_i |e_i| / (abs_tol + rel_tol |x_i|). At most 1 on acceptance.
    double err_est = 0.0;
};

/// One accepted step starting from (t, state) with trial size h_try > 0.
/// Rejected attempts shrink h and retry; the caller's state is never touched.
StepResult step(VectorField const& field, std::span<const double> state, double t, double h_try,
                IntegratorConfig const& cfg);

/// Flow endpoint at exactly t1 >= t0. Bit-reproducible for identical inputs.
State integrate_to(VectorField const& field, std::span<const double> state, double t0, double t1,
                   IntegratorConfig const& cfg);

/// States at each of the ascending `times`, computed in a single forward pass.
std::vector<State> sample_at(VectorField const& field, std::span<const double> state, double t0,
                             std::span<const double> times, IntegratorConfig const& cfg);

/// Called after every accepted step; returning false stops the integration.
using StepObserver = std::function<bool(double t, std::span<const double> x)>;

struct ObservedRun {
    State state;
    double t = 0.0;
    bool stopped_early = false;
};

ObservedRun integrate_observed(VectorField const& field, std::span<const double> state, double t0,
                               double t1, IntegratorConfig const& cfg, StepObserver const& observer);

/// The field y' = -f(-s, y), whose forward flow is the backward flow of `field`.
VectorField time_reversed(VectorField field);

/// Reusable stepping engine with preallocated stage storage. Not thread-safe;
/// use one instance per thread. The free functions above wrap this class.
class Dop853Stepper {
public:
    Dop853Stepper(VectorField const& field, IntegratorConfig const& cfg);

    /// Advances (t, x) to t_end, landing on it exactly. `h` carries the
    /// proposed step size in and out so consecutive calls continue smoothly.
    /// Returns false if the observer requested a stop (t is then < t_end).
    bool advance(double& t, State& x, double t_end, double& h, StepObserver const* observer = nullptr);

    /// A single accepted step; returns the normalized error of the accepted attempt.
    double single_step(double& t, State& x, double& h);

    std::size_t steps_taken() const noexcept { return steps_; }
    std::size_t rhs_evaluations() const noexcept { return evaluations_; }

private:
    double attempt(double t, State const& x, double h);
    void evaluate(double t, std::span<const double> x, std::span<double> out);
    double propose(double h, double err, bool after_reject) const;
    void count_step();

    VectorField const& field_;
    IntegratorConfig cfg_;
    std::size_t n_;
    std::vector<State> k_;
    State stage_;
    State x_new_;
    State cached_x_;
    bool have_f0_ = false;
    double f0_time_ = 0.0;
    std::size_t steps_ = 0;
    std::size_t evaluations_ = 0;
};

}  // namespace wba
