#pragma once

// The three model flows: the two-wave Hamiltonian, the quasiperiodically
// forced damped pendulum, and the Farey family of magnetic field-line flows.
// Every system carries a unit-speed clock coordinate so that Poincare sections
// are samples at integer clock values.

#include "wba/birkhoff.hpp"
#include "wba/odeint.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wba {

/// H(q,p,t) = p^2/2 - mu cos(2 pi q) - mu cos(2 pi (q - t)); state (q, p, t).
class TwoWaveSystem {
public:
    static constexpr std::size_t kDimension = 3;

    explicit TwoWaveSystem(double mu) : mu_(mu) {}

    double mu() const noexcept { return mu_; }

    void derivative(double t, std::span<const double> x, std::span<double> dx) const noexcept;
    State eval_derivative(std::span<const double> x, double t = 0.0) const;

    double hamiltonian(std::span<const double> x) const noexcept;
    /// Partial derivative of H in its explicit time argument.
    double explicit_time_derivative(std::span<const double> x) const noexcept;

    VectorField vector_field() const;

private:
    double mu_;
};

/// theta' = p, psi1' = gamma, psi2' = 1,
/// p' = -nu p + a cos(2 pi theta) + b + c (cos(2 pi psi1) + cos(2 pi psi2)).
/// State (theta, psi1, psi2, p).
class QpPendulumSystem {
public:
    static constexpr std::size_t kDimension = 4;

    struct Parameters {
        double nu;
        double a;
        double b;
        double c;
        double gamma;

        bool operator==(Parameters const&) const = default;
    };

    /// nu = a = 6 pi, c = 0.55 nu, gamma = (sqrt 5 - 1)/2, b = b_over_nu * nu.
    static Parameters defaults(double b_over_nu);

    explicit QpPendulumSystem(Parameters params) : params_(params) {}

    Parameters const& parameters() const noexcept { return params_; }

    void derivative(double t, std::span<const double> x, std::span<double> dx) const noexcept;
    State eval_derivative(std::span<const double> x, double t = 0.0) const;
    VectorField vector_field() const;

private:
    Parameters params_;
};

/// One Fourier mode cos(2 pi (m theta - n zeta)) with amplitude
/// epsilon * numerator / denominator (kept rational until evaluation).
struct FareyMode {
    int m;
    int n;
    double numerator;

    bool operator==(FareyMode const&) const = default;
};

inline constexpr double kFareyDenominator = 21600.0;

/// Resonances up to level three of the Farey tree rooted at (0/1, 1/1), with
/// amplitudes chosen so that neighbouring islands just overlap at epsilon = 1.
std::vector<FareyMode> default_farey_modes();

/// psi' = -2 pi sum m e_mn psi (psi - 1) sin(2 pi (m theta - n zeta)),
/// theta' = psi - sum e_mn (2 psi - 1) cos(2 pi (m theta - n zeta)), zeta' = 1.
/// State (psi, theta, zeta).
class FareyFieldSystem {
public:
    static constexpr std::size_t kDimension = 3;

    explicit FareyFieldSystem(double epsilon, std::vector<FareyMode> modes = default_farey_modes(),
                              double denominator = kFareyDenominator);

    double epsilon() const noexcept { return epsilon_; }
    std::vector<FareyMode> const& modes() const noexcept { return modes_; }
    double denominator() const noexcept { return denominator_; }
    /// epsilon_{m,n} for mode i.
    double amplitude(std::size_t i) const noexcept;

    void derivative(double t, std::span<const double> x, std::span<double> dx) const noexcept;
    State eval_derivative(std::span<const double> x, double t = 0.0) const;
    VectorField vector_field() const;

private:
    double epsilon_;
    std::vector<FareyMode> modes_;
    double denominator_;
    std::vector<double> amplitudes_;
    int max_m_ = 0;
    int max_n_ = 0;
};

// ---------------------------------------------------------------------------
// Type-erased systems for configuration-driven use.

/// A system name plus its parameter map, as written in run configurations.
struct SystemDescriptor {
    std::string name;
    std::map<std::string, double> parameters;
    /// Farey only; empty means the default mode set.
    std::vector<FareyMode> modes;
    double mode_denominator = kFareyDenominator;

    bool operator==(SystemDescriptor const&) const = default;
};

class UnknownParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ModelSystem {
    std::string name;
    VectorField field;
    std::vector<std::string> coordinates;
    std::vector<bool> is_angle;
    std::size_t clock_index = 0;
    std::string default_observable;

    std::size_t dimension() const noexcept { return field.dimension; }
    /// Index of a coordinate by name; also accepts the initial-value alias "<name>0".
    std::size_t coordinate_index(std::string const& name) const;
    bool has_coordinate(std::string const& name) const;
    /// h = one coordinate, or "one" for the constant observable.
    Observable observable(std::string const& name) const;
    /// Pads a possibly shortened initial condition with zeros.
    State complete_state(std::span<const double> x0) const;
};

/// Parameter names accepted by make_system for a given system name.
std::vector<std::string> system_parameter_names(std::string const& name);
std::vector<std::string> system_names();

/// Builds a system; throws UnknownParameter / std::invalid_argument on bad input.
ModelSystem make_system(SystemDescriptor const& descriptor);

/// Reduces the angle coordinates (including the clock) of x into [0,1).
State reduce_angles(ModelSystem const& system, std::span<const double> x);

/// States at the next n_crossings integer values of the clock coordinate,
/// angles reduced mod 1.
std::vector<State> poincare_section(ModelSystem const& system, std::span<const double> x0,
                                    std::size_t n_crossings, IntegratorConfig const& cfg);

// ---------------------------------------------------------------------------
// Farey island algebra.

class NotFareyNeighbors : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Delta_{m,n} = 2 sqrt(eps_mn (n/m)(1 - n/m)); requires 0 < n/m < 1.
double island_half_width(int m, int n, double eps_mn);

struct OverlapEntry {
    FareyMode first;
    FareyMode second;
    double half_width_sum;
    double gap;
    double ratio;
};

/// Overlap data for consecutive modes (sorted by n/m) at the given epsilon.
std::vector<OverlapEntry> overlap_check(std::vector<FareyMode> modes, double epsilon,
                                        double denominator = kFareyDenominator);

class NoCrossingFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CriticalEpsilon {
    double epsilon;
    double crossing_time;
};

/// First epsilon on the ascending grid whose orbit from x0 = (psi, theta, zeta)
/// reaches psi > psi_target before t_max. Each orbit uses amplitude
/// mode_sign * epsilon. Grid values are tested in parallel batches of
/// `workers`; the result is independent of the worker count.
CriticalEpsilon critical_epsilon_crossing(std::span<const double> eps_grid, std::span<const double> x0,
                                          double t_max, double psi_target, IntegratorConfig const& cfg,
                                          unsigned workers = 1, double mode_sign = 1.0);

}  // namespace wba
