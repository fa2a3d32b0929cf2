#pragma once

// Weighted Birkhoff averages along flow segments and the two-segment
// digit-accuracy diagnostic used to separate regular from chaotic orbits.

#include "wba/odeint.hpp"
#include "wba/weights.hpp"

#include <functional>
#include <span>
#include <string>

namespace wba {

/// A phase-space function h evaluated on the (lifted) state.
struct Observable {
    std::string name;
    std::function<double(std::span<const double>)> eval;
};

struct WbaResult {
    /// W(T) / T.
    double average = 0.0;
    double T = 0.0;
    /// Flow state at the end of the segment.
    State endpoint;
    WeightFunction weight = WeightFunction::uniform();
    std::string observable;
};

enum class OrbitLabel { Regular, Chaotic };

char const* to_string(OrbitLabel label) noexcept;

/// Digits reported when both segment averages coincide to the last bit.
inline constexpr double kDigitCap = 16.0;
inline constexpr double kDefaultChaosThreshold = 5.0;

struct DigitAccuracy {
    double absdig = 0.0;
    double reldig = 0.0;
    double maxdig = 0.0;
    double wba_first = 0.0;
    double wba_second = 0.0;
    OrbitLabel label = OrbitLabel::Regular;
};

/// WB_T(h)(x0): integrates the flow together with W' = g((t - t0)/T) h(x)
/// over [t0, t0 + T] under one step-size control.
WbaResult weighted_birkhoff_average(VectorField const& field, std::span<const double> x0, Observable const& h,
                                    WeightFunction const& g, double T, IntegratorConfig const& cfg,
                                    double t0 = 0.0);

/// absdig, reldig and maxdig from two segment averages. Exact agreement is
/// clamped to kDigitCap; a zero mean with a nonzero difference gives reldig 0.
DigitAccuracy compare_segments(double first, double second, double threshold = kDefaultChaosThreshold);

/// Averages over [0,T] from x0 and over [T,2T] continuing from x_T, then
/// compares them. Chaotic iff maxdig < threshold.
DigitAccuracy digit_accuracy(VectorField const& field, std::span<const double> x0, Observable const& h,
                             WeightFunction const& g, double T, IntegratorConfig const& cfg,
                             double threshold = kDefaultChaosThreshold);

/// Same as above but also returns the first-segment result.
DigitAccuracy digit_accuracy(VectorField const& field, std::span<const double> x0, Observable const& h,
                             WeightFunction const& g, double T, IntegratorConfig const& cfg, double threshold,
                             WbaResult* first_segment);

/// Rotation number as the weighted average of the angular velocity of a lifted angle.
double rotation_number(VectorField const& field, std::span<const double> x0, Observable const& angular_velocity,
                       WeightFunction const& g, double T, IntegratorConfig const& cfg);

}  // namespace wba
