#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace wba {

enum class WeightKind { Bump, Sin2, Uniform };

char const* to_string(WeightKind kind) noexcept;
WeightKind weight_kind_from_string(std::string const& name);

/// Sentinel returned by smoothness_class() for weights flat to all orders.
inline constexpr int kInfiniteSmoothness = std::numeric_limits<int>::max();

class WidthTooLarge : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A normalized weight g on [0,1], integral one. Immutable once built.
///
///   bump(w):  C exp(-w / (s(1-s)))   on (0,1), 0 elsewhere
///   sin2:     2 sin^2(pi s)          on [0,1], 0 elsewhere
///   uniform:  1                      on [0,1], 0 elsewhere
class WeightFunction {
public:
    /// Bump with width w > 0; C is found by adaptive quadrature.
    static WeightFunction bump(double width = 1.0);
    static WeightFunction sin2();
    static WeightFunction uniform();

    double operator()(double s) const noexcept;
    double eval(double s) const noexcept { return (*this)(s); }

    WeightKind kind() const noexcept { return kind_; }
    double width() const noexcept { return width_; }
    double norm_constant() const noexcept { return norm_constant_; }

    /// Number m of endpoint derivatives that vanish (g in G_m).
    int smoothness_class() const noexcept;

    bool operator==(WeightFunction const&) const = default;

private:
    WeightFunction(WeightKind kind, double width, double c) : kind_(kind), width_(width), norm_constant_(c) {}

    WeightKind kind_;
    double width_;
    double norm_constant_;
};

/// Builds the normalized weight of the given kind; `width` is used by the bump only.
WeightFunction normalize(WeightKind kind, double width = 1.0);

}  // namespace wba
