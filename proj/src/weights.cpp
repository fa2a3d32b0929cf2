#include "wba/weights.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

namespace wba {

namespace {

double unnormalized_bump(double s, double width) noexcept {
    if (!(s > 0.0 && s < 1.0)) return 0.0;
    // Evaluate through the nearer endpoint so that g(s) and g(1-s) agree.
    double const m = s <= 0.5 ? s : 1.0 - s;
    return std::exp(-width / (m * (1.0 - m)));
}

}  // namespace

char const* to_string(WeightKind kind) noexcept {
    switch (kind) {
    case WeightKind::Bump: return "bump";
    case WeightKind::Sin2: return "sin2";
    case WeightKind::Uniform: return "uniform";
    }
    return "unknown";
}

WeightKind weight_kind_from_string(std::string const& name) {
    if (name == "bump") return WeightKind::Bump;
    if (name == "sin2") return WeightKind::Sin2;
    if (name == "uniform") return WeightKind::Uniform;
    throw std::invalid_argument("unknown weight kind '" + name + "' (expected bump, sin2 or uniform)");
}

WeightFunction WeightFunction::bump(double width) {
    if (!(width > 0.0) || !std::isfinite(width)) throw std::invalid_argument("bump width must be positive");
    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 15>;
    double error = 0.0;
    double const integral = Quadrature::integrate(
        [width](double s) { return unnormalized_bump(s, width); }, 0.0, 1.0, 20, 1e-14, &error);
    double const c = 1.0 / integral;
    if (!(integral > 0.0) || !std::isfinite(c)) {
        throw WidthTooLarge("bump width " + std::to_string(width) + " underflows the normalization integral");
    }
    return WeightFunction(WeightKind::Bump, width, c);
}

WeightFunction WeightFunction::sin2() { return WeightFunction(WeightKind::Sin2, 0.0, 2.0); }

WeightFunction WeightFunction::uniform() { return WeightFunction(WeightKind::Uniform, 0.0, 1.0); }

double WeightFunction::operator()(double s) const noexcept {
    switch (kind_) {
    case WeightKind::Bump:
        return norm_constant_ * unnormalized_bump(s, width_);
    case WeightKind::Sin2: {
        if (s < 0.0 || s > 1.0) return 0.0;
        double const m = s <= 0.5 ? s : 1.0 - s;
        double const v = std::sin(std::numbers::pi * m);
        return norm_constant_ * v * v;
    }
    case WeightKind::Uniform:
        return (s < 0.0 || s > 1.0) ? 0.0 : 1.0;
    }
    return 0.0;
}

int WeightFunction::smoothness_class() const noexcept {
    switch (kind_) {
    case WeightKind::Bump: return kInfiniteSmoothness;
    case WeightKind::Sin2: return 1;
    case WeightKind::Uniform: return 0;
    }
    return 0;
}

WeightFunction normalize(WeightKind kind, double width) {
    switch (kind) {
    case WeightKind::Bump: return WeightFunction::bump(width);
    case WeightKind::Sin2: return WeightFunction::sin2();
    case WeightKind::Uniform: return WeightFunction::uniform();
    }
    throw std::invalid_argument("unknown weight kind");
}

}  // namespace wba
