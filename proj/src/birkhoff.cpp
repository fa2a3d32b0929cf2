#include "wba/birkhoff.hpp"

#include <cmath>
#include <stdexcept>

namespace wba {

char const* to_string(OrbitLabel label) noexcept {
    return label == OrbitLabel::Chaotic ? "chaotic" : "regular";
}

WbaResult weighted_birkhoff_average(VectorField const& field, std::span<const double> x0, Observable const& h,
                                    WeightFunction const& g, double T, IntegratorConfig const& cfg, double t0) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be positive");
    if (x0.size() != field.dimension) throw std::invalid_argument("initial state has the wrong dimension");
    if (!h.eval) throw std::invalid_argument("observable has no evaluator");

    std::size_t const d = field.dimension;
    VectorField augmented;
    augmented.dimension = d + 1;
    augmented.rhs = [&field, &h, &g, d, t0, T](double t, std::span<const double> x, std::span<double> dx) {
        auto const flow_state = x.first(d);
        field.rhs(t, flow_state, dx.first(d));
        dx[d] = g((t - t0) / T) * h.eval(flow_state);
    };

    State y(x0.begin(), x0.end());
    y.push_back(0.0);
    State const end = integrate_to(augmented, y, t0, t0 + T, cfg);

    WbaResult result;
    result.average = end[d] / T;
    result.T = T;
    result.endpoint.assign(end.begin(), end.begin() + static_cast<std::ptrdiff_t>(d));
    result.weight = g;
    result.observable = h.name;
    return result;
}

DigitAccuracy compare_segments(double first, double second, double threshold) {
    DigitAccuracy out;
    out.wba_first = first;
    out.wba_second = second;
    double const diff = std::abs(first - second);
    double const mean = 0.5 * (std::abs(first) + std::abs(second));
    if (diff == 0.0) {
        out.absdig = kDigitCap;
        out.reldig = kDigitCap;
    } else {
        out.absdig = -std::log10(diff);
        out.reldig = mean > 0.0 ? -std::log10(diff / mean) : 0.0;
    }
    out.maxdig = std::max(out.absdig, out.reldig);
    out.label = out.maxdig < threshold ? OrbitLabel::Chaotic : OrbitLabel::Regular;
    return out;
}

DigitAccuracy digit_accuracy(VectorField const& field, std::span<const double> x0, Observable const& h,
                             WeightFunction const& g, double T, IntegratorConfig const& cfg, double threshold,
                             WbaResult* first_segment) {
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    WbaResult first = weighted_birkhoff_average(field, x0, h, g, T, cfg, 0.0);
    WbaResult const second = weighted_birkhoff_average(field, first.endpoint, h, g, T, cfg, T);
    DigitAccuracy out = compare_segments(first.average, second.average, threshold);
    if (first_segment) *first_segment = std::move(first);
    return out;
}

DigitAccuracy digit_accuracy(VectorField const& field, std::span<const double> x0, Observable const& h,
                             WeightFunction const& g, double T, IntegratorConfig const& cfg, double threshold) {
    return digit_accuracy(field, x0, h, g, T, cfg, threshold, nullptr);
}

double rotation_number(VectorField const& field, std::span<const double> x0, Observable const& angular_velocity,
                       WeightFunction const& g, double T, IntegratorConfig const& cfg) {
    return weighted_birkhoff_average(field, x0, angular_velocity, g, T, cfg).average;
}

}  // namespace wba
