#include "dop853_tableau.hpp"
#include "wba/odeint.hpp"
#include "wba/systems.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace wba;

namespace {

VectorField zero_field(std::size_t n) {
    return {n, [](double, std::span<const double>, std::span<double> dx) {
                for (double& v : dx) v = 0.0;
            }};
}

VectorField exponential() {
    return {1, [](double, std::span<const double> x, std::span<double> dx) { dx[0] = x[0]; }};
}

VectorField oscillator() {
    return {2, [](double, std::span<const double> x, std::span<double> dx) {
                dx[0] = x[1];
                dx[1] = -x[0];
            }};
}

VectorField unit_speed() {
    return {1, [](double, std::span<const double>, std::span<double> dx) { dx[0] = 1.0; }};
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

TEST_CASE("tableau satisfies the quadrature and row-sum conditions") {
    using namespace dop853;
    for (int k = 0; k <= 7; ++k) {
        double sum = 0.0;
        for (int i = 0; i < kStages; ++i) sum += b[i] * std::pow(c[i], k);
        CHECK(sum == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
    }
    for (int i = 1; i < kStages; ++i) {
        double row = 0.0;
        for (int j = 0; j < i; ++j) row += a[i][j];
        CHECK(row == doctest::Approx(c[i]).epsilon(1e-13));
    }
    double s3 = 0.0, s5 = 0.0;
    for (int i = 0; i < kStages; ++i) {
        s3 += e3[i];
        s5 += e5[i];
    }
    // Both error estimators compare two consistent methods.
    CHECK(std::fabs(s3) < 1e-14);
    CHECK(std::fabs(s5) < 1e-14);
}

TEST_CASE("zero field leaves the state alone and grows the step") {
    IntegratorConfig cfg;
    State const s{0.3, -2.0, 7.0};
    auto const r = step(zero_field(3), s, 1.0, 0.25, cfg);
    CHECK(r.state == s);
    CHECK(r.t == 1.25);
    CHECK(r.h_taken == 0.25);
    CHECK(r.h_next >= 0.25);
    CHECK(r.err_est == 0.0);
}

TEST_CASE("accepted steps report a normalized error of at most one") {
    IntegratorConfig cfg;
    auto const r = step(oscillator(), State{1.0, 0.0}, 0.0, 1.0, cfg);
    CHECK(r.err_est <= 1.0);
    CHECK(r.h_taken > 0.0);
    CHECK(r.h_taken <= 1.0);
}

TEST_CASE("exponential growth to t = 1") {
    IntegratorConfig cfg;
    State const x = integrate_to(exponential(), State{1.0}, 0.0, 1.0, cfg);
    CHECK(std::fabs(x[0] - std::numbers::e) <= 1e-12);
}

TEST_CASE("oscillator returns to its start after one period") {
    IntegratorConfig cfg;
    State const x = integrate_to(oscillator(), State{1.0, 0.0}, 0.0, kTwoPi, cfg);
    CHECK(std::fabs(x[0] - 1.0) <= 1e-11);
    CHECK(std::fabs(x[1]) <= 1e-11);
}

TEST_CASE("global error stays within 100 tol over one period") {
    for (double tol : {1e-6, 1e-8, 1e-10, 1e-12}) {
        IntegratorConfig cfg;
        cfg.abs_tol = cfg.rel_tol = tol;
        State const x = integrate_to(oscillator(), State{1.0, 0.0}, 0.0, kTwoPi, cfg);
        double const err = std::hypot(x[0] - 1.0, x[1]);
        INFO("tol = " << tol << ", err = " << err);
        CHECK(err <= 100.0 * tol);
    }
}

TEST_CASE("tightening the tolerance does not blow up the error") {
    double previous = INFINITY;
    for (double tol : {1e-8, 5e-9, 1e-10, 5e-11, 1e-12, 5e-13}) {
        IntegratorConfig cfg;
        cfg.abs_tol = cfg.rel_tol = tol;
        double const err = std::fabs(integrate_to(exponential(), State{1.0}, 0.0, 1.0, cfg)[0] - std::numbers::e);
        INFO("tol = " << tol << ", err = " << err);
        CHECK(err <= 4.0 * previous);
        previous = std::max(err, 1e-16);
    }
}

TEST_CASE("empty interval returns the input") {
    IntegratorConfig cfg;
    State const s{0.1, 0.2};
    CHECK(integrate_to(oscillator(), s, 3.0, 3.0, cfg) == s);
}

TEST_CASE("integration is bit-reproducible") {
    IntegratorConfig cfg;
    TwoWaveSystem const sys(0.03);
    State const x0{0.0, 0.3, 0.0};
    State const a = integrate_to(sys.vector_field(), x0, 0.0, 50.0, cfg);
    State const b = integrate_to(sys.vector_field(), x0, 0.0, 50.0, cfg);
    CHECK(a == b);
}

TEST_CASE("two-wave momentum is conserved without forcing") {
    IntegratorConfig cfg;
    TwoWaveSystem const sys(0.0);
    State const x = integrate_to(sys.vector_field(), State{0.1, 0.37, 0.0}, 0.0, 100.0, cfg);
    CHECK(x[1] == 0.37);
    CHECK(x[0] == doctest::Approx(0.1 + 37.0).epsilon(1e-13));
}

TEST_CASE("forward then backward recovers the initial state") {
    IntegratorConfig cfg;
    TwoWaveSystem const sys(0.03);
    VectorField const f = sys.vector_field();
    State const x0{0.2, 0.41, 0.0};
    State const x1 = integrate_to(f, x0, 0.0, 10.0, cfg);
    // Backward flow over [10, 0] is the forward flow of the reversed field over [-10, 0].
    State const back = integrate_to(time_reversed(f), x1, -10.0, 0.0, cfg);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::fabs(back[i] - x0[i]) <= 100.0 * cfg.abs_tol * 10.0);
}

TEST_CASE("sample_at") {
    IntegratorConfig cfg;
    SUBCASE("single sample at t0") {
        State const s{0.5};
        double const times[] = {0.0};
        auto const out = sample_at(unit_speed(), s, 0.0, times, cfg);
        REQUIRE(out.size() == 1);
        CHECK(out[0] == s);
    }
    SUBCASE("linear flow") {
        double const times[] = {1.0, 2.0, 3.0};
        auto const out = sample_at(unit_speed(), State{0.0}, 0.0, times, cfg);
        REQUIRE(out.size() == 3);
        for (int k = 0; k < 3; ++k) CHECK(std::fabs(out[k][0] - (k + 1)) <= 1e-13);
    }
    SUBCASE("oscillator at whole periods") {
        double const times[] = {kTwoPi, 2.0 * kTwoPi};
        auto const out = sample_at(oscillator(), State{1.0, 0.0}, 0.0, times, cfg);
        for (auto const& x : out) {
            CHECK(std::fabs(x[0] - 1.0) <= 1e-10);
            CHECK(std::fabs(x[1]) <= 1e-10);
        }
    }
    SUBCASE("samples continue one pass") {
        double const times[] = {0.5, 1.5, 4.0};
        auto const out = sample_at(oscillator(), State{1.0, 0.0}, 0.0, times, cfg);
        for (int k = 0; k < 3; ++k) {
            CHECK(std::fabs(out[k][0] - std::cos(times[k])) <= 1e-12);
            CHECK(std::fabs(out[k][1] + std::sin(times[k])) <= 1e-12);
        }
    }
    SUBCASE("times must be ascending and not before t0") {
        double const bad_order[] = {2.0, 1.0};
        double const too_early[] = {-1.0};
        CHECK_THROWS_AS(sample_at(unit_speed(), State{0.0}, 0.0, bad_order, cfg), std::invalid_argument);
        CHECK_THROWS_AS(sample_at(unit_speed(), State{0.0}, 0.0, too_early, cfg), std::invalid_argument);
    }
}

TEST_CASE("observer can stop the run early") {
    IntegratorConfig cfg;
    auto const run = integrate_observed(unit_speed(), State{0.0}, 0.0, 10.0, cfg,
                                        [](double, std::span<const double> x) { return x[0] < 2.5; });
    CHECK(run.stopped_early);
    CHECK(run.state[0] >= 2.5);
    CHECK(run.t < 10.0);
}

TEST_CASE("error reporting") {
    IntegratorConfig cfg;
    SUBCASE("non-finite derivative") {
        VectorField const bad{1, [](double, std::span<const double>, std::span<double> dx) { dx[0] = NAN; }};
        try {
            (void)integrate_to(bad, State{1.0}, 0.0, 1.0, cfg);
            FAIL("expected an IntegrationError");
        } catch (IntegrationError const& e) {
            CHECK(e.kind() == IntegrationErrorKind::NonFiniteDerivative);
        }
    }
    SUBCASE("step budget") {
        cfg.max_steps = 5;
        try {
            (void)integrate_to(oscillator(), State{1.0, 0.0}, 0.0, 100.0, cfg);
            FAIL("expected an IntegrationError");
        } catch (IntegrationError const& e) {
            CHECK(e.kind() == IntegrationErrorKind::MaxStepsExceeded);
        }
    }
    SUBCASE("finite-time blow-up") {
        VectorField const blowup{1, [](double, std::span<const double> x, std::span<double> dx) { dx[0] = x[0] * x[0]; }};
        CHECK_THROWS_AS(integrate_to(blowup, State{1.0}, 0.0, 2.0, cfg), IntegrationError);
    }
    SUBCASE("bad arguments") {
        CHECK_THROWS_AS(integrate_to(oscillator(), State{1.0, 0.0}, 1.0, 0.0, cfg), std::invalid_argument);
        CHECK_THROWS_AS(integrate_to(oscillator(), State{NAN, 0.0}, 0.0, 1.0, cfg), std::invalid_argument);
        IntegratorConfig bad;
        bad.rel_tol = 0.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = {};
        bad.max_steps = 0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }
}

TEST_CASE("error kinds have names") {
    CHECK(std::string(to_string(IntegrationErrorKind::StepUnderflow)) == "StepUnderflow");
    CHECK(std::string(to_string(IntegrationErrorKind::NonFiniteDerivative)) == "NonFiniteDerivative");
    CHECK(std::string(to_string(IntegrationErrorKind::MaxStepsExceeded)) == "MaxStepsExceeded");
}
