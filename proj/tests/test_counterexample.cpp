#include "distdelay/analysis.hpp"
#include "distdelay/counterexample.hpp"
#include "distdelay/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace distdelay;

namespace {

const auto f3 = ReproductionFunction::nicholson(std::exp(3.0), 1, 1);

}  // namespace

TEST_CASE("construction matches the closed form")
{
    const auto ce = construct({f3, 1.0, 0.5, 6.0});
    const auto& p = ce.predicted;
    CHECK(p.x1 == 6.0);
    CHECK(p.m1 == doctest::Approx(6.0 * std::exp(-3.0)).epsilon(1e-12));
    CHECK(p.tau1 == doctest::Approx(3.344).epsilon(1e-3));
    CHECK(p.tau2 == doctest::Approx(4.945).epsilon(1e-3));
    CHECK(p.M == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
    CHECK(p.s0 == doctest::Approx(0.0));
    // s1 lands on x_max inside the first decreasing phase.
    CHECK(p.s1 > 0.0);
    CHECK(p.s1 < p.tau1);
    CHECK(exact_linear_relaxation(1.0, p.m1, 6.0, p.s1) == doctest::Approx(p.x_max).epsilon(1e-12));
    CHECK(ce.history(-1.0) == 0.5);
    CHECK(ce.history(0.0) == 6.0);
    CHECK(ce.schedule->phase_count() == 20);
}

TEST_CASE("schedule samples never lie after their phase start")
{
    const auto ce = construct({f3, 2.0, 0.4, 6.5}, 6);
    const auto t = ce.schedule->switch_times();
    const auto s = ce.schedule->frozen_samples();
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(s[k] <= t[k]);
}

TEST_CASE("validation over ten cycles")
{
    const auto rep = validate({f3, 1.0, 0.5, 6.0}, 10);
    CHECK(std::abs(rep.inf_est - 0.5) < 1e-3);
    CHECK(std::abs(rep.sup_est - 6.0) < 1e-3);
    CHECK(rep.max_abs_dev_from_prediction < 1e-6);
    CHECK(rep.max_switch_dev < 1e-6);
    CHECK(rep.max_sample_dev < 1e-6);
}

TEST_CASE("one cycle hits a at tau1")
{
    const auto ce = construct({f3, 1.0, 0.5, 6.0}, 1);
    const auto rep = validate(ce);
    CHECK(rep.trajectory(ce.predicted.tau1) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("monotone alternation between switches")
{
    const auto ce = construct({f3, 1.0, 0.5, 6.0}, 3);
    const auto rep = validate(ce);
    const auto sw = ce.schedule->switch_times();
    for (std::size_t k = 0; k < sw.size(); ++k) {
        const double lo = sw[k];
        const double hi = k + 1 < sw.size() ? sw[k + 1] : 3 * ce.predicted.tau2;
        double prev = rep.trajectory(lo + 1e-6);
        for (int i = 1; i < 50; ++i) {
            const double x = rep.trajectory(lo + (hi - lo) * i / 50.0);
            if (k % 2 == 0) CHECK(x < prev);
            else CHECK(x > prev);
            prev = x;
        }
    }
}

TEST_CASE("interval shifted inside the two-cycle oscillates")
{
    const auto f = ReproductionFunction::nicholson(10, 1, 1);
    const auto cyc = two_cycle_scan(f);
    REQUIRE(cyc.size() == 1);
    const double eps = 0.01;
    const auto rep = validate({f, 1.0, cyc[0].low + eps, cyc[0].high - eps}, 4);
    CHECK(std::abs(rep.inf_est - (cyc[0].low + eps)) < 1e-3);
    CHECK(std::abs(rep.sup_est - (cyc[0].high - eps)) < 1e-3);
}

TEST_CASE("near the attracting-interval ends")
{
    const auto [m, M] = attracting_interval(f3);
    const auto x_max = *f3.argmax_below_equilibrium();
    // a just above m requires x1 with f(x1) < a close to b = M - eps.
    const auto ce = construct({f3, 1.0, m + 0.05, M - 0.05}, 2);
    CHECK(ce.predicted.tau2 > ce.predicted.tau1);
    CHECK(x_max > m + 0.05);
}

TEST_CASE("rejected requests")
{
    // a at or below m1: the logarithm diverges.
    const double m1 = 6.0 * std::exp(-3.0);
    CHECK_THROWS_AS(construct({f3, 1.0, m1 + 1e-9, 6.0}), SpecViolation);
    // b at M.
    CHECK_THROWS_AS(construct({f3, 1.0, 0.5, std::exp(2.0)}), SpecViolation);
    CHECK_THROWS_AS(construct({f3, 1.0, 0.5, std::exp(2.0) - 1e-9}), SpecViolation);
    // a above x_max.
    CHECK_THROWS_AS(construct({f3, 1.0, 1.5, 6.0}), SpecViolation);
    // b below K.
    CHECK_THROWS_AS(construct({f3, 1.0, 0.5, 2.0}), SpecViolation);
    // No x1 with f(x1) < a on (K, b].
    CHECK_THROWS_AS(construct({f3, 1.0, 0.5, 3.5}), SpecViolation);
    CHECK_THROWS_AS(construct({ReproductionFunction::nicholson(5, 1, 1), 1.0, 0.5, 1.7}), SpecViolation);
    CHECK_THROWS_AS(construct({f3, 0.0, 0.5, 6.0}), SpecViolation);
}
