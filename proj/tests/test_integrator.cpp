#include "distdelay/error.hpp"
#include "distdelay/integrator.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace distdelay;

namespace {

ModelInstance nicholson_model(double p, double lag)
{
    return {ReproductionFunction::nicholson(p, 1, 1), RateFunction::constant(1.0), DelayMeasure::single_lag(lag)};
}

std::shared_ptr<const DelaySchedule> schedule(std::vector<double> t, std::vector<double> s)
{
    return std::make_shared<const DelaySchedule>(std::move(t), std::move(s));
}

}  // namespace

TEST_CASE("equilibrium is preserved")
{
    const double K = std::log(5.0);
    const auto traj = integrate(nicholson_model(5, 1), InitialHistory::constant(K, -1), 50.0);
    double dev = 0.0;
    for (double x : traj.values()) dev = std::max(dev, std::abs(x - K));
    const double budget = 10.0 * std::numeric_limits<double>::epsilon() * K * traj.stats().steps;
    CHECK(dev < budget);
}

TEST_CASE("frozen sample replica with known solution")
{
    const ModelInstance model{ReproductionFunction::nicholson(5, 1, 1), RateFunction::constant(1.0),
                              DelayMeasure::frozen(schedule({0.0}, {-1.0}))};
    const auto traj = integrate(model, InitialHistory::linear_ramp(-1, 0, 1), 10.0, {0.01});
    for (double t = 0.0; t <= 10.0; t += 0.25) CHECK(std::abs(traj(t) - std::exp(-t)) < 1e-9);
}

TEST_CASE("frozen sample at the origin relaxes to a shifted limit")
{
    const double p = std::numbers::e / 2;
    const ModelInstance model{ReproductionFunction::nicholson(p, 1, 1), RateFunction::constant(1.0),
                              DelayMeasure::frozen(schedule({0.0}, {0.0}))};
    const auto traj = integrate(model, InitialHistory::constant(2.0, 0.0), 30.0);
    const double c = 1.0 / std::numbers::e;
    for (double t : {0.5, 3.0, 12.0, 30.0}) {
        CHECK(traj(t) == doctest::Approx(c + (2.0 - c) * std::exp(-t)).epsilon(1e-9));
    }
}

TEST_CASE("fourth order under step halving")
{
    const ModelInstance model{ReproductionFunction::nicholson(5, 1, 1), RateFunction::constant(1.0),
                              DelayMeasure::frozen(schedule({0.0}, {-1.0}))};
    double prev = 0.0;
    for (double h : {0.08, 0.04, 0.02}) {
        const auto traj = integrate(model, InitialHistory::linear_ramp(-1, 0, 1), 4.0, {h});
        const double err = std::abs(traj(4.0) - std::exp(-4.0));
        if (prev > 0.0) CHECK(std::log2(prev / err) > 3.8);
        prev = err;
    }
}

TEST_CASE("dense output is continuous and matches knots")
{
    const auto traj = integrate(nicholson_model(10, 1), InitialHistory::constant(0.5, -1), 20.0);
    const auto t = traj.times();
    const auto x = traj.values();
    for (std::size_t i = 1; i + 1 < t.size(); i += 97) {
        CHECK(traj(t[i]) == doctest::Approx(x[i]).epsilon(1e-14));
        const double eps = 1e-9;
        CHECK(std::abs(traj(t[i] - eps) - traj(t[i] + eps)) < 1e-7);
    }
}

TEST_CASE("positivity from a history touching zero")
{
    std::vector<double> times = {-5, -3, -1, 0};
    std::vector<double> values = {0, 4, 0, 0.01};
    const auto traj = integrate(nicholson_model(10, 5), InitialHistory::table(times, values), 200.0);
    for (double x : traj.values()) CHECK(x > 0.0);
}

TEST_CASE("deterministic")
{
    const ModelInstance model{ReproductionFunction::mackey_glass(2, 1, 10), RateFunction::constant(1.0),
                              DelayMeasure::kernel(KernelDensity::uniform(0.5, 2.0))};
    const auto a = integrate(model, InitialHistory::constant(0.4, -2), 60.0);
    const auto b = integrate(model, InitialHistory::constant(0.4, -2), 60.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.values()[i] == b.values()[i]);
}

TEST_CASE("step guard")
{
    try {
        integrate(nicholson_model(5, 0.1), InitialHistory::constant(1, -0.1), 1.0, {0.05});
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("step guard") != std::string::npos);
    }
}

TEST_CASE("history gap")
{
    CHECK_THROWS_AS(integrate(nicholson_model(5, 2), InitialHistory::constant(1, -1), 10.0), HistoryGapError);
    const auto traj = integrate(nicholson_model(5, 1), InitialHistory::constant(1, -1), 5.0);
    CHECK_THROWS_AS(traj(-1.5), HistoryGapError);
    CHECK_THROWS_AS(traj(5.5), HistoryGapError);
    CHECK(traj(-0.5) == 1.0);
    try {
        traj(9.0);
    } catch (const HistoryGapError& e) {
        CHECK(std::string(e.what()).find("9") != std::string::npos);
    }
}

TEST_CASE("history validation")
{
    CHECK_THROWS_AS(InitialHistory::constant(0.0, -1), ConfigError);
    CHECK_THROWS_AS(InitialHistory::linear_ramp(-1, -0.5, 1.0), ConfigError);
    CHECK_THROWS_AS(InitialHistory::table({-1, -0.5}, {1, 1}), ConfigError);
    const auto h = InitialHistory::from_function([](double t) { return 1.0 + t * t; }, -2.0, "bowl");
    CHECK(h(-2.0) == 5.0);
    CHECK_THROWS_AS(h(-2.5), HistoryGapError);
}

TEST_CASE("divergence is reported with the last valid time")
{
    // An absurd rate overflows the state within a few steps.
    const ModelInstance model{ReproductionFunction::nicholson(5, 1, 1), RateFunction::constant(1e300),
                              DelayMeasure::single_lag(1.0)};
    try {
        integrate(model, InitialHistory::constant(3.0, -1), 5.0);
        FAIL("expected a DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.last_valid_time() >= 0.0);
    }
}

TEST_CASE("piecewise rate")
{
    const auto r = RateFunction::piecewise({0.0, 2.0}, {1.0, 3.0});
    CHECK(r(1.0) == 1.0);
    CHECK(r(2.0, Side::Left) == 1.0);
    CHECK(r(2.0, Side::Right) == 3.0);
    CHECK(r.sup() == 3.0);
    CHECK_THROWS_AS(RateFunction::piecewise({1.0}, {1.0}), ConfigError);
    CHECK_THROWS_AS(RateFunction::constant(-1.0), ConfigError);

    // Frozen forcing 0 with rate switch: x = e^{-t} then e^{-2 - 3(t - 2)}.
    const ModelInstance model{ReproductionFunction::nicholson(5, 1, 1), r, DelayMeasure::frozen(schedule({0.0}, {-1.0}))};
    const auto traj = integrate(model, InitialHistory::linear_ramp(-1, 0, 1), 4.0, {0.01});
    CHECK(traj(2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
    CHECK(traj(4.0) == doctest::Approx(std::exp(-8.0)).epsilon(1e-8));
}

TEST_CASE("exact linear relaxation")
{
    CHECK(exact_linear_relaxation(1, 0, 1, 1) == doctest::Approx(std::exp(-1.0)));
    const double m = 0.3, a = 0.5, b = 6.0;
    CHECK(exact_linear_relaxation(1, m, b, std::log((b - m) / (a - m))) == doctest::Approx(a).epsilon(1e-14));
    CHECK(exact_linear_relaxation(2, 5, 5, 17.0) == 5.0);
}

TEST_CASE("tail statistics")
{
    const double K = std::log(5.0);
    const auto flat = integrate(nicholson_model(5, 1), InitialHistory::constant(K, -1), 40.0);
    const auto s = tail_statistics(flat, 0.25, 1e-4, 1.0);
    CHECK(s.converged);
    CHECK(*s.limit_est == doctest::Approx(K));

    const auto run = integrate(nicholson_model(5, 10), InitialHistory::constant(0.3, -10), 400.0);
    const auto t = tail_statistics(run, 0.25, 1e-4, 10.0);
    CHECK(t.converged);
    CHECK(std::abs(*t.limit_est - K) < 1e-3);

    CHECK_THROWS_AS(tail_statistics(run, 0.25, 1e-4, 20.0), DomainError);
    CHECK_THROWS_AS(tail_statistics(run, 0.0), DomainError);
}

TEST_CASE("trajectory csv")
{
    const auto traj = integrate(nicholson_model(5, 1), InitialHistory::constant(1, -1), 1.0, {0.1});
    std::ostringstream os;
    write_trajectory_csv(os, traj, 3);
    const std::string text = os.str();
    CHECK(text.rfind("t,x\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines == 1 + 4 + 1);  // header, knots 0,3,6,9, final knot 10
}
