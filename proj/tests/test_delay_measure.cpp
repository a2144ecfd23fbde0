#include "distdelay/delay_measure.hpp"
#include "distdelay/error.hpp"
#include "distdelay/quadrature.hpp"

#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <random>

using namespace distdelay;

namespace {

auto identity = [](double v) { return v; };
auto linear_history = [](double s) { return s; };

}  // namespace

TEST_CASE("gauss-legendre rule integrates degree 2n-1 exactly")
{
    const auto rule = gauss_legendre(4);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], 6);
    CHECK(sum == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
}

TEST_CASE("total mass")
{
    CHECK(total_mass(DelayMeasure::single_lag(1.0)) == doctest::Approx(1.0));
    CHECK(total_mass(DelayMeasure::kernel(KernelDensity::uniform(0.5, 1.5))) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(total_mass(DelayMeasure::mixture(0.3, {{1.0, 1.0}}, KernelDensity::uniform(0.5, 1.5))) ==
          doctest::Approx(1.0).epsilon(1e-14));
    const auto g = DelayMeasure::kernel(KernelDensity::truncated_gamma(2.0, 1.5));
    CHECK(total_mass(g) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("invalid measures are rejected")
{
    CHECK_THROWS_AS(DelayMeasure::atoms({{0.5, 1.0}}), ConfigError);
    CHECK_THROWS_AS(DelayMeasure::atoms({{1.0, -1.0}}), ConfigError);
    CHECK_THROWS_AS(DelayMeasure::atoms({}), ConfigError);
    CHECK_THROWS_AS(KernelDensity::uniform(2.0, 1.0), ConfigError);
    CHECK_THROWS_AS(KernelDensity::table({0.0, 1.0}, {-1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(DelayMeasure::mixture(1.5, {{1.0, 1.0}}, KernelDensity::uniform(0, 1)), ConfigError);
    CHECK_THROWS_AS(DelaySchedule({0.0, 1.0}, {0.0, 2.0}), ConfigError);
    CHECK_THROWS_AS(DelaySchedule({0.0, 0.0}, {0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(DelaySchedule({0.5}, {0.0}), ConfigError);
}

TEST_CASE("memory bound")
{
    CHECK(memory_bound(DelayMeasure::atoms({{0.5, 1.0}, {0.5, 3.0}}), 10.0) == 7.0);
    CHECK(memory_bound(DelayMeasure::kernel(KernelDensity::uniform(0.5, 1.5)), 2.0) == doctest::Approx(0.5));
    auto sched = std::make_shared<const DelaySchedule>(std::vector<double>{0.0, 2.0}, std::vector<double>{-0.4, 1.5});
    const auto frozen = DelayMeasure::frozen(sched);
    CHECK(memory_bound(frozen, 1.0) == -0.4);
    CHECK(memory_bound(frozen, 3.0) == 1.5);
}

TEST_CASE("frozen schedule sides at a switch")
{
    const DelaySchedule s({0.0, 2.0, 5.0}, {-1.0, 1.0, 4.0});
    CHECK(s.sample_at(2.0, Side::Left) == -1.0);
    CHECK(s.sample_at(2.0, Side::Right) == 1.0);
    CHECK(s.sample_at(3.0) == 1.0);
    CHECK(s.sample_at(100.0) == 4.0);
}

TEST_CASE("stieltjes apply")
{
    CHECK(stieltjes_apply(DelayMeasure::single_lag(2.0), 5.0, [](double) { return 1.3; }, identity) == 1.3);
    const auto kernel = DelayMeasure::kernel(KernelDensity::uniform(1.0, 2.0));
    CHECK(stieltjes_apply(kernel, 5.0, linear_history, identity) == doctest::Approx(3.5).epsilon(1e-14));
    const auto mix = DelayMeasure::mixture(0.5, {{1.0, 1.0}}, KernelDensity::uniform(1.0, 2.0));
    CHECK(stieltjes_apply(mix, 5.0, linear_history, identity) == doctest::Approx(3.75).epsilon(1e-14));
}

TEST_CASE("constant history gives g(c) for every variant")
{
    auto sched = std::make_shared<const DelaySchedule>(std::vector<double>{0.0}, std::vector<double>{-1.0});
    const auto g = [](double v) { return v * std::exp(-v); };
    for (const auto& m : {DelayMeasure::single_lag(1.0), DelayMeasure::kernel(KernelDensity::uniform(0.2, 3.0)),
                          DelayMeasure::mixture(0.4, {{0.5, 1.0}, {0.5, 2.0}}, KernelDensity::truncated_gamma(3.0, 2.0)),
                          DelayMeasure::frozen(sched)}) {
        CHECK(stieltjes_apply(m, 4.0, [](double) { return 0.7; }, g) == doctest::Approx(g(0.7)).epsilon(1e-13));
    }
}

TEST_CASE("linearity and monotonicity in g")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Atom> atoms;
        double total = 0.0;
        for (int k = 0; k < 5; ++k) {
            atoms.push_back({u(rng), 5.0 * u(rng)});
            total += atoms.back().weight;
        }
        for (auto& a : atoms) a.weight /= total;
        double s = 0.0;
        for (auto& a : atoms) s += a.weight;
        atoms.back().weight += 1.0 - s;
        const auto m = DelayMeasure::atoms(atoms);
        auto hist = [](double t) { return 1.0 + std::sin(t); };
        auto g1 = [](double v) { return v * v; };
        auto g2 = [](double v) { return std::exp(-v); };
        const double a = 2.5, b = -0.75;
        const double lhs = stieltjes_apply(m, 6.0, hist, [&](double v) { return a * g1(v) + b * g2(v); });
        const double rhs = a * stieltjes_apply(m, 6.0, hist, g1) + b * stieltjes_apply(m, 6.0, hist, g2);
        CHECK(std::abs(lhs - rhs) < 1e-12);
        CHECK(stieltjes_apply(m, 6.0, hist, g2) <= stieltjes_apply(m, 6.0, hist, [&](double v) { return g2(v) + 0.1; }));
    }
}

TEST_CASE("kernel quadrature converges under panel doubling")
{
    auto hist = [](double s) { return std::sin(0.7 * s) + 2.0; };
    auto g = [](double v) { return v * std::exp(-v); };
    for (const auto& make : {+[](const QuadratureOptions& q) { return KernelDensity::uniform(1.0, 4.0, q); },
                             +[](const QuadratureOptions& q) { return KernelDensity::truncated_gamma(2.0, 1.0, 1e-8, q); }}) {
        const auto coarse = DelayMeasure::kernel(make({8.0, 4, 1}));
        const auto fine = DelayMeasure::kernel(make({16.0, 4, 1}));
        CHECK(std::abs(stieltjes_apply(coarse, 30.0, hist, g) - stieltjes_apply(fine, 30.0, hist, g)) < 1e-8);
    }
}

TEST_CASE("truncated gamma support and density")
{
    const auto k = KernelDensity::truncated_gamma(2.0, 0.5);
    CHECK(k.lag_lo() == 0.0);
    // Tail beyond lag_hi holds 1e-8 of the mass.
    CHECK(boost::math::gamma_q(2.0, 0.5 * k.lag_hi()) == doctest::Approx(1e-8).epsilon(1e-6));
    CHECK(k.density(2.0) == doctest::Approx(0.25 * 2.0 * std::exp(-1.0) / (1.0 - 1e-8)).epsilon(1e-9));
    CHECK(k.density(-1.0) == 0.0);
}

TEST_CASE("table kernel")
{
    // Triangle on [0, 2] peaking at 1.
    const auto k = KernelDensity::table({0.0, 1.0, 2.0}, {0.0, 3.0, 0.0});
    CHECK(k.raw_mass() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(k.density(1.0) == doctest::Approx(1.0));
    const auto m = DelayMeasure::kernel(k);
    CHECK(stieltjes_apply(m, 10.0, linear_history, identity) == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("breakpoints and lags")
{
    auto sched = std::make_shared<const DelaySchedule>(std::vector<double>{0.0, 1.5, 4.0}, std::vector<double>{-1, 0, 1});
    const auto f = DelayMeasure::frozen(sched);
    CHECK(f.breakpoints() == std::vector<double>{1.5, 4.0});
    CHECK(f.is_frozen());
    CHECK_FALSE(f.min_positive_lag());
    const auto m = DelayMeasure::mixture(0.5, {{0.5, 0.0}, {0.5, 2.0}}, KernelDensity::uniform(3.0, 7.0));
    CHECK(m.max_lag() == doctest::Approx(7.0));
    CHECK(*m.min_positive_lag() == doctest::Approx(2.0));
}
