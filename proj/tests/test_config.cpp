#include "distdelay/config.hpp"
#include "distdelay/error.hpp"
#include "distdelay/report_io.hpp"
#include "distdelay/sweep.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace distdelay;
using nlohmann::json;

namespace {

json sample()
{
    return json::parse(R"({
        "model": {"kind": "nicholson", "p": 5, "delta": 1, "a": 1},
        "delay": {"variant": "mixture", "alpha": 0.5, "atoms": [[1.0, 1.0]],
                  "kernel": {"shape": "uniform", "lo": 5, "hi": 15}},
        "history": {"type": "random_constant", "lo": 0.2, "hi": 4.0},
        "run": {"horizon": 50, "seed": 42},
        "output": {"dir": "out", "stride": 10}
    })");
}

}  // namespace

TEST_CASE("round trip")
{
    const auto cfg = parse_config(sample());
    const auto again = parse_config(to_json(cfg));
    CHECK(to_json(again) == to_json(cfg));
    CHECK(config_hash(again) == config_hash(cfg));
    CHECK(config_hash(cfg).size() == 16);

    auto changed = sample();
    changed["run"]["seed"] = 43;
    CHECK(config_hash(parse_config(changed)) != config_hash(cfg));
}

TEST_CASE("unknown keys and bad values are config errors")
{
    auto j = sample();
    j["model"]["q"] = 1;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = sample();
    j["extra"] = 1;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = sample();
    j["model"]["kind"] = "ricker";
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = sample();
    j["run"]["horizon"] = "long";
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = sample();
    j["model"]["p"] = -5;
    CHECK_THROWS_AS(build_function(parse_config(j).model), ConfigError);
}

TEST_CASE("builders")
{
    const auto cfg = parse_config(sample());
    const auto model = build_model(cfg);
    CHECK(model.measure.max_lag() == doctest::Approx(15.0));
    CHECK(model.r(0.0) == 1.0);
    CHECK(*model.f.equilibrium() == doctest::Approx(std::log(5.0)));

    const auto h1 = build_history(*cfg.history, model.measure, cfg.run.seed);
    const auto h2 = build_history(*cfg.history, model.measure, cfg.run.seed);
    CHECK(h1.value_at_zero() == h2.value_at_zero());
    CHECK(h1.value_at_zero() >= 0.2);
    CHECK(h1.value_at_zero() <= 4.0);
    CHECK(h1.domain_start() == doctest::Approx(-15.0));
    CHECK(build_history(*cfg.history, model.measure, 7).value_at_zero() != h1.value_at_zero());

    CHECK(resolve_horizon(cfg.run, model.measure) == 50.0);
    CHECK(resolve_horizon(RunBlock{}, model.measure) == doctest::Approx(1500.0));
    CHECK(resolve_horizon(RunBlock{}, DelayMeasure::single_lag(1.0)) == 500.0);
}

TEST_CASE("default rates follow the model")
{
    ModelBlock mg;
    mg.kind = "mackey_glass";
    mg.a = 2;
    mg.b = 0.5;
    mg.gamma = 3;
    CHECK(build_rate(mg)(1.0) == 0.5);
    mg.rate_times = {0.0, 3.0};
    mg.rate_values = {1.0, 2.0};
    CHECK(build_rate(mg)(4.0) == 2.0);
}

TEST_CASE("table model")
{
    const auto j = json::parse(R"({"model": {"kind": "table", "x": [0, 1, 2, 6], "fx": [0, 2, 1.5, 0.5],
                                             "lipschitz": 2, "scale": 2}})");
    const auto f = build_function(parse_config(j).model);
    CHECK(f(0.5) == doctest::Approx(1.0));
    REQUIRE(f.equilibrium());
    CHECK(*f.equilibrium() == doctest::Approx(5.0 / 3.0).epsilon(1e-6));

    auto bad = j;
    bad["model"]["fx"][0] = 1;
    CHECK_THROWS_AS(build_function(parse_config(bad).model), ConfigError);
}

TEST_CASE("frozen schedule from config")
{
    const auto j = json::parse(R"({"model": {"kind": "nicholson", "p": 5, "delta": 1, "a": 1},
        "delay": {"variant": "frozen", "switch_times": [0], "frozen_samples": [-1]},
        "history": {"type": "linear_ramp", "value_at_start": 0, "value_at_zero": 1}})");
    const auto cfg = parse_config(j);
    const auto model = build_model(cfg);
    const auto h = build_history(*cfg.history, model.measure, 0);
    CHECK(h.domain_start() == -1.0);
    CHECK(h(-0.5) == doctest::Approx(0.5));
}

TEST_CASE("sweep ranges")
{
    const auto j = json::parse(R"({"sweep": {"model": "nicholson", "p": {"from": 8, "to": 20, "step": 1},
                                             "delta": [1, 2]}})");
    const auto cfg = parse_config(j);
    const auto pts = sweep_points(*cfg.sweep);
    CHECK(pts.size() == 26);
    CHECK(pts.front().at("a") == 1.0);

    auto empty = json::parse(R"({"sweep": {"model": "nicholson", "p": {"from": 8, "to": 2, "step": 1}}})");
    CHECK_THROWS_AS(sweep_points(*parse_config(empty).sweep), ConfigError);
    auto unknown = json::parse(R"({"sweep": {"model": "nicholson", "gamma": [1]}})");
    CHECK_THROWS_AS(sweep_points(*parse_config(unknown).sweep), ConfigError);
}

TEST_CASE("sweep output is independent of the thread count")
{
    SweepBlock s;
    s.model = "nicholson";
    for (int i = 0; i <= 12; ++i) s.axes["p"].push_back(8.0 + i);
    const auto pts = sweep_points(s);
    std::ostringstream a, b;
    write_sweep_csv(a, "nicholson", pts, run_sweep("nicholson", pts, 1));
    write_sweep_csv(b, "nicholson", pts, run_sweep("nicholson", pts, 4));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("p,delta,a,regime,K,m,M,tau_57,tau_58,tau_GL,tau0\n", 0) == 0);

    // A single-point grid reproduces the analysis report.
    const auto rep = point_report("nicholson", pts.front());
    const auto direct = nicholson_report(8, 1, 1);
    CHECK(to_json(rep) == to_json(direct));
}

TEST_CASE("report json")
{
    const auto j = stamp(to_json(mackey_glass_report(2, 1, 10)), "abc");
    CHECK(j["regime"] == "delay_dependent");
    CHECK(j["flags"]["mg_threshold_discrepancy"] == true);
    CHECK(j["version"] == kArtifactVersion);
    CHECK(j["config_hash"] == "abc");
    CHECK(j["thresholds"]["tau_mg_lstar"].get<double>() == doctest::Approx(40.0 / 202.0));
}
