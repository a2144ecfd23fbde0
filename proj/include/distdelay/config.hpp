#pragma once

#include "distdelay/delay_measure.hpp"
#include "distdelay/integrator.hpp"
#include "distdelay/reproduction.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace distdelay {

// Experiment config schema. Every block maps onto one library type; see
// README.md for the documented JSON layout.

struct ModelBlock {
    std::string kind = "nicholson";  // nicholson | mackey_glass | table
    double p = 0.0;
    double delta = 0.0;
    double a = 0.0;
    double b = 0.0;
    double gamma = 0.0;
    // kind = table: piecewise-linear f through (x, f) with f(0) = 0.
    std::vector<double> x;
    std::vector<double> fx;
    double lipschitz = 0.0;
    double scale = 1.0;
    // r(t) override; defaults to delta (Nicholson), b (Mackey-Glass) or 1.
    std::vector<double> rate_times;
    std::vector<double> rate_values;
};

struct KernelBlock {
    std::string shape = "uniform";  // uniform | truncated_gamma | table
    double lo = 0.0;
    double hi = 0.0;
    double gamma_shape = 0.0;
    double gamma_rate = 0.0;
    double tail_mass = 1e-8;
    std::vector<double> lags;
    std::vector<double> density;
    double panels_per_unit = 8.0;
    std::size_t nodes_per_panel = 4;
};

struct DelayBlock {
    std::string variant = "atoms";  // atoms | kernel | mixture | frozen
    std::vector<Atom> atoms;
    std::optional<KernelBlock> kernel;
    double alpha = 1.0;
    std::vector<double> switch_times;
    std::vector<double> frozen_samples;
};

struct HistoryBlock {
    std::string type = "constant";  // constant | linear_ramp | table | random_constant
    double value = 0.0;
    double value_at_start = 0.0;
    double value_at_zero = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> times;
    std::vector<double> values;
    std::optional<double> domain_start;
};

struct RunBlock {
    double horizon = 0.0;  // 0: max(100 memory lengths, 500)
    double step = 0.0;     // 0: min(0.01, min_lag / 8)
    std::uint64_t seed = 0;
    double window_fraction = 0.25;
    double convergence_tol = 0.0;  // 0: 1e-4 max(1, K)
};

struct OutputBlock {
    std::string dir = ".";
    std::string trajectory = "trajectory.csv";
    std::string manifest = "manifest.json";
    std::string tail = "tail.json";
    std::string report = "report.json";
    std::string schedule = "schedule.json";
    std::string sweep = "sweep.csv";
    std::size_t stride = 1;
};

struct CounterexampleBlock {
    double r = 1.0;
    double a = 0.0;
    double b = 0.0;
    std::size_t cycles = 10;
};

// Axis name -> grid values. Axes are p, delta, a (nicholson) or a, b, gamma
// (mackey_glass); lists or {from, to, step} ranges in the file.
struct SweepBlock {
    std::string model = "nicholson";
    std::map<std::string, std::vector<double>> axes;
};

struct ExperimentConfig {
    ModelBlock model;
    std::optional<DelayBlock> delay;
    std::optional<HistoryBlock> history;
    RunBlock run;
    OutputBlock output;
    std::optional<CounterexampleBlock> counterexample;
    std::optional<SweepBlock> sweep;
};

// Throws ConfigError on malformed input.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

// FNV-1a over the canonical JSON dump.
std::string config_hash(const ExperimentConfig& cfg);

ReproductionFunction build_function(const ModelBlock& m);
RateFunction build_rate(const ModelBlock& m);
DelayMeasure build_measure(const DelayBlock& d);
ModelInstance build_model(const ExperimentConfig& cfg);
InitialHistory build_history(const HistoryBlock& h, const DelayMeasure& measure, std::uint64_t seed);
double resolve_horizon(const RunBlock& run, const DelayMeasure& measure);

}  // namespace distdelay
