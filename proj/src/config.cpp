#include "distdelay/config.hpp"

#include "distdelay/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <random>
#include <set>

namespace distdelay {

using nlohmann::json;

namespace {

void only_keys(const json& j, const char* block, std::initializer_list<const char*> keys)
{
    if (!j.is_object()) throw ConfigError(std::string(block) + " block must be a JSON object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + block + " block");
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback)
{
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::vector<double> number_list(const json& j, const char* key)
{
    return get_or<std::vector<double>>(j, key, {});
}

std::vector<double> expand_range(const json& j, const std::string& axis)
{
    if (j.is_number()) return {j.get<double>()};
    if (j.is_array()) {
        try {
            return j.get<std::vector<double>>();
        } catch (const json::exception&) {
            throw ConfigError("sweep axis '" + axis + "' must be a list of numbers");
        }
    }
    only_keys(j, "sweep range", {"from", "to", "step"});
    const double from = get_or(j, "from", 0.0);
    const double to = get_or(j, "to", 0.0);
    const double step = get_or(j, "step", 0.0);
    if (!(step > 0.0) || to < from) return {};
    const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = from + step * static_cast<double>(i);
    return values;
}

ModelBlock parse_model(const json& j)
{
    only_keys(j, "model", {"kind", "p", "delta", "a", "b", "gamma", "x", "fx", "lipschitz", "scale",
                           "rate", "rate_times", "rate_values"});
    ModelBlock m;
    m.kind = get_or<std::string>(j, "kind", "");
    if (m.kind != "nicholson" && m.kind != "mackey_glass" && m.kind != "table") {
        throw ConfigError("model.kind must be nicholson, mackey_glass or table");
    }
    m.p = get_or(j, "p", 0.0);
    m.delta = get_or(j, "delta", 0.0);
    m.a = get_or(j, "a", 0.0);
    m.b = get_or(j, "b", 0.0);
    m.gamma = get_or(j, "gamma", 0.0);
    m.x = number_list(j, "x");
    m.fx = number_list(j, "fx");
    m.lipschitz = get_or(j, "lipschitz", 0.0);
    m.scale = get_or(j, "scale", 1.0);
    if (j.contains("rate")) {
        m.rate_times = {0.0};
        m.rate_values = {get_or(j, "rate", 0.0)};
    }
    if (j.contains("rate_times") || j.contains("rate_values")) {
        m.rate_times = number_list(j, "rate_times");
        m.rate_values = number_list(j, "rate_values");
    }
    return m;
}

KernelBlock parse_kernel(const json& j)
{
    only_keys(j, "kernel", {"shape", "lo", "hi", "gamma_shape", "gamma_rate", "tail_mass", "lags", "density",
                            "panels_per_unit", "nodes_per_panel"});
    KernelBlock k;
    k.shape = get_or<std::string>(j, "shape", "uniform");
    k.lo = get_or(j, "lo", 0.0);
    k.hi = get_or(j, "hi", 0.0);
    k.gamma_shape = get_or(j, "gamma_shape", 0.0);
    k.gamma_rate = get_or(j, "gamma_rate", 0.0);
    k.tail_mass = get_or(j, "tail_mass", 1e-8);
    k.lags = number_list(j, "lags");
    k.density = number_list(j, "density");
    k.panels_per_unit = get_or(j, "panels_per_unit", 8.0);
    k.nodes_per_panel = get_or<std::size_t>(j, "nodes_per_panel", 4);
    return k;
}

DelayBlock parse_delay(const json& j)
{
    only_keys(j, "delay", {"variant", "atoms", "kernel", "alpha", "switch_times", "frozen_samples"});
    DelayBlock d;
    d.variant = get_or<std::string>(j, "variant", "atoms");
    if (j.contains("atoms")) {
        for (const auto& pair : j.at("atoms")) {
            if (!pair.is_array() || pair.size() != 2) throw ConfigError("delay.atoms entries must be [weight, lag]");
            d.atoms.push_back({pair[0].get<double>(), pair[1].get<double>()});
        }
    }
    if (j.contains("kernel") && !j.at("kernel").is_null()) d.kernel = parse_kernel(j.at("kernel"));
    d.alpha = get_or(j, "alpha", 1.0);
    d.switch_times = number_list(j, "switch_times");
    d.frozen_samples = number_list(j, "frozen_samples");
    return d;
}

HistoryBlock parse_history(const json& j)
{
    only_keys(j, "history", {"type", "value", "value_at_start", "value_at_zero", "lo", "hi", "times", "values",
                             "domain_start"});
    HistoryBlock h;
    h.type = get_or<std::string>(j, "type", "constant");
    h.value = get_or(j, "value", 0.0);
    h.value_at_start = get_or(j, "value_at_start", 0.0);
    h.value_at_zero = get_or(j, "value_at_zero", 0.0);
    h.lo = get_or(j, "lo", 0.0);
    h.hi = get_or(j, "hi", 0.0);
    h.times = number_list(j, "times");
    h.values = number_list(j, "values");
    if (j.contains("domain_start") && !j.at("domain_start").is_null()) {
        h.domain_start = get_or(j, "domain_start", 0.0);
    }
    return h;
}

}  // namespace

ExperimentConfig parse_config(const json& j)
{
    only_keys(j, "top-level", {"model", "delay", "history", "run", "output", "counterexample", "sweep"});
    ExperimentConfig cfg;
    if (j.contains("model")) cfg.model = parse_model(j.at("model"));
    if (j.contains("delay") && !j.at("delay").is_null()) cfg.delay = parse_delay(j.at("delay"));
    if (j.contains("history") && !j.at("history").is_null()) cfg.history = parse_history(j.at("history"));
    if (j.contains("run")) {
        const auto& r = j.at("run");
        only_keys(r, "run", {"horizon", "step", "seed", "window_fraction", "convergence_tol"});
        cfg.run.horizon = get_or(r, "horizon", 0.0);
        cfg.run.step = get_or(r, "step", 0.0);
        cfg.run.seed = get_or<std::uint64_t>(r, "seed", 0);
        cfg.run.window_fraction = get_or(r, "window_fraction", 0.25);
        cfg.run.convergence_tol = get_or(r, "convergence_tol", 0.0);
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        only_keys(o, "output", {"dir", "trajectory", "manifest", "tail", "report", "schedule", "sweep", "stride"});
        OutputBlock d;
        cfg.output.dir = get_or(o, "dir", d.dir);
        cfg.output.trajectory = get_or(o, "trajectory", d.trajectory);
        cfg.output.manifest = get_or(o, "manifest", d.manifest);
        cfg.output.tail = get_or(o, "tail", d.tail);
        cfg.output.report = get_or(o, "report", d.report);
        cfg.output.schedule = get_or(o, "schedule", d.schedule);
        cfg.output.sweep = get_or(o, "sweep", d.sweep);
        cfg.output.stride = get_or<std::size_t>(o, "stride", 1);
    }
    if (j.contains("counterexample") && !j.at("counterexample").is_null()) {
        const auto& c = j.at("counterexample");
        only_keys(c, "counterexample", {"r", "a", "b", "cycles"});
        CounterexampleBlock ce;
        ce.r = get_or(c, "r", 1.0);
        ce.a = get_or(c, "a", 0.0);
        ce.b = get_or(c, "b", 0.0);
        ce.cycles = get_or<std::size_t>(c, "cycles", 10);
        cfg.counterexample = ce;
    }
    if (j.contains("sweep") && !j.at("sweep").is_null()) {
        const auto& s = j.at("sweep");
        if (!s.is_object()) throw ConfigError("sweep block must be a JSON object");
        SweepBlock sw;
        sw.model = get_or<std::string>(s, "model", "nicholson");
        for (const auto& [k, v] : s.items()) {
            if (k == "model") continue;
            sw.axes[k] = expand_range(v, k);
        }
        cfg.sweep = sw;
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& cfg)
{
    json j;
    const auto& m = cfg.model;
    j["model"] = {{"kind", m.kind}, {"p", m.p}, {"delta", m.delta}, {"a", m.a}, {"b", m.b}, {"gamma", m.gamma},
                  {"x", m.x}, {"fx", m.fx}, {"lipschitz", m.lipschitz}, {"scale", m.scale},
                  {"rate_times", m.rate_times}, {"rate_values", m.rate_values}};
    if (cfg.delay) {
        const auto& d = *cfg.delay;
        json atoms = json::array();
        for (const Atom& a : d.atoms) atoms.push_back({a.weight, a.lag});
        json jd = {{"variant", d.variant}, {"atoms", atoms}, {"alpha", d.alpha},
                   {"switch_times", d.switch_times}, {"frozen_samples", d.frozen_samples}};
        if (d.kernel) {
            const auto& k = *d.kernel;
            jd["kernel"] = {{"shape", k.shape}, {"lo", k.lo}, {"hi", k.hi}, {"gamma_shape", k.gamma_shape},
                            {"gamma_rate", k.gamma_rate}, {"tail_mass", k.tail_mass}, {"lags", k.lags},
                            {"density", k.density}, {"panels_per_unit", k.panels_per_unit},
                            {"nodes_per_panel", k.nodes_per_panel}};
        }
        j["delay"] = jd;
    }
    if (cfg.history) {
        const auto& h = *cfg.history;
        j["history"] = {{"type", h.type}, {"value", h.value}, {"value_at_start", h.value_at_start},
                        {"value_at_zero", h.value_at_zero}, {"lo", h.lo}, {"hi", h.hi},
                        {"times", h.times}, {"values", h.values}};
        if (h.domain_start) j["history"]["domain_start"] = *h.domain_start;
    }
    j["run"] = {{"horizon", cfg.run.horizon}, {"step", cfg.run.step}, {"seed", cfg.run.seed},
                {"window_fraction", cfg.run.window_fraction}, {"convergence_tol", cfg.run.convergence_tol}};
    const auto& o = cfg.output;
    j["output"] = {{"dir", o.dir}, {"trajectory", o.trajectory}, {"manifest", o.manifest}, {"tail", o.tail},
                   {"report", o.report}, {"schedule", o.schedule}, {"sweep", o.sweep}, {"stride", o.stride}};
    if (cfg.counterexample) {
        const auto& c = *cfg.counterexample;
        j["counterexample"] = {{"r", c.r}, {"a", c.a}, {"b", c.b}, {"cycles", c.cycles}};
    }
    if (cfg.sweep) {
        json s = {{"model", cfg.sweep->model}};
        for (const auto& [axis, values] : cfg.sweep->axes) s[axis] = values;
        j["sweep"] = s;
    }
    return j;
}

std::string config_hash(const ExperimentConfig& cfg)
{
    const std::string text = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

ReproductionFunction make_function(const ModelBlock& m)
{
    if (m.kind == "nicholson") return ReproductionFunction::nicholson(m.p, m.delta, m.a);
    if (m.kind == "mackey_glass") return ReproductionFunction::mackey_glass(m.a, m.b, m.gamma);
    if (m.kind == "table") {
        if (m.x.size() < 2 || m.x.size() != m.fx.size()) {
            throw ConfigError("table model needs matching x and fx lists with at least two points");
        }
        for (std::size_t i = 1; i < m.x.size(); ++i) {
            if (!(m.x[i] > m.x[i - 1])) throw ConfigError("table model x must be strictly increasing");
        }
        if (m.x.front() != 0.0 || m.fx.front() != 0.0) throw ConfigError("table model must start at f(0) = 0");
        auto interp = [xs = m.x, fs = m.fx](double x) {
            const auto it = std::upper_bound(xs.begin(), xs.end(), x);
            if (it == xs.end()) return fs.back();
            const auto i = static_cast<std::size_t>(it - xs.begin());
            const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return (1.0 - w) * fs[i - 1] + w * fs[i];
        };
        return ReproductionFunction::custom(interp, m.lipschitz, "table", m.scale);
    }
    throw ConfigError("unknown model kind '" + m.kind + "'");
}

}  // namespace

ReproductionFunction build_function(const ModelBlock& m)
{
    try {
        return make_function(m);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("model: ") + e.what());
    } catch (const AmbiguityError& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

RateFunction build_rate(const ModelBlock& m)
{
    if (!m.rate_values.empty() || !m.rate_times.empty()) {
        return RateFunction::piecewise(m.rate_times, m.rate_values);
    }
    if (m.kind == "nicholson") return RateFunction::constant(m.delta);
    if (m.kind == "mackey_glass") return RateFunction::constant(m.b);
    return RateFunction::constant(1.0);
}

DelayMeasure build_measure(const DelayBlock& d)
{
    auto kernel = [&]() {
        if (!d.kernel) throw ConfigError("delay variant '" + d.variant + "' needs a kernel block");
        const auto& k = *d.kernel;
        const QuadratureOptions q{k.panels_per_unit, k.nodes_per_panel, 1};
        if (k.shape == "uniform") return KernelDensity::uniform(k.lo, k.hi, q);
        if (k.shape == "truncated_gamma") return KernelDensity::truncated_gamma(k.gamma_shape, k.gamma_rate, k.tail_mass, q);
        if (k.shape == "table") return KernelDensity::table(k.lags, k.density, q);
        throw ConfigError("unknown kernel shape '" + k.shape + "'");
    };
    if (d.variant == "atoms") return DelayMeasure::atoms(d.atoms);
    if (d.variant == "kernel") return DelayMeasure::kernel(kernel());
    if (d.variant == "mixture") return DelayMeasure::mixture(d.alpha, d.atoms, kernel());
    if (d.variant == "frozen") {
        return DelayMeasure::frozen(std::make_shared<const DelaySchedule>(d.switch_times, d.frozen_samples));
    }
    throw ConfigError("unknown delay variant '" + d.variant + "'");
}

ModelInstance build_model(const ExperimentConfig& cfg)
{
    if (!cfg.delay) throw ConfigError("config has no delay block");
    return ModelInstance{build_function(cfg.model), build_rate(cfg.model), build_measure(*cfg.delay)};
}

InitialHistory build_history(const HistoryBlock& h, const DelayMeasure& measure, std::uint64_t seed)
{
    double start = -measure.max_lag();
    if (const auto* s = measure.schedule()) {
        const auto samples = s->frozen_samples();
        start = std::min(0.0, *std::min_element(samples.begin(), samples.end()));
    }
    start = h.domain_start.value_or(start);
    if (h.type == "constant") return InitialHistory::constant(h.value, start);
    if (h.type == "linear_ramp") return InitialHistory::linear_ramp(start, h.value_at_start, h.value_at_zero);
    if (h.type == "table") return InitialHistory::table(h.times, h.values);
    if (h.type == "random_constant") {
        if (!(h.lo > 0.0) || !(h.hi >= h.lo)) throw ConfigError("random_constant history needs 0 < lo <= hi");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(h.lo, h.hi);
        return InitialHistory::constant(dist(rng), start);
    }
    throw ConfigError("unknown history type '" + h.type + "'");
}

double resolve_horizon(const RunBlock& run, const DelayMeasure& measure)
{
    if (run.horizon > 0.0) return run.horizon;
    return std::max(100.0 * measure.max_lag(), 500.0);
}

}  // namespace distdelay
