#include "distdelay/report_io.hpp"

#include <variant>

namespace distdelay {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

json atoms_json(const std::vector<Atom>& atoms)
{
    json out = json::array();
    for (const Atom& a : atoms) out.push_back({{"weight", a.weight}, {"lag", a.lag}});
    return out;
}

json kernel_json(const KernelDensity& k)
{
    json j = {{"lag_lo", k.lag_lo()}, {"lag_hi", k.lag_hi()}, {"nodes", k.nodes().size()}};
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, KernelDensity::Uniform>) {
                j["shape"] = "uniform";
            } else if constexpr (std::is_same_v<S, KernelDensity::TruncatedGamma>) {
                j["shape"] = "truncated_gamma";
                j["gamma_shape"] = s.shape;
                j["gamma_rate"] = s.rate;
                j["tail_mass"] = s.tail_mass;
            } else if constexpr (std::is_same_v<S, KernelDensity::Table>) {
                j["shape"] = "table";
            } else {
                j["shape"] = s.label;
            }
        },
        k.shape());
    return j;
}

}  // namespace

json to_json(const FunctionDescriptor& d)
{
    return {{"K", opt(d.K)}, {"L", d.L}, {"L_star", opt(d.L_star)}, {"x_max", opt(d.x_max)},
            {"M", opt(d.M)}, {"lipschitz_warning", d.lipschitz_warning}};
}

json to_json(const StabilityReport& rep)
{
    json j;
    j["model"] = rep.model;
    j["rate"] = rep.rate;
    j["regime"] = std::string(to_string(rep.regime));
    j["descriptor"] = to_json(rep.descriptor);
    j["K"] = opt(rep.descriptor.K);
    if (rep.attracting_interval) {
        j["attracting_interval"] = {{"m", rep.attracting_interval->first}, {"M", rep.attracting_interval->second}};
    } else {
        j["attracting_interval"] = nullptr;
    }
    j["coppel_pass"] = rep.coppel_pass;
    j["two_cycles"] = json::array();
    for (const auto& c : rep.two_cycles) j["two_cycles"].push_back({c.low, c.high});
    j["thresholds"] = rep.thresholds;
    j["hopf_taus"] = rep.hopf_taus;
    j["hopf_taus_linearized"] = rep.hopf_taus_linearized;
    j["flags"] = rep.flags;
    j["notes"] = rep.notes;
    return j;
}

json to_json(const TailStatistics& tail)
{
    return {{"inf_est", tail.inf_est}, {"sup_est", tail.sup_est}, {"converged", tail.converged},
            {"limit_est", opt(tail.limit_est)}};
}

json to_json(const StepStats& s)
{
    return {{"steps", s.steps}, {"rhs_evaluations", s.rhs_evaluations}, {"breakpoints_hit", s.breakpoints_hit},
            {"nominal_step", s.nominal_step}, {"min_value", s.min_value}, {"max_value", s.max_value}};
}

json to_json(const DelayMeasure& m)
{
    json j = std::visit(
        [](const auto& v) -> json {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, DelayMeasure::Atoms>) {
                return {{"variant", "atoms"}, {"atoms", atoms_json(v.atoms)}};
            } else if constexpr (std::is_same_v<V, DelayMeasure::Kernel>) {
                return {{"variant", "kernel"}, {"kernel", kernel_json(v.density)}};
            } else if constexpr (std::is_same_v<V, DelayMeasure::Mixture>) {
                return {{"variant", "mixture"}, {"alpha", v.alpha}, {"atoms", atoms_json(v.atoms)},
                        {"kernel", kernel_json(v.density)}};
            } else {
                const auto sw = v.schedule->switch_times();
                const auto sm = v.schedule->frozen_samples();
                return {{"variant", "frozen"},
                        {"switch_times", std::vector<double>(sw.begin(), sw.end())},
                        {"frozen_samples", std::vector<double>(sm.begin(), sm.end())}};
            }
        },
        m.variant());
    j["max_lag"] = m.max_lag();
    j["total_mass"] = m.total_mass();
    return j;
}

json to_json(const CounterexamplePrediction& p)
{
    return {{"tau1", p.tau1}, {"tau2", p.tau2}, {"x1", p.x1}, {"m1", p.m1}, {"s0", p.s0}, {"s1", p.s1},
            {"K", p.K}, {"x_max", p.x_max}, {"m", p.m}, {"M", p.M}};
}

json schedule_json(const Counterexample& ce)
{
    const auto sw = ce.schedule->switch_times();
    const auto sm = ce.schedule->frozen_samples();
    return {{"switch_times", std::vector<double>(sw.begin(), sw.end())},
            {"frozen_samples", std::vector<double>(sm.begin(), sm.end())},
            {"predicted", to_json(ce.predicted)},
            {"request", {{"r", ce.spec.r}, {"a", ce.spec.a}, {"b", ce.spec.b}, {"cycles", ce.cycles}}}};
}

json stamp(json j, const std::string& config_hash)
{
    j["version"] = kArtifactVersion;
    j["config_hash"] = config_hash;
    return j;
}

}  // namespace distdelay
