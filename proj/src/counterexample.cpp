#include "distdelay/counterexample.hpp"

#include "distdelay/analysis.hpp"
#include "distdelay/error.hpp"

#include <algorithm>
#include <cmath>

namespace distdelay {

namespace {

constexpr double kMaxLogRatio = 1e6;
constexpr double kMinGap = 1e-6;

double checked_log_ratio(double num, double den, const char* what)
{
    if (!(den >= kMinGap) || !(num / den <= kMaxLogRatio)) {
        throw SpecViolation(std::string(what) + ": logarithm argument too large, the phase length diverges");
    }
    return std::log(num / den);
}

}  // namespace

Counterexample construct(const CounterexampleSpec& spec, std::size_t cycles)
{
    const auto& f = spec.f;
    if (!(spec.r > 0.0)) throw SpecViolation("counterexample needs r > 0");
    if (cycles == 0) throw SpecViolation("counterexample needs at least one cycle");
    if (!f.equilibrium()) throw SpecViolation("counterexample needs a positive equilibrium");

    CounterexamplePrediction p{};
    p.K = *f.equilibrium();
    p.x_max = *f.argmax_below_equilibrium();
    const auto [m, M] = attracting_interval(f);
    p.m = m;
    p.M = M;
    const double a = spec.a;
    const double b = spec.b;
    const double r = spec.r;
    if (!(m < a && a < p.x_max)) throw SpecViolation("need m < a < x_max");
    if (!(p.K < b && b < M)) throw SpecViolation("need K < b < M");

    // Largest grid point of (K, b] with f(x1) < a.
    const auto n = static_cast<std::size_t>(std::max(64.0, std::ceil(4096.0 * (b - p.K))));
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = b - (b - p.K) * static_cast<double>(i) / static_cast<double>(n);
        if (f(x) < a) {
            p.x1 = x;
            found = true;
            break;
        }
    }
    if (!found) throw SpecViolation("no x1 in (K, b] with f(x1) < a: min over [K, b] of f is not below a");
    p.m1 = f(p.x1);

    p.tau1 = checked_log_ratio(b - p.m1, a - p.m1, "tau1") / r;
    p.tau2 = p.tau1 + checked_log_ratio(M - a, M - b, "tau2") / r;
    p.s0 = (p.x1 - a) / (b - a) - 1.0;
    p.s1 = std::log((b - p.m1) / (p.x_max - p.m1)) / r;

    std::vector<double> switches;
    std::vector<double> samples;
    const double rise_to_x1 = std::log((M - a) / (M - p.x1)) / r;
    for (std::size_t c = 0; c < cycles; ++c) {
        const double start = p.tau2 * static_cast<double>(c);
        const double turn = start + p.tau1;
        switches.push_back(start);
        samples.push_back(c == 0 ? p.s0 : (start - p.tau2 + p.tau1) + rise_to_x1);
        switches.push_back(turn);
        samples.push_back(start + p.s1);
    }
    // Clamp against rounding so no sample lands after its phase start.
    for (std::size_t k = 0; k < switches.size(); ++k) samples[k] = std::min(samples[k], switches[k]);

    auto history = InitialHistory::linear_ramp(-1.0, a, b);
    auto schedule = std::make_shared<const DelaySchedule>(std::move(switches), std::move(samples));
    return Counterexample{spec, std::move(history), std::move(schedule), p, cycles};
}

double predicted_value(const Counterexample& ce, double t)
{
    const auto& p = ce.predicted;
    const double r = ce.spec.r;
    if (t <= 0.0) return ce.history.evaluate(t);
    const double cycle = std::floor(t / p.tau2);
    const double local = t - cycle * p.tau2;
    if (local <= p.tau1) return exact_linear_relaxation(r, p.m1, ce.spec.b, local);
    return exact_linear_relaxation(r, p.M, ce.spec.a, local - p.tau1);
}

ValidationReport validate(const Counterexample& ce, const IntegratorOptions& opts)
{
    const auto& p = ce.predicted;
    ModelInstance model{ce.spec.f, RateFunction::constant(ce.spec.r), DelayMeasure::frozen(ce.schedule)};
    const double horizon = p.tau2 * static_cast<double>(ce.cycles);
    auto traj = integrate(model, ce.history, horizon, opts);

    ValidationReport rep{INFINITY, -INFINITY, 0.0, 0.0, 0.0, traj};
    const auto times = traj.times();
    const auto values = traj.values();
    for (std::size_t i = 0; i < times.size(); ++i) {
        rep.inf_est = std::min(rep.inf_est, values[i]);
        rep.sup_est = std::max(rep.sup_est, values[i]);
        rep.max_abs_dev_from_prediction =
            std::max(rep.max_abs_dev_from_prediction, std::abs(values[i] - predicted_value(ce, times[i])));
    }
    const auto switches = ce.schedule->switch_times();
    const auto samples = ce.schedule->frozen_samples();
    for (std::size_t k = 0; k <= switches.size(); ++k) {
        const double tk = k < switches.size() ? switches[k] : horizon;
        const double target = k % 2 == 0 ? ce.spec.b : ce.spec.a;
        rep.max_switch_dev = std::max(rep.max_switch_dev, std::abs(traj(tk) - target));
    }
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double intended = k % 2 == 0 ? p.x1 : p.x_max;
        rep.max_sample_dev = std::max(rep.max_sample_dev, std::abs(traj(samples[k]) - intended));
    }
    return rep;
}

ValidationReport validate(const CounterexampleSpec& spec, std::size_t horizon_cycles, const IntegratorOptions& opts)
{
    return validate(construct(spec, horizon_cycles), opts);
}

}  // namespace distdelay
