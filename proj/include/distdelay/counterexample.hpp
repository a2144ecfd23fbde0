#pragma once

#include "distdelay/delay_measure.hpp"
#include "distdelay/integrator.hpp"
#include "distdelay/reproduction.hpp"

#include <cstddef>
#include <memory>

namespace distdelay {

// Request for a solution of x' = r [f(x(h(t))) - x] with
// liminf x = a and limsup x = b.
struct CounterexampleSpec {
    ReproductionFunction f;
    double r;
    double a;
    double b;
};

struct CounterexamplePrediction {
    double tau1;   // end of the first decreasing phase, x(tau1) = a
    double tau2;   // end of the first increasing phase, x(tau2) = b; cycle length
    double x1;     // frozen value during decreasing phases, f(x1) = m1 < a
    double m1;
    double s0;     // phi(s0) = x1
    double s1;     // offset into a decreasing phase where x = x_max
    double K;
    double x_max;  // greatest maximiser of f on [0, K]
    double m;      // attracting interval lower end
    double M;      // attracting interval upper end, f(x_max)
};

struct Counterexample {
    CounterexampleSpec spec;
    InitialHistory history;
    std::shared_ptr<const DelaySchedule> schedule;
    CounterexamplePrediction predicted;
    std::size_t cycles;
};

// Builds phi(t) = a + (t + 1)(b - a) on [-1, 0] and the alternating frozen
// schedule covering `cycles` full cycles. Throws SpecViolation when the
// request is outside m < a < x_max, K < b < M, min_{[K,b]} f < a, or a log
// ratio in tau1/tau2 exceeds 1e6.
Counterexample construct(const CounterexampleSpec& spec, std::size_t cycles = 10);

// Closed-form piecewise relaxation solution of the constructed problem, t >= 0.
double predicted_value(const Counterexample& ce, double t);

struct ValidationReport {
    double inf_est;
    double sup_est;
    double max_abs_dev_from_prediction;
    // Largest |x(tau_k) - target| over switch times (b at even k, a at odd k).
    double max_switch_dev;
    // Largest |x(s_k) - intended frozen value| over all phases.
    double max_sample_dev;
    Trajectory trajectory;
};

ValidationReport validate(const Counterexample& ce, const IntegratorOptions& opts = {});
ValidationReport validate(const CounterexampleSpec& spec, std::size_t horizon_cycles,
                          const IntegratorOptions& opts = {});

}  // namespace distdelay
