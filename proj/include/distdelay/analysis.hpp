#pragma once

#include "distdelay/reproduction.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace distdelay {

// Band [A, B] that every positive solution eventually stays in.
struct PermanenceBounds {
    double A;
    double B;
};

struct BoundSequence {
    enum class Stop { Tolerance, Monotone, Stalled, MaxIterations };

    std::vector<double> m_list;  // nondecreasing lower bounds
    std::vector<double> M_list;  // nonincreasing upper bounds
    bool converged_to_K = false;
    Stop stop = Stop::MaxIterations;
};

enum class Regime { Extinction, DelayIndependentGlobal, DelayDependent };
std::string_view to_string(Regime r);

struct CoppelResult {
    bool pass;
    std::vector<double> extra_f2_fixed_points;
};

struct ConditionCheck {
    bool holds;
    std::optional<double> witness_a;
};

struct SmallDelayThresholds {
    double tau_L;
    std::optional<double> tau_Lstar;
};

struct TwoCycle {
    double low;
    double high;
};

struct FunctionDescriptor {
    std::optional<double> K;
    double L = 0.0;
    std::optional<double> L_star;
    std::optional<double> x_max;
    std::optional<double> M;
    bool lipschitz_warning = false;
};

struct StabilityReport {
    std::string model;
    double rate = 1.0;
    Regime regime = Regime::Extinction;
    FunctionDescriptor descriptor;
    std::optional<std::pair<double, double>> attracting_interval;  // (m, M)
    bool coppel_pass = false;
    std::vector<TwoCycle> two_cycles;
    std::map<std::string, double> thresholds;
    // Closed-form Hopf delays for the Nicholson constant-delay equation.
    std::vector<double> hopf_taus;
    // Crossing delays from the linearisation x' = r(-u + f'(K) u(t - tau)).
    std::vector<double> hopf_taus_linearized;
    std::map<std::string, bool> flags;
    std::vector<std::string> notes;
};

FunctionDescriptor describe(const ReproductionFunction& f);

// x_0, f(x_0), ..., f^n(x_0).
std::vector<double> difference_orbit(const ReproductionFunction& f, double x0, std::size_t n);

// Sign-change scan of f(f(x)) - x on (1e-6 K, B + 1] with bisection refinement.
CoppelResult coppel_global_attractivity(const ReproductionFunction& f,
                                        std::size_t scan = std::size_t{1} << 16);

// Bounds from the observed range of a solution over its first memory length.
PermanenceBounds permanence_bounds(const ReproductionFunction& f, double observed_min, double observed_max);

BoundSequence bound_sequences(const ReproductionFunction& f,
                              const PermanenceBounds& start,
                              std::size_t max_iter = 2000,
                              double tol = 1e-6);

// (m, M) with M = max_{[0,K]} f and m = min_{[K,M]} f; (K, K) when M <= K.
std::pair<double, double> attracting_interval(const ReproductionFunction& f);

// For each a on a grid of (0, K): f(x_max([a,K])) > K implies
// min_{[K, f(x_max([a,K]))]} f > a. Reports the first failing a.
ConditionCheck check_attractivity_condition(const ReproductionFunction& f, std::size_t a_grid = 2048);

// 1/(r(L+1)) and 1/(r(L*+1)).
SmallDelayThresholds small_delay_threshold(const ReproductionFunction& f, double r);

// Nicholson Hopf delays tau_k, k = 0..k_max, from the closed form in
// a N* = ln(p/delta). Requires p > delta e^2.
std::vector<double> nicholson_hopf_delays(double p, double delta, double a);

// Delays at which x' = r(-u + s u(t - tau)), s = f'(K) < -1, has roots on the
// imaginary axis. Empty when |f'(K)| <= 1.
std::vector<double> linearized_hopf_delays(const ReproductionFunction& f, double r);

std::vector<TwoCycle> two_cycle_scan(const ReproductionFunction& f);

StabilityReport nicholson_report(double p, double delta, double a);
StabilityReport mackey_glass_report(double a, double b, double gamma);
// Regime from the equilibrium and the f^2 scan for any reproduction function.
StabilityReport generic_report(const ReproductionFunction& f, double r);

}  // namespace distdelay
