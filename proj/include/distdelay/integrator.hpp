#pragma once

#include "distdelay/delay_measure.hpp"
#include "distdelay/reproduction.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace distdelay {

// Initial function phi on [domain_start, 0]; nonnegative with phi(0) > 0.
class InitialHistory {
public:
    struct Constant {
        double value;
    };
    // Linear from value_at_start at domain_start to value_at_zero at 0.
    struct Ramp {
        double value_at_start;
        double value_at_zero;
    };
    // Piecewise-linear through (times[i], values[i]); times end at 0.
    struct Table {
        std::vector<double> times;
        std::vector<double> values;
    };
    struct Function {
        std::string label;
    };
    using Shape = std::variant<Constant, Ramp, Table, Function>;

    static InitialHistory constant(double value, double domain_start);
    static InitialHistory linear_ramp(double domain_start, double value_at_start, double value_at_zero);
    static InitialHistory table(std::vector<double> times, std::vector<double> values);
    static InitialHistory from_function(std::function<double(double)> phi, double domain_start,
                                        std::string label);

    double domain_start() const noexcept { return domain_start_; }
    double value_at_zero() const noexcept { return value_at_zero_; }
    const Shape& shape() const noexcept { return shape_; }
    // Throws HistoryGapError outside [domain_start, 0].
    double operator()(double t) const;
    // Unchecked.
    double evaluate(double t) const { return eval_(t); }

private:
    InitialHistory(Shape shape, std::function<double(double)> eval, double domain_start);

    Shape shape_;
    std::function<double(double)> eval_;
    double domain_start_;
    double value_at_zero_;
};

// Piecewise-constant r(t): values[k] on [times[k], times[k+1]).
class RateFunction {
public:
    static RateFunction constant(double r);
    static RateFunction piecewise(std::vector<double> times, std::vector<double> values);

    double operator()(double t, Side side = Side::Left) const;
    bool is_constant() const noexcept { return values_.size() == 1; }
    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> values() const noexcept { return values_; }
    double sup() const;

private:
    RateFunction(std::vector<double> times, std::vector<double> values);

    std::vector<double> times_;
    std::vector<double> values_;
};

// x'(t) = r(t) [ int f(x(s)) d_s R(t, s) - x(t) ].
struct ModelInstance {
    ReproductionFunction f;
    RateFunction r;
    DelayMeasure measure;
};

struct IntegratorOptions {
    // Nominal step; 0 selects min(0.01, min_lag / 8).
    double step = 0.0;
};

struct StepStats {
    std::size_t steps = 0;
    std::size_t rhs_evaluations = 0;
    std::size_t breakpoints_hit = 0;
    double nominal_step = 0.0;
    double min_value = 0.0;
    double max_value = 0.0;
};

// Dense output of a run: cubic Hermite segments between knots, delegating
// to the initial history for t <= 0. Each knot carries the left and right
// limits of x' so derivative jumps at schedule switches stay exact.
class Trajectory {
public:
    const InitialHistory& history() const noexcept { return history_; }
    std::span<const double> times() const noexcept { return t_; }
    std::span<const double> values() const noexcept { return x_; }
    std::size_t size() const noexcept { return t_.size(); }
    double t_min() const noexcept { return history_.domain_start(); }
    double t_max() const noexcept { return t_.back(); }
    const StepStats& stats() const noexcept { return stats_; }

    // Throws HistoryGapError outside [t_min, t_max].
    double operator()(double t) const;

    double slope_left(std::size_t knot) const { return dl_[knot]; }
    double slope_right(std::size_t knot) const { return dr_[knot]; }

private:
    friend Trajectory integrate(const ModelInstance&, const InitialHistory&, double, const IntegratorOptions&);

    explicit Trajectory(InitialHistory history);

    std::size_t locate(double t) const;
    double segment_value(std::size_t i, double t) const;
    // Like operator() but extrapolates the last segment past t_max.
    double running_value(double t) const;

    InitialHistory history_;
    std::vector<double> t_;
    std::vector<double> x_;
    std::vector<double> dl_;
    std::vector<double> dr_;
    StepStats stats_;
};

// Method of steps with classical RK4 and cubic Hermite dense output.
// Throws ConfigError when step > min positive lag / 4, HistoryGapError when
// the measure reaches before the history domain and DivergenceError on a
// non-finite state.
Trajectory integrate(const ModelInstance& model,
                     const InitialHistory& history,
                     double horizon,
                     const IntegratorOptions& opts = {});

double default_step(const DelayMeasure& measure);

// Solution of x' = r (c - x), x(0) = x0.
double exact_linear_relaxation(double r, double c, double x0, double t);

struct TailStatistics {
    double inf_est;
    double sup_est;
    bool converged;
    std::optional<double> limit_est;
};

// inf/sup of the knots in the trailing `window_fraction` of [0, t_max].
// `memory_length` > 0 enforces a window of at least ten memory lengths.
TailStatistics tail_statistics(const Trajectory& traj,
                               double window_fraction = 0.25,
                               double convergence_tol = 1e-4,
                               double memory_length = 0.0);

// CSV with header "t,x"; every stride-th knot plus the final one.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::size_t stride = 1);

}  // namespace distdelay
