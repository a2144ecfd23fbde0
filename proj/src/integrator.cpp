#include "distdelay/integrator.hpp"

#include "distdelay/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace distdelay {

namespace {

std::string interval_text(double from, double to)
{
    std::ostringstream os;
    os.precision(17);
    os << "[" << from << ", " << to << "]";
    return os.str();
}

void validate_history(const std::function<double(double)>& phi, double domain_start)
{
    if (!(domain_start <= 0.0) || !std::isfinite(domain_start)) {
        throw ConfigError("initial history domain must start at a finite t <= 0");
    }
    constexpr int samples = 1000;
    for (int i = 0; i <= samples; ++i) {
        const double t = domain_start * (1.0 - static_cast<double>(i) / samples);
        const double v = phi(t);
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError("initial history must be finite and nonnegative on its domain");
        }
    }
    if (!(phi(0.0) > 0.0)) throw ConfigError("initial history must be positive at t = 0");
}

}  // namespace

// ---------------------------------------------------------------- history

InitialHistory::InitialHistory(Shape shape, std::function<double(double)> eval, double domain_start)
    : shape_(std::move(shape))
    , eval_(std::move(eval))
    , domain_start_(domain_start)
{
    validate_history(eval_, domain_start_);
    value_at_zero_ = eval_(0.0);
}

InitialHistory InitialHistory::constant(double value, double domain_start)
{
    return InitialHistory(Constant{value}, [value](double) { return value; }, domain_start);
}

InitialHistory InitialHistory::linear_ramp(double domain_start, double value_at_start, double value_at_zero)
{
    if (domain_start == 0.0) return constant(value_at_zero, 0.0);
    auto phi = [=](double t) {
        const double w = t / domain_start;  // 1 at domain_start, 0 at 0
        return w * value_at_start + (1.0 - w) * value_at_zero;
    };
    return InitialHistory(Ramp{value_at_start, value_at_zero}, phi, domain_start);
}

InitialHistory InitialHistory::table(std::vector<double> times, std::vector<double> values)
{
    if (times.size() < 2 || times.size() != values.size()) {
        throw ConfigError("history table needs at least two (t, value) points of equal length");
    }
    if (times.back() != 0.0) throw ConfigError("history table must end at t = 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw ConfigError("history table times must be strictly increasing");
    }
    const double start = times.front();
    auto phi = [times, values](double t) {
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        if (it == times.begin()) return values.front();
        if (it == times.end()) return values.back();
        const auto i = static_cast<std::size_t>(it - times.begin());
        const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
        return (1.0 - w) * values[i - 1] + w * values[i];
    };
    return InitialHistory(Table{std::move(times), std::move(values)}, phi, start);
}

InitialHistory InitialHistory::from_function(std::function<double(double)> phi, double domain_start,
                                             std::string label)
{
    if (!phi) throw ConfigError("initial history function is empty");
    return InitialHistory(Function{std::move(label)}, std::move(phi), domain_start);
}

double InitialHistory::operator()(double t) const
{
    if (t < domain_start_ || t > 0.0) {
        throw HistoryGapError(t, domain_start_, "initial history queried outside its domain "
                                                    + interval_text(domain_start_, 0.0));
    }
    return eval_(t);
}

// ---------------------------------------------------------------- rate

RateFunction::RateFunction(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times))
    , values_(std::move(values))
{
    if (times_.empty() || times_.size() != values_.size()) {
        throw ConfigError("rate function needs one value per breakpoint");
    }
    if (times_.front() != 0.0) throw ConfigError("rate function must start at t = 0");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
            throw ConfigError("rate r(t) must be finite and nonnegative");
        }
        if (i > 0 && !(times_[i] > times_[i - 1])) {
            throw ConfigError("rate breakpoints must be strictly increasing");
        }
    }
}

RateFunction RateFunction::constant(double r)
{
    return RateFunction({0.0}, {r});
}

RateFunction RateFunction::piecewise(std::vector<double> times, std::vector<double> values)
{
    return RateFunction(std::move(times), std::move(values));
}

double RateFunction::operator()(double t, Side side) const
{
    if (values_.size() == 1) return values_.front();
    const auto it = side == Side::Left ? std::lower_bound(times_.begin(), times_.end(), t)
                                       : std::upper_bound(times_.begin(), times_.end(), t);
    const auto idx = static_cast<std::size_t>(it - times_.begin());
    return values_[idx == 0 ? 0 : idx - 1];
}

double RateFunction::sup() const
{
    return *std::max_element(values_.begin(), values_.end());
}

// ---------------------------------------------------------------- trajectory

Trajectory::Trajectory(InitialHistory history)
    : history_(std::move(history))
{
}

std::size_t Trajectory::locate(double t) const
{
    // Knots sit on a uniform grid except near breakpoints, so the nominal
    // index is almost always exact.
    const std::size_t last = t_.size() - 1;
    std::size_t i = 0;
    if (stats_.nominal_step > 0.0) {
        const double guess = std::floor(t / stats_.nominal_step);
        i = guess <= 0.0 ? 0 : std::min(static_cast<std::size_t>(guess), last);
    }
    while (i > 0 && t_[i] > t) --i;
    while (i + 1 < last && t_[i + 1] < t) ++i;
    if (i >= last) i = last == 0 ? 0 : last - 1;
    return i;
}

double Trajectory::segment_value(std::size_t i, double t) const
{
    const double h = t_[i + 1] - t_[i];
    const double s = (t - t_[i]) / h;
    const double one_minus = 1.0 - s;
    const double h00 = (1.0 + 2.0 * s) * one_minus * one_minus;
    const double h10 = s * one_minus * one_minus;
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 * x_[i] + h10 * h * dr_[i] + h01 * x_[i + 1] + h11 * h * dl_[i + 1];
}

double Trajectory::operator()(double t) const
{
    if (t <= 0.0) return history_(t);
    if (t > t_.back()) {
        throw HistoryGapError(t_.back(), t, "trajectory queried past its span " + interval_text(t_min(), t_max())
                                                + ": missing " + interval_text(t_.back(), t));
    }
    return segment_value(locate(t), t);
}

double Trajectory::running_value(double t) const
{
    if (t <= 0.0) {
        if (t < history_.domain_start()) {
            throw HistoryGapError(t, history_.domain_start(),
                                  "delay reaches before the initial history: missing "
                                      + interval_text(t, history_.domain_start()));
        }
        return history_.evaluate(t);
    }
    if (t_.size() == 1) return x_[0] + t * dr_[0];
    return segment_value(locate(t), t);
}

// ---------------------------------------------------------------- integrate

double default_step(const DelayMeasure& measure)
{
    const auto lag = measure.min_positive_lag();
    return lag ? std::min(0.01, *lag / 8.0) : 0.01;
}

Trajectory integrate(const ModelInstance& model,
                     const InitialHistory& history,
                     double horizon,
                     const IntegratorOptions& opts)
{
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be positive");
    const double h = opts.step > 0.0 ? opts.step : default_step(model.measure);
    if (!std::isfinite(h)) throw ConfigError("integration step must be positive and finite");
    if (const auto lag = model.measure.min_positive_lag(); lag && h > *lag / 4.0) {
        std::ostringstream os;
        os.precision(17);
        os << "step " << h << " exceeds min_lag/4 = " << *lag / 4.0 << " (step guard)";
        throw ConfigError(os.str());
    }

    // Earliest instant the measure can look at, against the history domain.
    double earliest = -model.measure.max_lag();
    if (const auto* sched = model.measure.schedule()) {
        const auto samples = sched->frozen_samples();
        earliest = *std::min_element(samples.begin(), samples.end());
    }
    if (earliest < history.domain_start()) {
        throw HistoryGapError(earliest, history.domain_start(),
                              "delay reaches before the initial history: missing "
                                  + interval_text(earliest, history.domain_start()));
    }

    std::vector<double> breaks = model.measure.breakpoints();
    for (double t : model.r.times()) {
        if (t > 0.0) breaks.push_back(t);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    Trajectory traj(history);
    auto& st = traj.stats_;
    st.nominal_step = h;

    const ReproductionFunction& f = model.f;
    auto rhs = [&](double t, double x_now, Side side) {
        ++st.rhs_evaluations;
        const double near = 1e-12 * std::max(1.0, std::abs(t));
        auto past = [&](double s) { return s >= t - near ? x_now : traj.running_value(s); };
        const double forcing = model.measure.apply(t, past, [&f](double y) { return eval(f, y); }, side);
        return model.r(t, side) * (forcing - x_now);
    };

    const double x0 = history.value_at_zero();
    traj.t_.push_back(0.0);
    traj.x_.push_back(x0);
    traj.dl_.push_back(0.0);
    traj.dr_.push_back(0.0);
    traj.dr_[0] = rhs(0.0, x0, Side::Right);
    traj.dl_[0] = traj.dr_[0];
    st.min_value = st.max_value = x0;

    std::size_t next_break = 0;
    while (next_break < breaks.size() && breaks[next_break] <= 0.0) ++next_break;

    const double end_eps = 1e-12 * horizon;
    double t = 0.0;
    double x = x0;
    while (t < horizon - end_eps) {
        const double grid_next = (std::floor(t / h + 1e-9) + 1.0) * h;
        double target = std::min(grid_next, horizon);
        bool at_break = false;
        if (next_break < breaks.size() && breaks[next_break] <= target + 1e-9 * h) {
            target = breaks[next_break];
            at_break = true;
            ++next_break;
        }
        const double H = target - t;
        const double k1 = traj.dr_.back();
        const double k2 = rhs(t + 0.5 * H, x + 0.5 * H * k1, Side::Left);
        const double k3 = rhs(t + 0.5 * H, x + 0.5 * H * k2, Side::Left);
        const double k4 = rhs(target, x + H * k3, Side::Left);
        const double x_next = x + H / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(x_next)) {
            throw DivergenceError(t, "state became non-finite after t = " + std::to_string(t));
        }
        const double d_left = rhs(target, x_next, Side::Left);
        const double d_right = at_break ? rhs(target, x_next, Side::Right) : d_left;
        if (!std::isfinite(d_left) || !std::isfinite(d_right)) {
            throw DivergenceError(t, "derivative became non-finite after t = " + std::to_string(t));
        }
        traj.t_.push_back(target);
        traj.x_.push_back(x_next);
        traj.dl_.push_back(d_left);
        traj.dr_.push_back(d_right);
        ++st.steps;
        if (at_break) ++st.breakpoints_hit;
        st.min_value = std::min(st.min_value, x_next);
        st.max_value = std::max(st.max_value, x_next);
        t = target;
        x = x_next;
    }
    return traj;
}

double exact_linear_relaxation(double r, double c, double x0, double t)
{
    if (!(r > 0.0)) throw DomainError("relaxation rate must be positive");
    return (x0 - c) * std::exp(-r * t) + c;
}

TailStatistics tail_statistics(const Trajectory& traj,
                               double window_fraction,
                               double convergence_tol,
                               double memory_length)
{
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
        throw DomainError("tail window fraction must lie in (0, 1]");
    }
    const double span = traj.t_max();
    const double window = window_fraction * span;
    if (memory_length > 0.0 && window < 10.0 * memory_length) {
        throw DomainError("tail window shorter than ten memory lengths");
    }
    const double from = span - window;
    const auto times = traj.times();
    const auto values = traj.values();
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < from) continue;
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
    }
    TailStatistics out{lo, hi, hi - lo < convergence_tol, std::nullopt};
    if (out.converged) out.limit_est = 0.5 * (lo + hi);
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::size_t stride)
{
    if (stride == 0) stride = 1;
    os << "t,x\n";
    const auto times = traj.times();
    const auto values = traj.values();
    char buf[64];
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i % stride != 0 && i + 1 != times.size()) continue;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", times[i], values[i]);
        os << buf;
    }
}

}  // namespace distdelay
