#include "distdelay/delay_measure.hpp"

#include "distdelay/error.hpp"
#include "distdelay/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace distdelay {

namespace {

void check_atoms(const std::vector<Atom>& atoms)
{
    if (atoms.empty()) throw ConfigError("atomic delay measure has no atoms");
    double mass = 0.0;
    for (const Atom& a : atoms) {
        if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) throw ConfigError("atom weight must be nonnegative");
        if (!(a.lag >= 0.0) || !std::isfinite(a.lag)) throw ConfigError("atom lag must be finite and nonnegative");
        mass += a.weight;
    }
    if (std::abs(mass - 1.0) > 1e-12) throw ConfigError("atom weights must sum to 1");
}

}  // namespace

// ---------------------------------------------------------------- kernel

KernelDensity::KernelDensity(Shape shape, std::function<double(double)> raw, double lo, double hi,
                             const QuadratureOptions& q)
    : shape_(std::move(shape))
    , raw_(std::move(raw))
    , lo_(lo)
    , hi_(hi)
    , quad_(q)
{
    if (!(lo >= 0.0) || !std::isfinite(hi) || !(hi > lo)) {
        throw ConfigError("kernel support must be a finite interval 0 <= lag_lo < lag_hi");
    }
    if (q.nodes_per_panel == 0 || !(q.panels_per_unit > 0.0)) {
        throw ConfigError("kernel quadrature needs positive panel and node counts");
    }
    const auto panels = std::max(q.min_panels,
                                 static_cast<std::size_t>(std::ceil(q.panels_per_unit * (hi - lo) - 1e-9)));
    const auto rule = gauss_legendre(q.nodes_per_panel);
    const double width = (hi - lo) / static_cast<double>(panels);
    nodes_.reserve(panels * q.nodes_per_panel);
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = lo + width * static_cast<double>(p);
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const double u = a + 0.5 * width * (rule.nodes[j] + 1.0);
            const double k = raw_(u);
            if (!(k >= 0.0) || !std::isfinite(k)) throw ConfigError("kernel density must be finite and nonnegative");
            nodes_.push_back({0.5 * width * rule.weights[j] * k, u});
        }
    }
    raw_mass_ = 0.0;
    for (const Atom& n : nodes_) raw_mass_ += n.weight;
    if (!(raw_mass_ > 0.0)) throw ConfigError("kernel density has zero mass");
    for (Atom& n : nodes_) n.weight /= raw_mass_;
}

KernelDensity KernelDensity::uniform(double lo, double hi, const QuadratureOptions& q)
{
    return KernelDensity(Uniform{lo, hi}, [](double) { return 1.0; }, lo, hi, q);
}

KernelDensity KernelDensity::truncated_gamma(double shape, double rate, double tail_mass,
                                             const QuadratureOptions& q)
{
    if (!(shape > 0.0) || !(rate > 0.0)) throw ConfigError("gamma kernel needs positive shape and rate");
    if (!(tail_mass > 0.0 && tail_mass < 1.0)) throw ConfigError("gamma kernel tail mass must lie in (0, 1)");
    const double hi = boost::math::gamma_q_inv(shape, tail_mass) / rate;
    auto density = [shape, rate](double u) {
        return boost::math::gamma_p_derivative(shape, rate * u) * rate;
    };
    return KernelDensity(TruncatedGamma{shape, rate, tail_mass}, density, 0.0, hi, q);
}

KernelDensity KernelDensity::table(std::vector<double> lags, std::vector<double> density,
                                   const QuadratureOptions& q)
{
    if (lags.size() < 2 || lags.size() != density.size()) {
        throw ConfigError("kernel table needs at least two (lag, density) points of equal length");
    }
    if (!std::is_sorted(lags.begin(), lags.end()) ||
        std::adjacent_find(lags.begin(), lags.end()) != lags.end()) {
        throw ConfigError("kernel table lags must be strictly increasing");
    }
    const double lo = lags.front();
    const double hi = lags.back();
    auto interp = [lags, density](double u) {
        const auto it = std::upper_bound(lags.begin(), lags.end(), u);
        if (it == lags.begin()) return density.front();
        if (it == lags.end()) return density.back();
        const auto i = static_cast<std::size_t>(it - lags.begin());
        const double w = (u - lags[i - 1]) / (lags[i] - lags[i - 1]);
        return (1.0 - w) * density[i - 1] + w * density[i];
    };
    return KernelDensity(Table{std::move(lags), std::move(density)}, interp, lo, hi, q);
}

KernelDensity KernelDensity::from_function(std::function<double(double)> density, double lo, double hi,
                                           std::string label, const QuadratureOptions& q)
{
    if (!density) throw ConfigError("kernel density function is empty");
    return KernelDensity(Function{std::move(label)}, std::move(density), lo, hi, q);
}

double KernelDensity::density(double u) const
{
    if (u < lo_ || u > hi_) return 0.0;
    return raw_(u) / raw_mass_;
}

// ---------------------------------------------------------------- schedule

DelaySchedule::DelaySchedule(std::vector<double> switch_times, std::vector<double> frozen_samples)
    : switch_times_(std::move(switch_times))
    , samples_(std::move(frozen_samples))
{
    if (switch_times_.empty() || switch_times_.size() != samples_.size()) {
        throw ConfigError("delay schedule needs one frozen sample per phase");
    }
    if (switch_times_.front() != 0.0) throw ConfigError("delay schedule must start at t = 0");
    for (std::size_t k = 0; k < switch_times_.size(); ++k) {
        if (k > 0 && !(switch_times_[k] > switch_times_[k - 1])) {
            throw ConfigError("delay schedule switch times must be strictly increasing");
        }
        if (!(samples_[k] <= switch_times_[k]) || !std::isfinite(samples_[k])) {
            throw ConfigError("frozen sample must not lie after the start of its phase");
        }
    }
}

std::size_t DelaySchedule::phase_at(double t, Side side) const
{
    // Left: phase k covers (tau_k, tau_{k+1}]. Right: [tau_k, tau_{k+1}).
    const auto it = side == Side::Left
                        ? std::lower_bound(switch_times_.begin(), switch_times_.end(), t)
                        : std::upper_bound(switch_times_.begin(), switch_times_.end(), t);
    const auto idx = static_cast<std::size_t>(it - switch_times_.begin());
    return idx == 0 ? 0 : idx - 1;
}

// ---------------------------------------------------------------- measure

DelayMeasure::DelayMeasure(Variant v)
    : variant_(std::move(v))
{
    flatten();
}

DelayMeasure DelayMeasure::atoms(std::vector<Atom> atoms)
{
    check_atoms(atoms);
    return DelayMeasure(Atoms{std::move(atoms)});
}

DelayMeasure DelayMeasure::kernel(KernelDensity density)
{
    return DelayMeasure(Kernel{std::move(density)});
}

DelayMeasure DelayMeasure::mixture(double alpha, std::vector<Atom> atoms, KernelDensity density)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("mixture alpha must lie in [0, 1]");
    check_atoms(atoms);
    return DelayMeasure(Mixture{alpha, std::move(atoms), std::move(density)});
}

DelayMeasure DelayMeasure::frozen(std::shared_ptr<const DelaySchedule> schedule)
{
    if (!schedule) throw ConfigError("frozen delay measure needs a schedule");
    return DelayMeasure(Frozen{std::move(schedule)});
}

void DelayMeasure::flatten()
{
    flat_.clear();
    auto add = [this](const std::vector<Atom>& src, double scale) {
        for (const Atom& a : src) {
            if (a.weight * scale > 0.0) flat_.push_back({a.weight * scale, a.lag});
        }
    };
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Atoms>) {
                add(v.atoms, 1.0);
            } else if constexpr (std::is_same_v<T, Kernel>) {
                add(v.density.nodes(), 1.0);
            } else if constexpr (std::is_same_v<T, Mixture>) {
                add(v.atoms, v.alpha);
                add(v.density.nodes(), 1.0 - v.alpha);
            }
        },
        variant_);

    max_lag_ = 0.0;
    min_positive_lag_.reset();
    for (const Atom& a : flat_) max_lag_ = std::max(max_lag_, a.lag);

    auto consider = [this](double lag) {
        if (lag > 0.0) min_positive_lag_ = std::min(min_positive_lag_.value_or(lag), lag);
    };
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Atoms>) {
                for (const Atom& a : v.atoms) consider(a.lag);
            } else if constexpr (std::is_same_v<T, Kernel>) {
                consider(v.density.lag_lo());
                max_lag_ = std::max(max_lag_, v.density.lag_hi());
            } else if constexpr (std::is_same_v<T, Mixture>) {
                if (v.alpha > 0.0) {
                    for (const Atom& a : v.atoms) consider(a.lag);
                }
                if (v.alpha < 1.0) {
                    consider(v.density.lag_lo());
                    max_lag_ = std::max(max_lag_, v.density.lag_hi());
                }
            }
        },
        variant_);
}

const DelaySchedule* DelayMeasure::schedule() const noexcept
{
    const auto* fz = std::get_if<Frozen>(&variant_);
    return fz ? fz->schedule.get() : nullptr;
}

double DelayMeasure::total_mass() const
{
    if (is_frozen()) return 1.0;
    double mass = 0.0;
    for (const Atom& a : flat_) mass += a.weight;
    return mass;
}

double DelayMeasure::memory_bound(double t) const
{
    if (const auto* s = schedule()) return s->sample_at(t);
    return t - max_lag_;
}

std::vector<double> DelayMeasure::breakpoints() const
{
    if (const auto* s = schedule()) {
        const auto times = s->switch_times();
        return {times.begin() + 1, times.end()};
    }
    return {};
}

double total_mass(const DelayMeasure& m)
{
    return m.total_mass();
}

double memory_bound(const DelayMeasure& m, double t)
{
    return m.memory_bound(t);
}

}  // namespace distdelay
