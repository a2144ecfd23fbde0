#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace distdelay {

// Point mass `weight` placed at s = t - lag.
struct Atom {
    double weight;
    double lag;
};

struct QuadratureOptions {
    double panels_per_unit = 8.0;  // panels per unit of lag width
    std::size_t nodes_per_panel = 4;
    std::size_t min_panels = 1;
};

// Which one-sided limit to use when t sits exactly on a schedule switch.
enum class Side { Left, Right };

// Nonnegative lag density k(u) on [lag_lo, lag_hi], discretised once by
// composite Gauss-Legendre and renormalised to unit mass.
class KernelDensity {
public:
    struct Uniform {
        double lo;
        double hi;
    };
    struct TruncatedGamma {
        double shape;
        double rate;
        double tail_mass;
    };
    struct Table {
        std::vector<double> lags;
        std::vector<double> density;
    };
    struct Function {
        std::string label;
    };
    using Shape = std::variant<Uniform, TruncatedGamma, Table, Function>;

    static KernelDensity uniform(double lo, double hi, const QuadratureOptions& q = {});
    // Gamma(shape, rate) lag density truncated where the tail mass drops below `tail_mass`.
    static KernelDensity truncated_gamma(double shape, double rate, double tail_mass = 1e-8,
                                         const QuadratureOptions& q = {});
    // Piecewise-linear density through (lags[i], density[i]).
    static KernelDensity table(std::vector<double> lags, std::vector<double> density,
                               const QuadratureOptions& q = {});
    static KernelDensity from_function(std::function<double(double)> density, double lo, double hi,
                                       std::string label, const QuadratureOptions& q = {});

    double lag_lo() const noexcept { return lo_; }
    double lag_hi() const noexcept { return hi_; }
    // Mass of the raw density before renormalisation.
    double raw_mass() const noexcept { return raw_mass_; }
    // Normalised density value at lag u.
    double density(double u) const;
    const Shape& shape() const noexcept { return shape_; }
    const QuadratureOptions& quadrature() const noexcept { return quad_; }
    // Quadrature nodes as weighted atoms; weights sum to 1.
    const std::vector<Atom>& nodes() const noexcept { return nodes_; }

private:
    KernelDensity(Shape shape, std::function<double(double)> raw, double lo, double hi,
                  const QuadratureOptions& q);

    Shape shape_;
    std::function<double(double)> raw_;
    double lo_;
    double hi_;
    double raw_mass_ = 0.0;
    QuadratureOptions quad_;
    std::vector<Atom> nodes_;
};

// Piecewise-constant frozen sampling: on (switch_times[k], switch_times[k+1]]
// the delayed argument is frozen at frozen_samples[k]. The last phase is
// open-ended.
class DelaySchedule {
public:
    DelaySchedule(std::vector<double> switch_times, std::vector<double> frozen_samples);

    std::span<const double> switch_times() const noexcept { return switch_times_; }
    std::span<const double> frozen_samples() const noexcept { return samples_; }
    std::size_t phase_count() const noexcept { return switch_times_.size(); }

    std::size_t phase_at(double t, Side side = Side::Left) const;
    double sample_at(double t, Side side = Side::Left) const { return samples_[phase_at(t, side)]; }

private:
    std::vector<double> switch_times_;
    std::vector<double> samples_;
};

class DelayMeasure {
public:
    struct Atoms {
        std::vector<Atom> atoms;
    };
    struct Kernel {
        KernelDensity density;
    };
    struct Mixture {
        double alpha;
        std::vector<Atom> atoms;
        KernelDensity density;
    };
    struct Frozen {
        std::shared_ptr<const DelaySchedule> schedule;
    };
    using Variant = std::variant<Atoms, Kernel, Mixture, Frozen>;

    // Weights must be nonnegative and sum to 1 (within 1e-12), lags >= 0.
    static DelayMeasure atoms(std::vector<Atom> atoms);
    static DelayMeasure single_lag(double lag) { return atoms({{1.0, lag}}); }
    static DelayMeasure kernel(KernelDensity density);
    // alpha * atoms + (1 - alpha) * kernel.
    static DelayMeasure mixture(double alpha, std::vector<Atom> atoms, KernelDensity density);
    static DelayMeasure frozen(std::shared_ptr<const DelaySchedule> schedule);

    const Variant& variant() const noexcept { return variant_; }
    bool is_frozen() const noexcept { return std::holds_alternative<Frozen>(variant_); }
    const DelaySchedule* schedule() const noexcept;

    double total_mass() const;
    // h(t): earliest instant the measure looks at.
    double memory_bound(double t) const;
    // Largest lag (0 for frozen schedules).
    double max_lag() const noexcept { return max_lag_; }
    // Smallest strictly positive lag that bounds the integration step, if any.
    std::optional<double> min_positive_lag() const noexcept { return min_positive_lag_; }
    // Instants where the measure changes discontinuously in t.
    std::vector<double> breakpoints() const;

    // Atomised form of every non-frozen variant: sum_k w_k g(x(t - lag_k)).
    std::span<const Atom> flat_atoms() const noexcept { return flat_; }

    // int g(x(s)) d_s R(t, s). `history(s)` must cover [memory_bound(t), t].
    template <class History, class G>
    double apply(double t, History&& history, G&& g, Side side = Side::Left) const
    {
        if (const auto* fz = std::get_if<Frozen>(&variant_)) {
            return g(history(fz->schedule->sample_at(t, side)));
        }
        double acc = 0.0;
        for (const Atom& a : flat_) {
            acc += a.weight * g(history(t - a.lag));
        }
        return acc;
    }

private:
    explicit DelayMeasure(Variant v);
    void flatten();

    Variant variant_;
    std::vector<Atom> flat_;
    double max_lag_ = 0.0;
    std::optional<double> min_positive_lag_;
};

double total_mass(const DelayMeasure& m);
double memory_bound(const DelayMeasure& m, double t);

template <class History, class G>
double stieltjes_apply(const DelayMeasure& m, double t, History&& history, G&& g)
{
    return m.apply(t, std::forward<History>(history), std::forward<G>(g));
}

}  // namespace distdelay
