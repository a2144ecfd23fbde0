#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>

namespace distdelay {

// f(x) = (p/delta) x exp(-a x); the model is x' = delta [f(history) - x].
struct Nicholson {
    double p;
    double delta;
    double a;
};

// f(x) = (a/b) x / (1 + x^gamma); the model is x' = b [f(history) - x].
struct MackeyGlass {
    double a;
    double b;
    double gamma;
};

// User-supplied reproduction function. The Lipschitz bound is trusted and
// spot-checked by lipschitz_constants(). `scale` is a characteristic
// population size used to size search grids.
struct Custom {
    std::function<double(double)> evaluator;
    double declared_lipschitz = 0.0;
    std::string label = "custom";
    double scale = 1.0;
};

enum class ExtremumMode { Min, Max };
enum class TieBreak { Greatest, Smallest };

struct AnalysisTolerances {
    double x_tol = 1e-9;
    double f_tol = 1e-9;
    double grid_per_unit = 4096.0;
    std::size_t min_grid = 64;
    std::size_t max_grid = std::size_t{1} << 22;
};

struct Extremum {
    double argpoint;
    double value;
};

struct LipschitzConstants {
    double L;
    std::optional<double> L_star;
    // Largest |slope| seen on the finite-difference grid.
    double L_sampled;
    // Custom only: the sampled slope exceeded the declared bound.
    bool declared_bound_violated = false;
};

class ReproductionFunction {
public:
    using Kind = std::variant<Nicholson, MackeyGlass, Custom>;

    static ReproductionFunction nicholson(double p, double delta, double a);
    static ReproductionFunction mackey_glass(double a, double b, double gamma);
    // Throws AmbiguityError when f(x) - x changes sign more than once.
    static ReproductionFunction custom(std::function<double(double)> evaluator,
                                       double declared_lipschitz,
                                       std::string label = "custom",
                                       double scale = 1.0);

    // Unchecked evaluation; callers guarantee x >= 0.
    double operator()(double x) const;

    const Kind& kind() const noexcept { return kind_; }
    bool is_custom() const noexcept { return std::holds_alternative<Custom>(kind_); }
    std::string name() const;
    double scale() const noexcept { return scale_; }

    // Cached descriptors: equilibrium K, greatest maximizer of f on [0,K]
    // and the maximum value there. All absent in the extinction regime.
    const std::optional<double>& equilibrium() const noexcept { return equilibrium_; }
    const std::optional<double>& argmax_below_equilibrium() const noexcept { return x_max_; }
    const std::optional<double>& max_below_equilibrium() const noexcept { return max_value_; }

private:
    explicit ReproductionFunction(Kind kind);

    Kind kind_;
    double scale_ = 1.0;
    std::optional<double> equilibrium_;
    std::optional<double> x_max_;
    std::optional<double> max_value_;
};

// Checked evaluation: throws DomainError for x < 0 or non-finite x.
double eval(const ReproductionFunction& f, double x);

std::optional<double> equilibrium(const ReproductionFunction& f);

// Bisection search for the positive fixed point of a sampled function.
// Returns nullopt when f(x) < x on the whole sampled half-line.
std::optional<double> find_equilibrium(const std::function<double(double)>& f,
                                       double scale,
                                       const AnalysisTolerances& tol = {});

LipschitzConstants lipschitz_constants(const ReproductionFunction& f,
                                       std::size_t grid_resolution = std::size_t{1} << 16);

// order in {1, 2, 3}. Closed form for built-ins, central differences otherwise.
double derivative(const ReproductionFunction& f, double x, int order = 1);

// (Sf)(x) = f'''/f' - 1.5 (f''/f')^2.
double schwarzian(const ReproductionFunction& f, double x);

// Grid scan over [lo, hi] plus golden-section refinement of the best cell.
// Ties on the grid go to the greatest or smallest point per `tie`.
Extremum extremum_points(const ReproductionFunction& f,
                         double lo,
                         double hi,
                         ExtremumMode mode,
                         TieBreak tie,
                         const AnalysisTolerances& tol = {});

}  // namespace distdelay
