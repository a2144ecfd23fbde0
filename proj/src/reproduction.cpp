#include "distdelay/reproduction.hpp"

#include "distdelay/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace distdelay {

namespace {

constexpr double kGolden = 0.6180339887498949;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be positive and finite");
    }
}

double nicholson_value(const Nicholson& n, double x)
{
    return (n.p / n.delta) * x * std::exp(-n.a * x);
}

double mackey_glass_value(const MackeyGlass& m, double x)
{
    return (m.a / m.b) * x / (1.0 + std::pow(x, m.gamma));
}

double nicholson_derivative(const Nicholson& n, double x, int order)
{
    const double c = n.p / n.delta;
    const double a = n.a;
    const double e = c * std::exp(-a * x);
    switch (order) {
    case 1: return e * (1.0 - a * x);
    case 2: return e * (a * a * x - 2.0 * a);
    default: return e * (3.0 * a * a - a * a * a * x);
    }
}

double mackey_glass_derivative(const MackeyGlass& m, double x, int order)
{
    const double c = m.a / m.b;
    const double g = m.gamma;
    const double u = std::pow(x, g);
    const double w = 1.0 + u;
    switch (order) {
    case 1: return c * (1.0 + (1.0 - g) * u) / (w * w);
    case 2: return c * g * std::pow(x, g - 1.0) * (2.0 * g * u - (g + 1.0) * w) / (w * w * w);
    default:
        return -c * g * std::pow(x, g - 2.0)
               * (6.0 * g * g * u * u - 6.0 * g * g * u * w + (g * g - 1.0) * w * w)
               / (w * w * w * w);
    }
}

double finite_difference(const std::function<double(double)>& f, double x, int order)
{
    const double base = std::max(1.0, std::abs(x));
    double h = (order == 1 ? 1e-3 : 1e-2) * base;
    if (x > 0.0) {
        h = std::min(h, x / 3.0);
    }
    if (x - 3.0 * h < 0.0) {
        // One-sided second-order formulas at the boundary.
        const double f0 = f(x), f1 = f(x + h), f2 = f(x + 2 * h), f3 = f(x + 3 * h);
        const double f4 = f(x + 4 * h);
        switch (order) {
        case 1: return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
        case 2: return (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h);
        default: return (-2.5 * f0 + 9.0 * f1 - 12.0 * f2 + 7.0 * f3 - 1.5 * f4) / (h * h * h);
        }
    }
    switch (order) {
    case 1: return (f(x - 2 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2 * h)) / (12.0 * h);
    case 2:
        return (-f(x - 2 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2 * h))
               / (12.0 * h * h);
    default:
        return (-f(x + 3 * h) + 8.0 * f(x + 2 * h) - 13.0 * f(x + h) + 13.0 * f(x - h)
                - 8.0 * f(x - 2 * h) + f(x - 3 * h))
               / (8.0 * h * h * h);
    }
}

// Supremum of |(f(x) - K)/(x - K)| over a uniform grid on [0, upper].
double sampled_l_star(const ReproductionFunction& f, double K, double upper, std::size_t n)
{
    double sup = 0.0;
    const double dx = upper / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = dx * static_cast<double>(i);
        if (std::abs(x - K) < 1e-6 * std::max(1.0, K)) continue;
        sup = std::max(sup, std::abs((f(x) - K) / (x - K)));
    }
    return sup;
}

}  // namespace

ReproductionFunction::ReproductionFunction(Kind kind)
    : kind_(std::move(kind))
{
}

ReproductionFunction ReproductionFunction::nicholson(double p, double delta, double a)
{
    require_positive(p, "Nicholson p");
    require_positive(delta, "Nicholson delta");
    require_positive(a, "Nicholson a");
    ReproductionFunction f(Nicholson{p, delta, a});
    f.scale_ = 1.0 / a;
    // p == delta counts as extinction: x e^{-ax} < x for every x > 0.
    if (p > delta) {
        const double K = std::log(p / delta) / a;
        f.equilibrium_ = K;
        const double peak = 1.0 / a;
        f.x_max_ = std::min(K, peak);
        f.max_value_ = K >= peak ? nicholson_value(Nicholson{p, delta, a}, peak) : K;
    }
    return f;
}

ReproductionFunction ReproductionFunction::mackey_glass(double a, double b, double gamma)
{
    require_positive(a, "Mackey-Glass a");
    require_positive(b, "Mackey-Glass b");
    require_positive(gamma, "Mackey-Glass gamma");
    ReproductionFunction f(MackeyGlass{a, b, gamma});
    f.scale_ = 1.0;
    if (a > b) {
        const double K = std::pow(a / b - 1.0, 1.0 / gamma);
        f.equilibrium_ = K;
        if (gamma > 1.0) {
            const double peak = std::pow(1.0 / (gamma - 1.0), 1.0 / gamma);
            f.x_max_ = std::min(K, peak);
            f.max_value_ = K >= peak ? mackey_glass_value(MackeyGlass{a, b, gamma}, peak) : K;
        } else {
            f.x_max_ = K;
            f.max_value_ = K;
        }
    }
    return f;
}

ReproductionFunction ReproductionFunction::custom(std::function<double(double)> evaluator,
                                                  double declared_lipschitz,
                                                  std::string label,
                                                  double scale)
{
    if (!evaluator) throw DomainError("custom reproduction function has no evaluator");
    if (!(declared_lipschitz >= 0.0) || !std::isfinite(declared_lipschitz)) {
        throw DomainError("custom reproduction function needs a finite Lipschitz bound");
    }
    require_positive(scale, "custom scale");
    ReproductionFunction f(Custom{std::move(evaluator), declared_lipschitz, std::move(label), scale});
    f.scale_ = scale;
    const auto& fn = std::get<Custom>(f.kind_).evaluator;
    if (std::abs(fn(0.0)) > 1e-12) {
        throw DomainError("custom reproduction function must satisfy f(0) = 0");
    }
    f.equilibrium_ = find_equilibrium(fn, scale);
    if (f.equilibrium_) {
        const auto peak = extremum_points(f, 0.0, *f.equilibrium_, ExtremumMode::Max, TieBreak::Greatest);
        f.x_max_ = peak.argpoint;
        f.max_value_ = peak.value;
    }
    return f;
}

double ReproductionFunction::operator()(double x) const
{
    return std::visit(Overloaded{
                          [x](const Nicholson& n) { return nicholson_value(n, x); },
                          [x](const MackeyGlass& m) { return mackey_glass_value(m, x); },
                          [x](const Custom& c) { return c.evaluator(x); },
                      },
                      kind_);
}

std::string ReproductionFunction::name() const
{
    std::ostringstream os;
    os.precision(17);
    std::visit(Overloaded{
                   [&os](const Nicholson& n) {
                       os << "nicholson(p=" << n.p << ", delta=" << n.delta << ", a=" << n.a << ")";
                   },
                   [&os](const MackeyGlass& m) {
                       os << "mackey_glass(a=" << m.a << ", b=" << m.b << ", gamma=" << m.gamma << ")";
                   },
                   [&os](const Custom& c) { os << c.label; },
               },
               kind_);
    return os.str();
}

double eval(const ReproductionFunction& f, double x)
{
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw DomainError("reproduction function evaluated at negative or non-finite population");
    }
    return f(x);
}

std::optional<double> equilibrium(const ReproductionFunction& f)
{
    return f.equilibrium();
}

std::optional<double> find_equilibrium(const std::function<double(double)>& f,
                                       double scale,
                                       const AnalysisTolerances& tol)
{
    const double eps = 1e-6 * scale;
    const double dx = scale / tol.grid_per_unit;
    const double cap = 1e3 * scale;
    auto g = [&f](double x) { return f(x) - x; };

    // Walk right until f(x) < x on 16 consecutive points.
    double x_hi = cap;
    int run = 0;
    std::size_t down_crossings = 0;
    std::size_t up_crossings = 0;
    bool any_positive = false;
    bool prev_positive = g(eps) > 0.0;
    any_positive = prev_positive;
    double bracket_lo = eps;
    double bracket_hi = eps;
    for (std::size_t i = 1;; ++i) {
        const double x = eps + dx * static_cast<double>(i);
        if (x > cap) break;
        const bool positive = g(x) > 0.0;
        if (prev_positive && !positive) {
            ++down_crossings;
            bracket_lo = x - dx;
            bracket_hi = x;
        } else if (!prev_positive && positive) {
            ++up_crossings;
        }
        any_positive = any_positive || positive;
        prev_positive = positive;
        run = positive ? 0 : run + 1;
        if (run >= 16) {
            x_hi = x;
            break;
        }
    }

    // Coarse look past x_hi for a second positive region.
    constexpr std::size_t coarse = std::size_t{1} << 16;
    for (std::size_t i = 1; i <= coarse; ++i) {
        const double x = x_hi + (cap - x_hi) * static_cast<double>(i) / coarse;
        if (g(x) > 0.0) {
            throw AmbiguityError("f(x) - x changes sign more than once: several positive fixed points");
        }
    }
    if (up_crossings > 0 || down_crossings > 1) {
        throw AmbiguityError("f(x) - x changes sign more than once: several positive fixed points");
    }
    if (!any_positive) return std::nullopt;

    double lo = bracket_lo;
    double hi = bracket_hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

LipschitzConstants lipschitz_constants(const ReproductionFunction& f, std::size_t grid_resolution)
{
    const auto& K = f.equilibrium();
    const double upper = 10.0 * std::max(K.value_or(0.0), f.scale());
    const std::size_t n = std::max<std::size_t>(grid_resolution, 16);
    const double dx = upper / static_cast<double>(n);

    LipschitzConstants out{};
    double prev = f(0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double cur = f(dx * static_cast<double>(i));
        out.L_sampled = std::max(out.L_sampled, std::abs(cur - prev) / dx);
        prev = cur;
    }

    std::visit(Overloaded{
                   [&](const Nicholson& nic) {
                       const double c = nic.p / nic.delta;
                       out.L = c;
                       if (K) {
                           // |min f'| = c/e^2 at x = 2/a bounds L* once it exceeds 1.
                           const double bound = c / std::exp(2.0);
                           out.L_star = bound >= 1.0 ? bound : sampled_l_star(f, *K, upper, n);
                       }
                   },
                   [&](const MackeyGlass& mg) {
                       const double c = mg.a / mg.b;
                       const double g = mg.gamma;
                       const double steepest_descent = g > 1.0 ? c * (g - 1.0) * (g - 1.0) / (4.0 * g) : 0.0;
                       out.L = std::max(c, steepest_descent);
                       if (K) {
                           const bool hump_below_K =
                               g > 1.0 && *K > std::pow(1.0 / (g - 1.0), 1.0 / g);
                           out.L_star = (steepest_descent >= 1.0 && hump_below_K)
                                            ? steepest_descent
                                            : sampled_l_star(f, *K, upper, n);
                       }
                   },
                   [&](const Custom& c) {
                       out.L = c.declared_lipschitz;
                       out.declared_bound_violated =
                           out.L_sampled > c.declared_lipschitz * (1.0 + 1e-6) + 1e-12;
                       if (K) {
                           out.L_star = std::min(sampled_l_star(f, *K, upper, n), out.L);
                       }
                   },
               },
               f.kind());
    return out;
}

double derivative(const ReproductionFunction& f, double x, int order)
{
    if (order < 1 || order > 3) throw DomainError("derivative order must be 1, 2 or 3");
    if (!(x >= 0.0)) throw DomainError("derivative requested at negative population");
    return std::visit(Overloaded{
                          [&](const Nicholson& n) { return nicholson_derivative(n, x, order); },
                          [&](const MackeyGlass& m) { return mackey_glass_derivative(m, x, order); },
                          [&](const Custom& c) { return finite_difference(c.evaluator, x, order); },
                      },
                      f.kind());
}

double schwarzian(const ReproductionFunction& f, double x)
{
    if (!(x > 0.0)) throw DomainError("Schwarzian derivative requires x > 0");
    const double d1 = derivative(f, x, 1);
    if (std::abs(d1) < 1e-9) {
        throw SingularityError("f'(x) vanishes: the Schwarzian derivative has a pole here");
    }
    const double d2 = derivative(f, x, 2);
    const double d3 = derivative(f, x, 3);
    const double q = d2 / d1;
    return d3 / d1 - 1.5 * q * q;
}

Extremum extremum_points(const ReproductionFunction& f,
                         double lo,
                         double hi,
                         ExtremumMode mode,
                         TieBreak tie,
                         const AnalysisTolerances& tol)
{
    if (!(lo >= 0.0) || !std::isfinite(hi)) throw DomainError("extremum interval must lie in [0, inf)");
    if (lo > hi) throw DomainError("extremum interval has lo > hi");
    if (lo == hi) return {lo, f(lo)};

    const double sign = mode == ExtremumMode::Max ? 1.0 : -1.0;
    auto score = [&](double x) { return sign * f(x); };

    const double width = hi - lo;
    const auto n = std::clamp(static_cast<std::size_t>(std::ceil(tol.grid_per_unit * width)),
                              tol.min_grid,
                              tol.max_grid);
    auto node = [&](std::size_t i) {
        return i == n ? hi : lo + width * static_cast<double>(i) / static_cast<double>(n);
    };

    std::size_t best = 0;
    double best_score = -INFINITY;
    if (tie == TieBreak::Greatest) {
        for (std::size_t i = n + 1; i-- > 0;) {
            const double s = score(node(i));
            if (s > best_score) {
                best_score = s;
                best = i;
            }
        }
    } else {
        for (std::size_t i = 0; i <= n; ++i) {
            const double s = score(node(i));
            if (s > best_score) {
                best_score = s;
                best = i;
            }
        }
    }

    // Golden-section refinement on the two cells around the best node.
    double a = node(best == 0 ? 0 : best - 1);
    double b = node(best == n ? n : best + 1);
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double sc = score(c);
    double sd = score(d);
    while (b - a > tol.x_tol) {
        if (sc > sd || (sc == sd && tie == TieBreak::Smallest)) {
            b = d;
            d = c;
            sd = sc;
            c = b - kGolden * (b - a);
            sc = score(c);
        } else {
            a = c;
            c = d;
            sc = sd;
            d = a + kGolden * (b - a);
            sd = score(d);
        }
    }
    const double refined = 0.5 * (a + b);
    const double refined_score = score(refined);
    if (refined_score > best_score) {
        return {refined, sign * refined_score};
    }
    const double xb = node(best);
    return {xb, f(xb)};
}

}  // namespace distdelay
