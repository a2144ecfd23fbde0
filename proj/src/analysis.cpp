#include "distdelay/analysis.hpp"

#include "distdelay/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace distdelay {

namespace {

constexpr double kFTol = 1e-9;
constexpr std::size_t kMaxHopfIndex = 10;

double require_equilibrium(const ReproductionFunction& f, const char* op)
{
    const auto& K = f.equilibrium();
    if (!K) throw RegimeError(std::string(op) + " needs a positive equilibrium, but f(x) < x for all x > 0");
    return *K;
}

double root_tol(double K)
{
    return 1e-6 * std::max(1.0, K);
}

// tau_k = (phase + 2 pi k) / omega until tau_k exceeds `horizon`, capped at k = 10.
std::vector<double> delay_ladder(double phase, double omega, double horizon)
{
    std::vector<double> taus;
    for (std::size_t k = 0; k <= kMaxHopfIndex; ++k) {
        const double tau = (phase + 2.0 * std::numbers::pi * static_cast<double>(k)) / omega;
        taus.push_back(tau);
        if (tau > horizon) break;
    }
    return taus;
}

std::vector<double> f2_roots(const ReproductionFunction& f, double lo, double hi, std::size_t n)
{
    auto g = [&f](double x) { return f(f(x)) - x; };
    std::vector<double> roots;
    const double dx = (hi - lo) / static_cast<double>(n);
    double x_prev = lo;
    double g_prev = g(lo);
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = i == n ? hi : lo + dx * static_cast<double>(i);
        const double gx = g(x);
        if (gx == 0.0) {
            roots.push_back(x);
        } else if ((g_prev > 0.0) != (gx > 0.0) && g_prev != 0.0) {
            double a = x_prev;
            double b = x;
            const bool a_positive = g_prev > 0.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                ((g(mid) > 0.0) == a_positive ? a : b) = mid;
            }
            roots.push_back(0.5 * (a + b));
        }
        x_prev = x;
        g_prev = gx;
    }
    return roots;
}

void fill_map_analysis(StabilityReport& rep, const ReproductionFunction& f)
{
    rep.descriptor = describe(f);
    if (!rep.descriptor.K) return;
    const auto coppel = coppel_global_attractivity(f);
    rep.coppel_pass = coppel.pass;
    rep.two_cycles = two_cycle_scan(f);
    rep.attracting_interval = attracting_interval(f);
    const auto small = small_delay_threshold(f, rep.rate);
    rep.thresholds["general_L"] = small.tau_L;
    if (small.tau_Lstar) rep.thresholds["general_Lstar"] = *small.tau_Lstar;
    rep.hopf_taus_linearized = linearized_hopf_delays(f, rep.rate);
    rep.flags["lipschitz_warning"] = rep.descriptor.lipschitz_warning;
}

}  // namespace

std::string_view to_string(Regime r)
{
    switch (r) {
    case Regime::Extinction: return "extinction";
    case Regime::DelayIndependentGlobal: return "delay_independent_global";
    case Regime::DelayDependent: return "delay_dependent";
    }
    return "unknown";
}

FunctionDescriptor describe(const ReproductionFunction& f)
{
    FunctionDescriptor d;
    const auto lip = lipschitz_constants(f);
    d.K = f.equilibrium();
    d.L = lip.L;
    d.L_star = lip.L_star;
    d.x_max = f.argmax_below_equilibrium();
    d.M = f.max_below_equilibrium();
    d.lipschitz_warning = lip.declared_bound_violated;
    return d;
}

std::vector<double> difference_orbit(const ReproductionFunction& f, double x0, std::size_t n)
{
    if (!(x0 > 0.0)) throw DomainError("difference orbit needs x0 > 0");
    std::vector<double> orbit;
    orbit.reserve(n + 1);
    orbit.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) orbit.push_back(eval(f, orbit.back()));
    return orbit;
}

CoppelResult coppel_global_attractivity(const ReproductionFunction& f, std::size_t scan)
{
    const double K = require_equilibrium(f, "Coppel scan");
    const auto bounds = permanence_bounds(f, K, K);
    const auto roots = f2_roots(f, 1e-6 * K, bounds.B + 1.0, std::max<std::size_t>(scan, 16));
    CoppelResult out{true, {}};
    for (double x : roots) {
        if (std::abs(x - K) > root_tol(K)) out.extra_f2_fixed_points.push_back(x);
    }
    out.pass = out.extra_f2_fixed_points.empty();
    return out;
}

PermanenceBounds permanence_bounds(const ReproductionFunction& f, double observed_min, double observed_max)
{
    const double K = require_equilibrium(f, "permanence bounds");
    if (!(observed_min > 0.0) || !(observed_min <= observed_max) || !std::isfinite(observed_max)) {
        throw DomainError("permanence bounds need 0 < observed_min <= observed_max");
    }
    // Straddle K with lambda = 1/2.
    const double x_min = observed_min >= K ? std::min(observed_min, 0.5 * K) : observed_min;
    const double x_max = observed_max <= K ? std::max(observed_max, 2.0 * K) : observed_max;

    const double f_hi = extremum_points(f, x_min, x_max, ExtremumMode::Max, TieBreak::Greatest).value;
    const double f_lo = extremum_points(f, x_min, x_max, ExtremumMode::Min, TieBreak::Smallest).value;
    const double peak = extremum_points(f, 0.0, K, ExtremumMode::Max, TieBreak::Greatest).value;
    const double B = std::max({f_hi, x_max, peak});
    const double trough = extremum_points(f, K, B, ExtremumMode::Min, TieBreak::Smallest).value;
    const double A = std::min({f_lo, x_min, trough});
    return {A, B};
}

BoundSequence bound_sequences(const ReproductionFunction& f,
                              const PermanenceBounds& start,
                              std::size_t max_iter,
                              double tol)
{
    const double K = require_equilibrium(f, "bound sequences");
    if (!(start.A > 0.0) || !(start.A <= K) || !(K <= start.B)) {
        throw DomainError("bound sequences need starting bounds with 0 < A <= K <= B");
    }
    BoundSequence seq;
    double M = extremum_points(f, start.A, K, ExtremumMode::Max, TieBreak::Greatest).value;
    double m = extremum_points(f, K, std::max(M, K), ExtremumMode::Min, TieBreak::Smallest).value;
    seq.M_list.push_back(M);
    seq.m_list.push_back(m);

    auto finished = [&](double lo, double hi) {
        if (hi <= K + kFTol || lo >= K - kFTol) {
            seq.converged_to_K = true;
            seq.stop = BoundSequence::Stop::Monotone;
            return true;
        }
        if (std::max(hi - K, K - lo) < tol) {
            seq.converged_to_K = true;
            seq.stop = BoundSequence::Stop::Tolerance;
            return true;
        }
        return false;
    };
    if (finished(m, M)) return seq;

    int quiet = 0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        // Monotone in exact arithmetic; the clamps drop refinement noise.
        const double M_next = std::min(M, extremum_points(f, m, M, ExtremumMode::Max, TieBreak::Greatest).value);
        const double m_next =
            std::max(m, extremum_points(f, m, M_next, ExtremumMode::Min, TieBreak::Smallest).value);
        const bool small_change = std::abs(M_next - M) <= 1e-12 * std::abs(M)
                                  && std::abs(m_next - m) <= 1e-12 * std::abs(m);
        M = M_next;
        m = m_next;
        seq.M_list.push_back(M);
        seq.m_list.push_back(m);
        if (finished(m, M)) return seq;
        quiet = small_change ? quiet + 1 : 0;
        if (quiet >= 5) {
            seq.stop = BoundSequence::Stop::Stalled;
            return seq;
        }
    }
    seq.stop = BoundSequence::Stop::MaxIterations;
    return seq;
}

std::pair<double, double> attracting_interval(const ReproductionFunction& f)
{
    const double K = require_equilibrium(f, "attracting interval");
    const double M = extremum_points(f, 0.0, K, ExtremumMode::Max, TieBreak::Greatest).value;
    if (M <= K + kFTol) return {K, K};
    const double m = extremum_points(f, K, M, ExtremumMode::Min, TieBreak::Smallest).value;
    return {m, M};
}

ConditionCheck check_attractivity_condition(const ReproductionFunction& f, std::size_t a_grid)
{
    const double K = require_equilibrium(f, "attractivity condition");
    const std::size_t n = std::max<std::size_t>(a_grid, 4);
    for (std::size_t i = 1; i < n; ++i) {
        const double a = K * static_cast<double>(i) / static_cast<double>(n);
        const auto peak = extremum_points(f, a, K, ExtremumMode::Max, TieBreak::Greatest);
        const double image = f(peak.argpoint);
        if (!(image > K)) continue;
        const double low = extremum_points(f, K, image, ExtremumMode::Min, TieBreak::Smallest).value;
        if (!(low > a)) return {false, a};
    }
    return {true, std::nullopt};
}

SmallDelayThresholds small_delay_threshold(const ReproductionFunction& f, double r)
{
    if (!(r > 0.0)) throw DomainError("small-delay threshold needs r > 0");
    const auto lip = lipschitz_constants(f);
    SmallDelayThresholds out{1.0 / (r * (lip.L + 1.0)), std::nullopt};
    if (lip.L_star) out.tau_Lstar = 1.0 / (r * (*lip.L_star + 1.0));
    return out;
}

std::vector<double> nicholson_hopf_delays(double p, double delta, double a)
{
    if (!(p > 0.0) || !(delta > 0.0) || !(a > 0.0)) throw DomainError("Nicholson parameters must be positive");
    const double aN = std::log(p / delta);
    if (!(aN > 2.0)) throw RegimeError("Hopf delays need p > delta e^2");
    const double root = std::sqrt(aN * (aN - 2.0));
    const double phase = std::asin(root / (aN - 1.0));
    return delay_ladder(phase, delta * root, 100.0 / delta);
}

std::vector<double> linearized_hopf_delays(const ReproductionFunction& f, double r)
{
    if (!(r > 0.0)) throw DomainError("linearised Hopf delays need r > 0");
    const double K = require_equilibrium(f, "linearised Hopf delays");
    const double s = derivative(f, K, 1);
    if (!(s < -1.0)) return {};
    // i w = r(-1 + s e^{-i w tau})  =>  w = r sqrt(s^2 - 1), cos(w tau) = 1/s.
    const double omega = r * std::sqrt(s * s - 1.0);
    return delay_ladder(std::acos(1.0 / s), omega, 100.0 / r);
}

std::vector<TwoCycle> two_cycle_scan(const ReproductionFunction& f)
{
    const double K = require_equilibrium(f, "two-cycle scan");
    const auto coppel = coppel_global_attractivity(f);
    const double tol = root_tol(K);
    std::vector<TwoCycle> cycles;
    for (double lo : coppel.extra_f2_fixed_points) {
        if (lo >= K) continue;
        const double image = f(lo);
        for (double hi : coppel.extra_f2_fixed_points) {
            if (hi <= K) continue;
            if (std::abs(image - hi) < tol && std::abs(f(hi) - lo) < tol) {
                cycles.push_back({lo, hi});
                break;
            }
        }
    }
    return cycles;
}

StabilityReport nicholson_report(double p, double delta, double a)
{
    if (!(p > 0.0) || !(delta > 0.0) || !(a > 0.0)) throw DomainError("Nicholson parameters must be positive");
    const auto f = ReproductionFunction::nicholson(p, delta, a);
    StabilityReport rep;
    rep.model = f.name();
    rep.rate = delta;
    const double e2 = std::exp(2.0);
    if (p <= delta) {
        rep.regime = Regime::Extinction;
    } else if (p < delta * e2) {
        rep.regime = Regime::DelayIndependentGlobal;
    } else {
        rep.regime = Regime::DelayDependent;
    }
    fill_map_analysis(rep, f);
    if (rep.regime == Regime::Extinction) return rep;
    rep.thresholds["tau_57"] = 1.0 / (p + delta);
    rep.thresholds["tau_58"] = 1.0 / (p / e2 + delta);
    rep.thresholds["tau_GL"] = std::log(1.0 + delta / (p - delta)) / delta;
    if (p > delta * e2) {
        rep.hopf_taus = nicholson_hopf_delays(p, delta, a);
        rep.thresholds["tau0"] = rep.hopf_taus.front();
        if (!rep.hopf_taus_linearized.empty()) {
            const double t0 = rep.hopf_taus.front();
            const double t1 = rep.hopf_taus_linearized.front();
            rep.thresholds["tau0_linearized"] = t1;
            const bool differ = std::abs(t0 - t1) > 1e-6 * std::max(1.0, t1);
            rep.flags["hopf_formula_discrepancy"] = differ;
            if (differ) {
                rep.notes.push_back("closed-form tau_0 (arcsin branch) differs from the first imaginary-axis "
                                    "crossing of the linearised equation (arccos branch)");
            }
        }
    }
    return rep;
}

StabilityReport mackey_glass_report(double a, double b, double gamma)
{
    if (!(a > 0.0) || !(b > 0.0) || !(gamma > 0.0)) {
        throw DomainError("Mackey-Glass parameters must be positive");
    }
    const auto f = ReproductionFunction::mackey_glass(a, b, gamma);
    StabilityReport rep;
    rep.model = f.name();
    rep.rate = b;
    if (a <= b) {
        rep.regime = Regime::Extinction;
    } else if (gamma <= 2.0 || a < gamma * b / (gamma - 2.0)) {
        rep.regime = Regime::DelayIndependentGlobal;
    } else {
        rep.regime = Regime::DelayDependent;
    }
    fill_map_analysis(rep, f);
    if (rep.regime == Regime::Extinction) return rep;
    if (gamma > 1.0) {
        const double g1 = (gamma - 1.0) * (gamma - 1.0);
        const double quadratic = 4.0 * b * b * gamma / (a * a * g1 + 4.0 * a * b * gamma);
        const double lstar = 4.0 * gamma / (a * g1 + 4.0 * b * gamma);
        rep.thresholds["tau_mg_quadratic"] = quadratic;
        rep.thresholds["tau_mg_lstar"] = lstar;
        const bool differ = std::abs(quadratic - lstar) > 1e-12 * std::max(quadratic, lstar);
        rep.flags["mg_threshold_discrepancy"] = differ;
        if (differ) {
            rep.notes.push_back("tau_mg_quadratic = 4b^2 g/(a^2(g-1)^2 + 4abg) differs from "
                                "tau_mg_lstar = 1/(b(L*+1)); they agree only when b^2 = a");
        }
    }
    return rep;
}

StabilityReport generic_report(const ReproductionFunction& f, double r)
{
    if (!(r > 0.0)) throw DomainError("report needs r > 0");
    StabilityReport rep;
    rep.model = f.name();
    rep.rate = r;
    if (!f.equilibrium()) {
        rep.regime = Regime::Extinction;
        rep.descriptor = describe(f);
        return rep;
    }
    fill_map_analysis(rep, f);
    rep.regime = rep.coppel_pass ? Regime::DelayIndependentGlobal : Regime::DelayDependent;
    return rep;
}

}  // namespace distdelay
