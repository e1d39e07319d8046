#include "superint/actions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "superint/errors.hpp"
#include "superint/quadrature.hpp"

namespace superint {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

double unit(double) { return 1.0; }

/// Root of g on [lo, hi] (g(lo), g(hi) of opposite sign) to full precision.
template <class G>
double solve_bracketed(G g, double lo, double hi)
{
    double glo = g(lo);
    double ghi = g(hi);
    if (glo == 0) return lo;
    if (ghi == 0) return hi;
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 1);
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, iters);
    return 0.5 * (a + b);
}

std::string fmt_constants(const SeparationConstants& c)
{
    std::ostringstream os;
    os.precision(17);
    os << "(E=" << c.E << ", L=" << c.L << ")";
    return os.str();
}

double safe_effective(const Model& model, double L, double r)
{
    try {
        return effective_potential(model, L, r);
    } catch (const DomainError&) {
        return inf;
    }
}

}  // namespace

double effective_potential(const Model& model, double L, double r)
{
    const double s = s_k(model.curv, r);
    if (s == 0) throw DomainError("effective potential singular at s_k(r) = 0");
    return radial_value(model.radial, model.curv, r) + L / (s * s);
}

double radial_gap(const Model& model, const SeparationConstants& consts, double r)
{
    return consts.E - effective_potential(model, consts.L, r);
}

double effective_minimum(const Model& model, double L)
{
    const double upper = radial_upper_limit(model.radial, model.curv);
    std::vector<double> grid;
    if (std::isfinite(upper)) {
        constexpr int N = 400;
        for (int i = 1; i < N; ++i) grid.push_back(upper * i / N);
    } else {
        const double hi = model.curv.k < 0 ? 200.0 / std::sqrt(-model.curv.k) : 1e8;
        const double lo = 1e-8;
        constexpr int N = 800;
        for (int i = 0; i <= N; ++i) grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / N));
    }
    std::size_t best = 0;
    double vbest = inf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = safe_effective(model, L, grid[i]);
        if (v < vbest) {
            vbest = v;
            best = i;
        }
    }
    if (!std::isfinite(vbest)) throw NoBoundedMotion("effective potential is nowhere finite");
    if (best == 0 || best + 1 == grid.size()) return grid[best];
    auto f = [&](double r) { return safe_effective(model, L, r); };
    const auto res = boost::math::tools::brent_find_minima(f, grid[best - 1], grid[best + 1],
                                                           std::numeric_limits<double>::digits / 2);
    return res.first;
}

std::pair<double, double> radial_turning_points(const Model& model, const SeparationConstants& consts)
{
    const double rstar = effective_minimum(model, consts.L);
    auto W = [&](double r) { return radial_gap(model, consts, r); };
    if (!(W(rstar) > 0)) {
        // circular-orbit threshold: the two roots coincide
        if (std::abs(W(rstar)) <= 1e-14 * std::max(1.0, std::abs(consts.E))) return {rstar, rstar};
        throw NoBoundedMotion("E below the effective-potential minimum at " + fmt_constants(consts));
    }

    double lo = rstar;
    bool found = false;
    for (int j = 0; j < 200; ++j) {
        lo *= 0.5;
        double w = 0;
        try {
            w = W(lo);
        } catch (const DomainError&) {
            found = true;  // singular wall
            break;
        }
        if (w < 0) {
            found = true;
            break;
        }
    }
    if (!found) throw NoBoundedMotion("no inner turning point at " + fmt_constants(consts));

    const double upper = radial_upper_limit(model.radial, model.curv);
    double hi = rstar;
    found = false;
    for (int j = 1; j < 200; ++j) {
        hi = std::isfinite(upper) ? upper - (upper - rstar) * std::pow(0.5, j) : rstar * std::pow(2.0, j);
        if (!std::isfinite(upper) && model.curv.k < 0 && hi * std::sqrt(-model.curv.k) > 300.0) break;
        if (!std::isfinite(upper) && hi > 1e150) break;
        double w = 0;
        try {
            w = W(hi);
        } catch (const DomainError&) {
            break;
        }
        if (w < 0) {
            found = true;
            break;
        }
        if (hi == upper) break;
    }
    if (!found) throw NoBoundedMotion("radial motion is unbounded at " + fmt_constants(consts));

    // lo may sit on a singular wall; pull it in until W is finite and negative
    auto W_safe = [&](double r) {
        try {
            return W(r);
        } catch (const DomainError&) {
            return -inf;
        }
    };
    if (!std::isfinite(W_safe(lo))) {
        double a = lo;
        double b = rstar;
        for (int j = 0; j < 200 && !(std::isfinite(W_safe(a)) && W_safe(a) < 0); ++j) a = 0.5 * (a + b);
        lo = a;
    }
    const double r_min = solve_bracketed(W_safe, lo, rstar);
    const double r_max = solve_bracketed(W_safe, rstar, hi);
    return {r_min, r_max};
}

std::pair<double, double> angular_turning_points(const AngularFamily& fam, double L)
{
    if (!(L > fam.c0)) {
        if (L == fam.c0) {
            const double p0 = angular_domain(fam).phi0;
            return {p0, p0};
        }
        throw NoBoundedMotion("L below the angular minimum c0");
    }
    const AngularDomain dom = angular_domain(fam);
    const double gap = one_minus_f_of_c(fam, L);
    auto h = [&](double phi) { return ftilde_parts(fam, phi).one_minus - gap; };
    return {solve_bracketed(h, dom.phi_tilde, dom.phi0), solve_bracketed(h, dom.phi0, dom.phi_end)};
}

TurningPoints turning_points(const Model& model, const SeparationConstants& consts)
{
    TurningPoints tp;
    std::tie(tp.r_min, tp.r_max) = radial_turning_points(model, consts);
    if (is_central(model)) {
        if (consts.L < 0) throw NoBoundedMotion("central model requires L >= 0");
        tp.phi_min = tp.phi_max = std::numeric_limits<double>::quiet_NaN();
    } else {
        std::tie(tp.phi_min, tp.phi_max) = angular_turning_points(family_of(model), consts.L);
    }
    return tp;
}

double radial_action_quadrature(const Model& model, const SeparationConstants& consts)
{
    const auto [a, b] = radial_turning_points(model, consts);
    auto g = [&](double r) { return std::sqrt(2.0 * std::max(radial_gap(model, consts, r), 0.0)); };
    return integrate_libration(g, a, b) / pi;
}

double angular_action_quadrature(const AngularFamily& fam, double L)
{
    const auto [a, b] = angular_turning_points(fam, L);
    auto g = [&](double phi) { return std::sqrt(2.0 * std::max(L - angular_value(fam, phi), 0.0)); };
    return integrate_libration(g, a, b) / pi;
}

double angular_action_closed(const AngularFamily& fam, double L)
{
    if (!(L >= fam.c0)) throw DomainError("angular action requires L >= c0");
    const double v = nu(fam);
    if (const auto* osc = std::get_if<OscillatorLink>(&fam.link)) {
        if (!(fam.c0 + osc->gamma > 0)) throw DomainError("gamma + c0 must be > 0");
        return std::sqrt(2.0) / v * (std::sqrt(L + osc->gamma) - std::sqrt(fam.c0 + osc->gamma));
    }
    const auto& link = std::get<KeplerLink>(fam.link);
    const double sF = std::sqrt(link.F);
    if (!(fam.c0 + link.B - sF > 0)) throw DomainError("c0 + B - sqrt(F) must be > 0");
    auto sum = [&](double x) { return std::sqrt(x + link.B + sF) + std::sqrt(x + link.B - sF); };
    return (sum(L) - sum(fam.c0)) / (std::sqrt(2.0) * v);
}

double angular_action_derivative(const AngularFamily& fam, double L)
{
    const double v = nu(fam);
    if (const auto* osc = std::get_if<OscillatorLink>(&fam.link)) {
        if (!(L + osc->gamma > 0)) throw DomainError("L + gamma must be > 0");
        return 1.0 / (std::sqrt(2.0) * v * std::sqrt(L + osc->gamma));
    }
    const auto& link = std::get<KeplerLink>(fam.link);
    const double sF = std::sqrt(link.F);
    if (!(L + link.B - sF > 0)) throw DomainError("L + B - sqrt(F) must be > 0");
    return (1.0 / std::sqrt(L + link.B + sF) + 1.0 / std::sqrt(L + link.B - sF)) / (2.0 * std::sqrt(2.0) * v);
}

double angular_action(const Model& model, double L)
{
    if (is_central(model)) {
        if (!(L >= 0)) throw DomainError("central model requires L >= 0");
        return std::sqrt(2.0 * L);
    }
    return angular_action_closed(family_of(model), L);
}

double angular_action_derivative(const Model& model, double L)
{
    if (is_central(model)) {
        if (!(L > 0)) throw DomainError("central model requires L > 0");
        return 1.0 / std::sqrt(2.0 * L);
    }
    return angular_action_derivative(family_of(model), L);
}

ActionPair actions(const Model& model, const SeparationConstants& consts)
{
    return {radial_action_quadrature(model, consts), angular_action(model, consts.L), consts};
}

double dJr_dL(const RadialPotential& radial, double L)
{
    if (const auto* osc = std::get_if<Oscillator>(&radial)) {
        if (!(L + osc->gamma > 0)) throw DomainError("dJr/dL requires L + gamma > 0");
        return -1.0 / (2.0 * std::sqrt(2.0) * std::sqrt(L + osc->gamma));
    }
    if (const auto* kep = std::get_if<GeneralizedKepler>(&radial)) {
        const double sF = std::sqrt(kep->F);
        if (!(L + kep->B - sF > 0)) throw DomainError("dJr/dL requires L + B - sqrt(F) > 0");
        return -(1.0 / std::sqrt(L + kep->B + sF) + 1.0 / std::sqrt(L + kep->B - sF)) / (2.0 * std::sqrt(2.0));
    }
    throw DomainError("no closed-form dJr/dL for " + describe(radial));
}

double dJr_dL(const Model& model, const SeparationConstants& consts) { return dJr_dL(model.radial, consts.L); }

double dJr_dL_quadrature(const Model& model, const SeparationConstants& consts)
{
    const auto [a, b] = radial_turning_points(model, consts);
    auto u = [&](double r) {
        const double s = s_k(model.curv, r);
        return 1.0 / (s * s);
    };
    auto W = [&](double r) { return 2.0 * radial_gap(model, consts, r); };
    return -integrate_inverse_sqrt(u, W, a, b) / pi;
}

double period_T(const AngularFamily& fam, double L) { return 2.0 * pi * angular_action_derivative(fam, L); }

double period_T_quadrature(const AngularFamily& fam, double L)
{
    const auto [a, b] = angular_turning_points(fam, L);
    auto W = [&](double phi) { return L - angular_value(fam, phi); };
    return std::sqrt(2.0) * integrate_inverse_sqrt(unit, W, a, b);
}

double radial_period(const Model& model, const SeparationConstants& consts)
{
    const auto [a, b] = radial_turning_points(model, consts);
    auto W = [&](double r) { return radial_gap(model, consts, r); };
    return std::sqrt(2.0) * integrate_inverse_sqrt(unit, W, a, b);
}

CombinationReport action_combination_check(const Model& model, double E, const std::vector<double>& L_grid, int m,
                                           int n, double tolerance)
{
    CombinationReport rep;
    rep.L_values = L_grid;
    for (double L : L_grid) {
        const SeparationConstants c{E, L};
        rep.combination.push_back(m * radial_action_quadrature(model, c) + n * angular_action(model, L));
    }
    if (rep.combination.empty()) return rep;
    const auto [lo, hi] = std::minmax_element(rep.combination.begin(), rep.combination.end());
    double sum = 0;
    for (double v : rep.combination) sum += v;
    rep.mean = sum / static_cast<double>(rep.combination.size());
    rep.relative_spread = (*hi - *lo) / std::abs(rep.mean);
    rep.pass = rep.relative_spread < tolerance;
    return rep;
}

SubstitutionSplit substitution_split(const AngularFamily& fam, double L)
{
    SubstitutionSplit out;
    const auto [a, b] = angular_turning_points(fam, L);
    auto W = [&](double phi) { return L - angular_value(fam, phi); };
    out.full = integrate_inverse_sqrt(unit, W, a, b);

    const double fL = 1.0 - one_minus_f_of_c(fam, L);
    auto Wf = [&](double f) { return (1.0 - f) * (1.0 + f) * (L - c_of_ftilde(fam, std::min(f, 1.0))); };
    out.arccos_term = integrate_inverse_sqrt(unit, Wf, fL, 1.0) / nu(fam);

    const double v = nu(fam);
    auto dG = [&](double phi) {
        const double f = ftilde_of_phi(fam, phi);
        const double q = fam.alpha * f + fam.beta;
        const double root = std::sqrt(std::max(1.0 - q * q, 0.0));
        if (root == 0 || fam.alpha == 0) return 0.0;
        return fam.alpha * ftilde_derivative(fam, phi) / (2.0 * v * root);
    };
    const double phi0 = angular_domain(fam).phi0;
    out.g_term = integrate_inverse_sqrt_from(dG, W, a, phi0, b - a) - integrate_inverse_sqrt_from(dG, W, b, phi0, b - a);
    return out;
}

std::vector<double> default_L_grid(const AngularFamily& fam, int count, double lo, double hi)
{
    const double depth = well_depth(fam);
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
        const double t = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
        out.push_back(fam.c0 + depth * lo * std::pow(hi / lo, t));
    }
    return out;
}

}  // namespace superint
