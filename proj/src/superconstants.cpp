#include "superint/superconstants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "superint/errors.hpp"
#include "superint/quadrature.hpp"

namespace superint {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Below this fraction of the well depth Z and Y use the endpoint expansion
// 2 sqrt(gap) / |slope| on the quadrature path.
constexpr double local_fraction = 1e-9;

// Below this fraction of the well depth the momentum fixes the coordinate.
constexpr double onshell_fraction = 0.1;

double unit(double) { return 1.0; }

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// pi/2 + arcsin(X) given 1 - X^2 computed without cancellation.
double half_pi_plus_asin(double X, double one_minus_sq)
{
    X = clamp_unit(X);
    one_minus_sq = std::max(one_minus_sq, 0.0);
    if (X < 0.0) {
        const double t = one_minus_sq / (1.0 - X);  // 1 + X
        return 2.0 * std::asin(std::sqrt(std::min(0.5 * t, 1.0)));
    }
    const double t = one_minus_sq / (1.0 + X);  // 1 - X
    return pi - 2.0 * std::asin(std::sqrt(std::min(0.5 * t, 1.0)));
}

struct OscillatorLinkData {
    double gamma;
    double c0;
};

std::optional<OscillatorLinkData> oscillator_like(const AngularFamily& fam)
{
    if (const auto* o = std::get_if<OscillatorLink>(&fam.link)) return OscillatorLinkData{o->gamma, fam.c0};
    const auto& kl = std::get<KeplerLink>(fam.link);
    if (kl.F == 0.0) return OscillatorLinkData{kl.B, fam.c0};
    return std::nullopt;
}

Side side_of(const AngularFamily& fam, double phi) { return phi < angular_domain(fam).phi0 ? Side::left : Side::right; }

// Position on the angular level set: gap = L - c(phi), rise = c(phi) - c0.
// Each is computed where it is small and the other by subtraction.
struct Level {
    double gap;
    double rise;
};

// c - c0 from 1 - f~ (Newton on the cancellation-free 1 - f(c)).
double rise_of(const AngularFamily& fam, const FtildeParts& parts)
{
    const double om = std::max(parts.one_minus, 0.0);
    if (auto d = oscillator_like(fam)) return (d->gamma + d->c0) * om / parts.one_plus;
    double c = c_of_ftilde(fam, std::min(parts.value, 1.0));
    for (int i = 0; i < 3; ++i) {
        const double slope = -f_prime_of_c(fam, c);
        if (!(slope > 0.0)) break;
        c -= (one_minus_f_of_c(fam, c) - om) / slope;
        c = std::max(c, fam.c0);
    }
    return c - fam.c0;
}

// Within 1e-9 of a turning point the linear term gives the gap, since
// phi - end is exact there and L - c(phi) is not.
Level angular_level(const AngularFamily& fam, double L, double a, double b, double phi)
{
    const double depth = L - fam.c0;
    const double width = b - a;
    double gap = -1.0;
    if (phi - a < 1e-9 * width) gap = std::abs(angular_derivative(fam, a)) * std::max(phi - a, 0.0);
    if (b - phi < 1e-9 * width) gap = std::abs(angular_derivative(fam, b)) * std::max(b - phi, 0.0);
    if (gap >= 0.0) return {gap, depth - gap};
    const double rise = rise_of(fam, ftilde_parts(fam, phi));
    if (rise < 0.5 * depth) return {std::max(depth - rise, 0.0), rise};
    gap = std::max(L - angular_value(fam, phi), 0.0);
    return {gap, depth - gap};
}

double radial_gap_slope(const Model& model, const SeparationConstants& consts, double r)
{
    const double s = s_k(model.curv, r);
    return -radial_derivative(model.radial, model.curv, r) + 2.0 * consts.L * s_k_prime(model.curv, r) / (s * s * s);
}

double radial_position_gap(const Model& model, const SeparationConstants& consts, double a, double b, double r)
{
    const double width = b - a;
    if (r - a < 1e-9 * width) return std::abs(radial_gap_slope(model, consts, a)) * std::max(r - a, 0.0);
    if (b - r < 1e-9 * width) return std::abs(radial_gap_slope(model, consts, b)) * std::max(b - r, 0.0);
    return std::max(radial_gap(model, consts, r), 0.0);
}

// Oscillator link, general beta; gap = L - c(phi). E1 is the arcsin part,
// E2 the elliptic part (zero at both turning points).
double z_closed_oscillator(const AngularFamily& fam, const OscillatorLinkData& d, double L, double phi, Level lv)
{
    const double gap = lv.gap;
    const double v = nu(fam);
    const double A = L + d.gamma;
    const double K = d.gamma + d.c0;
    const double depth = L - d.c0;
    const double alpha = fam.alpha;
    const double delta = fam.alpha - fam.beta;
    if (!(1.0 + delta > 0.0)) throw DomainError("closed-form Z needs alpha - beta > -1");

    // 1 - f~ = 2 rise / (c + gamma) and 1 + f~ = 2 K / (c + gamma).
    const double cg = lv.rise + K;
    const double om = 2.0 * lv.rise / cg;
    const double op = 2.0 * K / cg;
    // arg = (A f~ - K)/(L - c0); 1 + arg = (1 + f~) gap/depth, 1 - arg = A (1 - f~)/depth.
    const double arg = 1.0 - A * om / depth;
    const double e1 = half_pi_plus_asin(arg, (op * gap / depth) * (A * om / depth)) / (2.0 * v * std::sqrt(A));
    const double e1_top = pi / (2.0 * v * std::sqrt(A));

    double e2 = 0.0;
    if (alpha != 0.0) {
        const double M = (1.0 - delta) * A + 2.0 * alpha * K;
        const double T = (1.0 + delta) * A - 2.0 * alpha * K;
        if (!(M > 0.0) || !(T > 0.0)) throw DomainError("closed-form Z: elliptic parameters out of range");
        const double s2 = std::clamp((1.0 + delta) * gap / T, 0.0, 1.0);
        EllipticArgs args;
        args.Lambda = std::asin(std::sqrt(s2));
        args.Omega = T / ((1.0 + delta) * A);
        args.Upsilon = std::sqrt(std::max((1.0 - delta) * T / ((1.0 + delta) * M), 0.0));
        e2 = (alpha * K / v) * 2.0 / (A * std::sqrt((1.0 + delta) * M)) * ellip_pi(args);
    }
    if (side_of(fam, phi) == Side::left) return e1 + e2;
    return 2.0 * e1_top - e1 + e2;
}

// Generalized-Kepler link with beta = 0; gap = L - c(phi).
double z_closed_kepler(const AngularFamily& fam, double L, double phi, Level lv)
{
    const double gap = lv.gap;
    const auto& kl = std::get<KeplerLink>(fam.link);
    const double v = nu(fam);
    const double F = kl.F;
    const double sF = std::sqrt(F);
    const double P = kepler_J(fam) + kl.B;
    const double u3 = L + kl.B;
    const double alpha = fam.alpha;
    const double u = lv.rise < gap ? fam.c0 + kl.B + lv.rise : u3 - gap;

    double e1 = 0.0;
    double e1_top = 0.0;
    for (double s : {sF, -sF}) {
        const double coef = 0.5 * (P - s);
        const double k1 = -(P - s) * (P - s);
        const double k2 = u3 - s;
        const double a = -2.0 * P;
        const double b = 2.0 * P * k2 - k1;
        const double cc = k1 * k2;
        const double disc = std::sqrt(b * b - 4.0 * a * cc);
        // pi/2 - arcsin X = pi/2 + arcsin(-X). The roots of a w^2 + b w + cc
        // are w = L + B - s and w = c0 + B - s, so
        // 1 - X^2 = 4 a cc gap rise / (w disc)^2.
        auto piece = [&](double uu, double g, double rise) {
            const double w = uu - s;
            const double X = (b * w + 2.0 * cc) / (w * disc);
            const double one_minus_sq = 4.0 * a * cc * g * rise / (w * w * disc * disc);
            return coef / std::sqrt(-cc) * half_pi_plus_asin(-X, one_minus_sq);
        };
        e1 += piece(u, gap, lv.rise);
        e1_top += piece(fam.c0 + kl.B, L - fam.c0, 0.0);
    }
    e1 /= 2.0 * v;
    e1_top /= 2.0 * v;

    double e2 = 0.0;
    if (alpha != 0.0) {
        const double a2 = alpha * alpha;
        const double root = std::sqrt(a2 * P * P + F * (1.0 - a2));
        const double r_plus = (-a2 * P + root) / (1.0 - a2);
        const double r_minus = (-a2 * P - root) / (1.0 - a2);
        if (!(u3 > r_plus)) throw DomainError("closed-form Z: L below the elliptic branch point");
        const double k = std::sqrt((u3 - r_plus) / (u3 - r_minus));
        const double s2 = std::clamp(gap / (u3 - r_plus), 0.0, 1.0);
        const double Lambda = std::asin(std::sqrt(s2));
        for (double s : {sF, -sF}) {
            const double coef = 0.5 * (P - s);
            const EllipticArgs args{Lambda, (u3 - r_plus) / (u3 - s), k};
            e2 += coef * 2.0 / ((u3 - s) * std::sqrt((1.0 - a2) * (u3 - r_minus))) * ellip_pi(args);
        }
        e2 *= alpha / (2.0 * v);
    }
    if (side_of(fam, phi) == Side::left) return e1 + e2;
    return 2.0 * e1_top - e1 + e2;
}

double z_closed_level(const AngularFamily& fam, double L, double phi, Level lv)
{
    if (!has_z_closed(fam)) throw DomainError("no closed form of Z for this family");
    if (auto d = oscillator_like(fam)) return z_closed_oscillator(fam, *d, L, phi, lv);
    return z_closed_kepler(fam, L, phi, lv);
}

// W = E - a - L/r^2 (the radial gap).
double y_closed_oscillator(const Oscillator& o, const SeparationConstants& cs, double r, double W)
{
    const double A = cs.L + o.gamma;
    const double disc = cs.E * cs.E - 4.0 * o.omega * A;
    if (!(disc > 0.0) || !(A > 0.0)) throw DomainError("closed-form Y: no bounded radial motion");
    const double X = (cs.E * r * r - 2.0 * A) / (r * r * std::sqrt(disc));
    return half_pi_plus_asin(X, 4.0 * A * W / (r * r * disc)) / (2.0 * std::sqrt(A));
}

double kepler_delta(const GeneralizedKepler& g, const SeparationConstants& cs)
{
    return 1.0 + 4.0 * (cs.E / g.D) * (g.B + cs.L + cs.E * g.F / g.D);
}

double y_closed_kepler(const GeneralizedKepler& g, const SeparationConstants& cs, double r, double W)
{
    const double Delta = kepler_delta(g, cs);
    if (!(Delta > 0.0)) throw DomainError("closed-form Y: no bounded radial motion");
    const double sF = std::sqrt(g.F);
    const double u3 = cs.L + g.B;
    const double v = std::sqrt(g.D * r * r + g.F);
    double y = 0.0;
    for (double sigma : {1.0, -1.0}) {
        const double q = u3 - sigma * sF;
        const double w = v - sigma * sF;
        const double X = ((1.0 + 2.0 * sigma * sF * cs.E / g.D) - 2.0 * q / w) / std::sqrt(Delta);
        y += half_pi_plus_asin(X, 4.0 * q * r * r * W / (w * w * Delta)) / (2.0 * std::sqrt(q));
    }
    return y;
}

double y_closed_gap(const Model& model, const SeparationConstants& consts, double r, double W)
{
    if (!has_y_closed(model)) throw DomainError("no closed form of Y for this model");
    if (const auto* o = std::get_if<Oscillator>(&model.radial)) return y_closed_oscillator(*o, consts, r, W);
    return y_closed_kepler(std::get<GeneralizedKepler>(model.radial), consts, r, W);
}

double z_partial(const AngularFamily& fam, double L, double a, double b, double phi, double full)
{
    auto W = [&](double p) { return L - angular_value(fam, p); };
    return integrate_inverse_sqrt_partial(unit, W, a, b, std::clamp(phi, a, b), full);
}

double y_partial(const Model& model, const SeparationConstants& consts, double a, double b, double r, double full)
{
    if (a == b) return 0.0;
    auto u = [&](double x) {
        const double s = s_k(model.curv, x);
        return 1.0 / (s * s);
    };
    auto W = [&](double x) { return radial_gap(model, consts, x); };
    return integrate_inverse_sqrt_partial(u, W, a, b, std::clamp(r, a, b), full);
}

template <class G>
double root_between(G g, double lo, double hi)
{
    const double glo = g(lo);
    const double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0.0) == (ghi > 0.0)) return std::abs(glo) < std::abs(ghi) ? lo : hi;
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, iters);
    return 0.5 * (a + b);
}

double continued(double value, double full, bool positive) { return positive ? value : 2.0 * full - value; }

// Z(phi) at a state. Near a turning point the gap is p_phi^2/2 and phi is
// moved onto the level set.
double z_at(const PhaseContext& ctx, const AngularFamily& fam, const PhaseState& st, PhasePath path)
{
    const double L = ctx.consts.L;
    const double a = ctx.tp.phi_min;
    const double b = ctx.tp.phi_max;
    const double depth = L - fam.c0;
    const double half = 0.5 * st.p_phi * st.p_phi;
    const double phi0 = angular_domain(fam).phi0;
    double phi = std::clamp(st.phi, a, b);
    Level lv{};
    if (half < onshell_fraction * depth) {
        const bool left = phi < phi0;
        if (path == PhasePath::quadrature && half < local_fraction * depth) {
            const double edge = 2.0 * std::sqrt(half) / (left ? ctx.z_slope_lo : ctx.z_slope_hi);
            return left ? edge : ctx.Z_full - edge;
        }
        auto g = [&](double x) { return L - angular_value(fam, x) - half; };
        phi = left ? root_between(g, a, phi0) : root_between(g, phi0, b);
        lv = {half, depth - half};
    } else {
        lv = angular_level(fam, L, a, b, phi);
    }
    if (path == PhasePath::closed) return z_closed_level(fam, L, phi, lv);
    return z_partial(fam, L, a, b, phi, ctx.Z_full);
}

double y_at(const PhaseContext& ctx, const PhaseState& st, PhasePath path)
{
    const double a = ctx.tp.r_min;
    const double b = ctx.tp.r_max;
    if (a == b) return 0.0;
    const double top = radial_gap(ctx.model, ctx.consts, ctx.r_star);
    const double half = 0.5 * st.p_r * st.p_r;
    double r = std::clamp(st.r, a, b);
    double gap = 0.0;
    if (half < onshell_fraction * top) {
        const bool left = r < ctx.r_star;
        if (path == PhasePath::quadrature && half < local_fraction * top) {
            const double edge = 2.0 * std::sqrt(half) / (left ? ctx.y_slope_lo : ctx.y_slope_hi);
            return left ? edge : ctx.Y_full - edge;
        }
        auto g = [&](double x) { return radial_gap(ctx.model, ctx.consts, x) - half; };
        r = left ? root_between(g, a, ctx.r_star) : root_between(g, ctx.r_star, b);
        gap = half;
    } else {
        gap = radial_position_gap(ctx.model, ctx.consts, a, b, r);
    }
    if (path == PhasePath::closed) return y_closed_gap(ctx.model, ctx.consts, r, gap);
    return y_partial(ctx.model, ctx.consts, a, b, r, ctx.Y_full);
}

// Cold Z~ and Y~ in [0, 2 Z_full) x [0, 2 Y_full).
std::pair<double, double> cold_parts(const PhaseContext& ctx, const PhaseState& st, PhasePath path)
{
    const double y_tilde = continued(y_at(ctx, st, path), ctx.Y_full, st.p_r >= 0.0);
    double z_tilde = 0.0;
    if (is_central(ctx.model)) {
        const double z = st.phi / std::sqrt(ctx.consts.L);
        z_tilde = st.p_phi >= 0.0 ? z : -z;
    } else {
        z_tilde = continued(z_at(ctx, family_of(ctx.model), st, path), ctx.Z_full, st.p_phi >= 0.0);
    }
    return {z_tilde, y_tilde};
}

}  // namespace

// ---------------------------------------------------------------------------

double z_integral(const AngularFamily& fam, double L, double phi)
{
    const auto [a, b] = angular_turning_points(fam, L);
    return z_partial(fam, L, a, b, phi, nan);
}

double z_full(const AngularFamily& fam, double L)
{
    const auto [a, b] = angular_turning_points(fam, L);
    auto W = [&](double p) { return L - angular_value(fam, p); };
    return integrate_inverse_sqrt(unit, W, a, b);
}

double y_integral(const Model& model, const SeparationConstants& consts, double r)
{
    const auto [a, b] = radial_turning_points(model, consts);
    return y_partial(model, consts, a, b, r, nan);
}

double y_full(const Model& model, const SeparationConstants& consts)
{
    const auto [a, b] = radial_turning_points(model, consts);
    if (a == b) return 0.0;
    auto u = [&](double x) {
        const double s = s_k(model.curv, x);
        return 1.0 / (s * s);
    };
    auto W = [&](double x) { return radial_gap(model, consts, x); };
    return integrate_inverse_sqrt(u, W, a, b);
}

bool has_z_closed(const AngularFamily& fam)
{
    if (oscillator_like(fam)) return 1.0 + fam.alpha - fam.beta > 0.0;
    return fam.beta == 0.0;
}

double z_closed(const AngularFamily& fam, double L, double phi)
{
    const auto [a, b] = angular_turning_points(fam, L);
    phi = std::clamp(phi, a, b);
    return z_closed_level(fam, L, phi, angular_level(fam, L, a, b, phi));
}

bool has_y_closed(const Model& model)
{
    return model.curv.k == 0.0 && !std::holds_alternative<PowerLaw>(model.radial);
}

double y_closed(const Model& model, const SeparationConstants& consts, double r)
{
    const auto [a, b] = radial_turning_points(model, consts);
    r = std::clamp(r, a, b);
    return y_closed_gap(model, consts, r, radial_position_gap(model, consts, a, b, r));
}

// ---------------------------------------------------------------------------

PhaseContext make_phase_context(const Model& model, const SeparationConstants& consts)
{
    PhaseContext ctx;
    ctx.model = model;
    ctx.consts = consts;
    ctx.tp = turning_points(model, consts);
    ctx.m = model_m(model);
    ctx.n = model_n(model);
    if (!is_central(model)) ctx.Z_full = z_full(family_of(model), consts.L);
    ctx.Y_full = y_full(model, consts);
    ctx.r_star = effective_minimum(model, consts.L);
    if (!is_central(model)) {
        const auto& fam = family_of(model);
        ctx.z_slope_lo = std::abs(angular_derivative(fam, ctx.tp.phi_min));
        ctx.z_slope_hi = std::abs(angular_derivative(fam, ctx.tp.phi_max));
    }
    if (ctx.tp.r_min < ctx.tp.r_max) {
        const double s_lo = s_k(model.curv, ctx.tp.r_min);
        const double s_hi = s_k(model.curv, ctx.tp.r_max);
        ctx.y_slope_lo = s_lo * s_lo * std::abs(radial_gap_slope(model, consts, ctx.tp.r_min));
        ctx.y_slope_hi = s_hi * s_hi * std::abs(radial_gap_slope(model, consts, ctx.tp.r_max));
    }
    ctx.factor = 0.5 * std::sqrt(2.0) * ctx.m / angular_action_derivative(model, consts.L);
    return ctx;
}

PhaseContext make_phase_context(const Model& model, const PhaseState& state)
{
    return make_phase_context(model, SeparationConstants{hamiltonian(model, state), liouville_l(model, state.phi, state.p_phi)});
}

PhaseValue phase_phi(const PhaseContext& ctx, const PhaseState& state, PhasePath path)
{
    const auto [z, y] = cold_parts(ctx, state, path);
    PhaseValue pv;
    pv.Z_tilde = z;
    pv.Y_tilde = y;
    pv.Phi = ctx.factor * (z - y);
    return pv;
}

PhaseValue phase_phi(const Model& model, const PhaseState& state, PhasePath path)
{
    return phase_phi(make_phase_context(model, state), state, path);
}

PhaseAccumulator::PhaseAccumulator(PhaseContext ctx, PhasePath path, double max_jump_fraction)
    : ctx_(std::move(ctx)), path_(path), max_jump_fraction_(max_jump_fraction)
{
}

namespace {

// Picks the winding that keeps the unwrapped value closest to the previous one.
long track(double cold, double period, double prev_unwrapped, long winding, double max_jump, const char* what)
{
    if (period <= 0.0) return winding;
    long best = winding;
    double best_jump = std::numeric_limits<double>::infinity();
    for (long w = winding - 1; w <= winding + 1; ++w) {
        const double jump = std::abs(cold + w * period - prev_unwrapped);
        if (jump < best_jump) {
            best_jump = jump;
            best = w;
        }
    }
    if (best_jump > max_jump * period)
        throw BranchTrackingError(std::string(what) + " jumped by " + std::to_string(best_jump / period) +
                                  " of a branch period between samples");
    return best;
}

}  // namespace

PhaseValue PhaseAccumulator::push(const PhaseState& state)
{
    auto [z, y] = cold_parts(ctx_, state, path_);
    const double zp = 2.0 * ctx_.Z_full;
    const double yp = 2.0 * ctx_.Y_full;
    if (started_) {
        const long zw = track(z, zp, z_prev_, zw_, max_jump_fraction_, "Z~");
        const long yw = track(y, yp, y_prev_, yw_, max_jump_fraction_, "Y~");
        if (zw != zw_ || yw != yw_) ledger_.push_back({count_, zw, yw});
        zw_ = zw;
        yw_ = yw;
    }
    started_ = true;
    ++count_;
    PhaseValue pv;
    pv.Z_tilde = z + zw_ * zp;
    pv.Y_tilde = y + yw_ * yp;
    pv.z_winding = zw_;
    pv.y_winding = yw_;
    pv.Phi = ctx_.factor * (pv.Z_tilde - pv.Y_tilde);
    z_prev_ = pv.Z_tilde;
    y_prev_ = pv.Y_tilde;
    return pv;
}

std::vector<double> phase_along(const Model& model, const Trajectory& traj, PhasePath path, std::size_t stride)
{
    PhaseAccumulator acc(make_phase_context(model, traj.front().state), path);
    const auto& samples = traj.samples();
    stride = std::max<std::size_t>(stride, 1);
    std::vector<double> out;
    out.reserve(samples.size() / stride + 2);
    for (std::size_t i = 0; i < samples.size(); i += stride) out.push_back(acc.push(samples[i].state).Phi);
    if ((samples.size() - 1) % stride != 0) out.push_back(acc.push(samples.back().state).Phi);
    return out;
}

double phase_drift(const std::vector<double>& phi)
{
    if (phi.empty()) return 0.0;
    const double scale = std::max(std::abs(phi.front()), 1.0);
    double worst = 0.0;
    for (double p : phi) worst = std::max(worst, std::abs(p - phi.front()) / scale);
    return worst;
}

std::complex<double> superconstant_C(const PhaseContext& ctx, const PhaseState& state, const ActionFunction& h)
{
    const double Phi = phase_phi(ctx, state).Phi;
    double amp = 1.0;
    if (h) {
        const auto ap = actions(ctx.model, ctx.consts);
        amp = h(ap.J_r, ap.J_phi);
    }
    return std::polar(amp, Phi);
}

std::complex<double> superconstant_C(const Model& model, const PhaseState& state, const ActionFunction& h)
{
    return superconstant_C(make_phase_context(model, state), state, h);
}

IndependenceReport functional_independence(const Model& model, const PhaseState& state, double rel_step,
                                           double threshold)
{
    IndependenceReport rep;
    auto eval = [&](const PhaseState& s) -> std::array<double, 3> {
        return {hamiltonian(model, s), liouville_l(model, s.phi, s.p_phi), superconstant_C(model, s).real()};
    };
    const StateVector base = to_vector(state);
    for (int j = 0; j < 4; ++j) {
        const double h = rel_step * std::max(1.0, std::abs(base[j]));
        StateVector up = base;
        StateVector dn = base;
        up[j] += h;
        dn[j] -= h;
        const auto fu = eval(from_vector(up, state.t));
        const auto fd = eval(from_vector(dn, state.t));
        for (int i = 0; i < 3; ++i) rep.gradients[i][j] = (fu[i] - fd[i]) / (2.0 * h);
    }
    Eigen::Matrix<double, 3, 4> J;
    for (int i = 0; i < 3; ++i) {
        double norm = 0.0;
        for (int j = 0; j < 4; ++j) norm += rep.gradients[i][j] * rep.gradients[i][j];
        norm = std::sqrt(norm);
        for (int j = 0; j < 4; ++j) J(i, j) = norm > 0.0 ? rep.gradients[i][j] / norm : 0.0;
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(J);
    const auto sv = svd.singularValues();
    for (int i = 0; i < 3; ++i) rep.singular_values[i] = sv(i);
    rep.smallest = sv(2);
    rep.pass = rep.smallest > threshold;
    return rep;
}

// ---------------------------------------------------------------------------

LiteralOscillatorArgs literal_oscillator_args(const AngularFamily& fam, double L, double phi)
{
    LiteralOscillatorArgs out;
    const auto d = oscillator_like(fam);
    if (!d) {
        out.issues.push_back("family is not oscillator-linked");
        return out;
    }
    const double A = L + d->gamma;
    const double K = d->gamma + d->c0;
    const double delta = fam.alpha - fam.beta;
    const double f = ftilde_of_phi(fam, phi);
    const double den = (1.0 - delta) * A - 2.0 * fam.alpha * K;
    const double num = (1.0 + delta) * A - 2.0 * fam.alpha * K;
    out.sin2_Lambda = (1.0 + delta) / den * ((1.0 + f) * A - 2.0 * K) / (1.0 + f);
    out.args.Omega = num / ((1.0 - delta) * A);
    out.Upsilon2 = num / den * (1.0 - delta) / (1.0 + delta);
    bool ok = true;
    if (!(out.sin2_Lambda >= 0.0 && out.sin2_Lambda <= 1.0)) {
        out.issues.push_back("sin^2 Lambda = " + std::to_string(out.sin2_Lambda) + " outside [0, 1]");
        ok = false;
    }
    if (!(out.Upsilon2 >= 0.0)) {
        out.issues.push_back("Upsilon^2 = " + std::to_string(out.Upsilon2) + " is negative");
        ok = false;
    }
    if (!std::isfinite(out.args.Omega)) {
        out.issues.push_back("Omega is not finite");
        ok = false;
    }
    if (ok) {
        out.args.Lambda = std::asin(std::sqrt(out.sin2_Lambda));
        out.args.Upsilon = std::sqrt(out.Upsilon2);
    } else {
        out.args.Lambda = nan;
        out.args.Upsilon = nan;
    }
    out.valid = ok;
    return out;
}

double literal_oscillator_phase(const Model& model, const SeparationConstants& consts, const PhaseState& state)
{
    const auto* o = std::get_if<Oscillator>(&model.radial);
    if (!o || is_central(model)) return nan;
    const auto& fam = family_of(model);
    const auto d = oscillator_like(fam);
    if (!d) return nan;
    const double L = consts.L;
    const double E = consts.E;
    const double A = L + d->gamma;
    const double K = d->gamma + d->c0;
    const double delta = fam.alpha - fam.beta;
    const int m = fam.m;
    const int n = fam.n;

    const double f = ftilde_of_phi(fam, state.phi);
    const double x1 = (A * f - K) / (L - d->c0);
    const auto pa = literal_oscillator_args(fam, L, state.phi);
    const double r2 = state.r * state.r;
    const double rad = E - 4.0 * o->omega * A;  // E, not E^2
    const double pref_rad = A * (1.0 + delta) * ((1.0 - delta) * A + 2.0 * fam.alpha * K);
    if (std::abs(x1) > 1.0 || !pa.valid || !(rad > 0.0) || !(pref_rad > 0.0)) return nan;
    const double x2 = (E * r2 - 2.0 * A) / (std::sqrt(rad) * r2);
    if (std::abs(x2) > 1.0) return nan;
    double Pi = 0.0;
    try {
        Pi = ellip_pi(pa.args);
    } catch (const DomainError&) {
        return nan;
    }
    return m * (0.5 * std::asin(x1) + 2.0 * fam.alpha * K / std::sqrt(pref_rad) * Pi) - n * std::asin(x2);
}

KeplerPhaseSymbols kepler_phase_symbols(const Model& model, const SeparationConstants& consts, double phi)
{
    KeplerPhaseSymbols s;
    const auto& fam = family_of(model);
    const auto* kl = std::get_if<KeplerLink>(&fam.link);
    const auto* g = std::get_if<GeneralizedKepler>(&model.radial);
    if (!kl || !g) throw DomainError("Kepler phase symbols need a generalized-Kepler model");
    const double J = kepler_J(fam);
    const double P = J + kl->B;
    const double F = kl->F;
    const double L = consts.L;
    const double f = ftilde_of_phi(fam, phi);

    s.a = (P * (L + kl->B) - F) / (L - J);
    s.b = std::sqrt(F + fam.alpha * fam.alpha * (P * P - F));
    s.d = -P;
    s.rho = std::sqrt(P * P - F * (1.0 + f * f)) / f;
    s.mu_radicand = (s.b - s.d) * (s.a - s.rho) / ((s.b - s.a) * (s.a - s.rho));
    s.mu = (s.mu_radicand >= 0.0 && s.mu_radicand <= 1.0) ? std::asin(std::sqrt(s.mu_radicand)) : nan;
    const double z2 = (s.b - s.a) * (s.b + s.d) / ((s.b + s.a) * (s.b - s.d));
    s.zeta = z2 >= 0.0 ? std::sqrt(z2) : nan;
    s.P_plus = P * P - F + 2.0 * (J - L) * std::sqrt(F);
    s.P_minus = P * P - F - 2.0 * (J - L) * std::sqrt(F);
    s.Q_plus = (F - P * P) * (L + kl->B + std::sqrt(F));
    s.Q_minus = (F - P * P) * (L + kl->B - std::sqrt(F));
    s.Delta = kepler_delta(*g, consts);
    return s;
}

double literal_kepler_y(const Model& model, const SeparationConstants& consts, double r)
{
    const auto* g = std::get_if<GeneralizedKepler>(&model.radial);
    if (!g) return nan;
    const double Delta = kepler_delta(*g, consts);
    if (!(Delta > 0.0)) return nan;
    const double sF = std::sqrt(g->F);
    const double u3 = consts.L + g->B;
    const double v = std::sqrt(g->D * r * r + g->F);
    double y = 0.0;
    for (double sigma : {1.0, -1.0}) {
        const double q = u3 - sigma * sF;
        const double X = (1.0 + 2.0 * sigma * sF * consts.E / g->D) / std::sqrt(Delta) - 2.0 * q / (v - sigma * sF);
        if (std::abs(X) > 1.0) return nan;
        y += std::asin(X) / (2.0 * std::sqrt(q));
    }
    return y;
}

double literal_kepler_z(const Model& model, const SeparationConstants& consts, double phi)
{
    const auto& fam = family_of(model);
    const auto s = kepler_phase_symbols(model, consts, phi);
    const auto& kl = std::get<KeplerLink>(fam.link);
    const double sF = std::sqrt(kl.F);
    const double L = consts.L;
    const double J = kepler_J(fam);
    const double P = J + kl.B;
    if (!std::isfinite(s.mu) || !std::isfinite(s.zeta) || !(s.Delta > 0.0) || !(J - L > 0.0)) return nan;
    const double Xp = (s.P_plus * (s.rho + sF) + 2.0 * s.Q_plus) / ((s.rho + sF) * std::sqrt(s.Delta));
    const double Xm = (s.P_minus * (s.rho - sF) + 2.0 * s.Q_minus) / ((s.rho - sF) * std::sqrt(s.Delta));
    if (std::abs(Xp) > 1.0 || std::abs(Xm) > 1.0) return nan;
    const double rad = (s.a + s.b) * (s.b - s.d);
    if (!(rad > 0.0)) return nan;
    double ell = 0.0;
    try {
        const double n1 = (s.b - s.a) * (s.d - sF) / ((s.b - s.d) * (s.a - sF));
        const double n2 = (s.b - s.a) * (s.d + sF) / ((s.b - s.d) * (s.a + sF));
        ell = ellip_pi({s.mu, n1, s.zeta}) / (s.a - sF) + ellip_pi({s.mu, n2, s.zeta}) / (s.a + sF);
    } catch (const DomainError&) {
        return nan;
    }
    const double u3 = L + kl.B;
    return (static_cast<double>(fam.m) / fam.n) *
           ((0.5 * pi - std::asin(Xp)) / (4.0 * std::sqrt(u3 + sF)) + (0.5 * pi - std::asin(Xm)) / (4.0 * std::sqrt(u3 - sF)) +
            0.5 * fam.alpha * std::sqrt((P * P - kl.F) / (J - L)) * (s.a - s.b) / std::sqrt(rad) * ell);
}

}  // namespace superint
