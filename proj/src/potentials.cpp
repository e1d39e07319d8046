#include "superint/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "superint/errors.hpp"

namespace superint {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double endpoint_guard = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

/// cos(x) - cos(y) without cancellation.
double cos_difference(double x, double y)
{
    return -2.0 * std::sin(0.5 * (x + y)) * std::sin(0.5 * (x - y));
}

void require_positive_radius(double r, const char* what)
{
    if (!(r > 0.0)) throw DomainError(std::string(what) + " is singular at r = 0");
}

}  // namespace

// ---------------------------------------------------------------------------
// radial potentials
// ---------------------------------------------------------------------------

std::string describe(const RadialPotential& pot)
{
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const Oscillator& p) { os << "oscillator(gamma=" << p.gamma << ", omega=" << p.omega << ")"; },
                   [&](const GeneralizedKepler& p) {
                       os << "kepler(B=" << p.B << ", D=" << p.D << ", F=" << p.F << ")";
                   },
                   [&](const PowerLaw& p) {
                       os << "power_law(coefficient=" << p.coefficient << ", exponent=" << p.exponent << ")";
                   },
               },
               pot);
    return os.str();
}

void check_radial(const RadialPotential& pot)
{
    std::visit(overloaded{
                   [](const Oscillator& p) {
                       if (!(p.gamma >= 0 && p.omega >= 0))
                           throw DomainError("oscillator potential requires gamma, omega >= 0");
                   },
                   [](const GeneralizedKepler& p) {
                       if (!(p.B >= 0 && p.D >= 0 && p.F >= 0))
                           throw DomainError("Kepler potential requires B, D, F >= 0");
                   },
                   [](const PowerLaw& p) {
                       if (!std::isfinite(p.coefficient) || !std::isfinite(p.exponent))
                           throw DomainError("power-law parameters must be finite");
                   },
               },
               pot);
}

double radial_upper_limit(const RadialPotential& pot, Curvature curv)
{
    if (curv.k > 0) {
        if (const auto* osc = std::get_if<Oscillator>(&pot); osc && osc->omega > 0)
            return 0.5 * pi / std::sqrt(curv.k);
    }
    return chart_limit(curv);
}

double radial_value(const RadialPotential& pot, Curvature curv, double r)
{
    check_chart(curv, r);
    const double k = curv.k;
    const double q = std::sqrt(std::abs(k));
    const double ak = std::abs(k);
    return std::visit(
        overloaded{
            [&](const Oscillator& p) -> double {
                if (k == 0) {
                    if (p.gamma != 0) require_positive_radius(r, "oscillator potential");
                    return (p.gamma != 0 ? p.gamma / (r * r) : 0.0) + p.omega * r * r;
                }
                require_positive_radius(r, "curved oscillator potential");
                // u = cot(q r) or coth(q r)
                const double u = k > 0 ? std::cos(q * r) / std::sin(q * r) : 1.0 / std::tanh(q * r);
                if (p.omega != 0 && u == 0)
                    throw DomainError("spherical oscillator potential diverges at r = pi/(2 sqrt k)");
                return p.gamma * ak * u * u + (p.omega != 0 ? p.omega / ak / (u * u) : 0.0);
            },
            [&](const GeneralizedKepler& p) -> double {
                require_positive_radius(r, "Kepler potential");
                if (k == 0) return (p.B - std::sqrt(p.D * r * r + p.F)) / (r * r);
                const double u = k > 0 ? std::cos(q * r) / std::sin(q * r) : 1.0 / std::tanh(q * r);
                return p.B * ak * u * u - q * u * std::sqrt(p.D + ak * p.F * u * u);
            },
            [&](const PowerLaw& p) -> double {
                if (p.exponent < 0) require_positive_radius(r, "power law");
                return p.coefficient * std::pow(r, p.exponent);
            },
        },
        pot);
}

double radial_derivative(const RadialPotential& pot, Curvature curv, double r)
{
    check_chart(curv, r);
    const double k = curv.k;
    const double q = std::sqrt(std::abs(k));
    const double ak = std::abs(k);
    // du/dr for u = cot(q r) (k > 0) or coth(q r) (k < 0)
    auto cot_like = [&](double& u, double& du_dr) {
        if (k > 0) {
            u = std::cos(q * r) / std::sin(q * r);
            du_dr = -q * (1.0 + u * u);
        } else {
            u = 1.0 / std::tanh(q * r);
            du_dr = -q * (u * u - 1.0);
        }
    };
    return std::visit(
        overloaded{
            [&](const Oscillator& p) -> double {
                if (k == 0) {
                    if (p.gamma != 0) require_positive_radius(r, "oscillator potential");
                    return (p.gamma != 0 ? -2.0 * p.gamma / (r * r * r) : 0.0) + 2.0 * p.omega * r;
                }
                require_positive_radius(r, "curved oscillator potential");
                double u = 0, du = 0;
                cot_like(u, du);
                if (p.omega != 0 && u == 0)
                    throw DomainError("spherical oscillator potential diverges at r = pi/(2 sqrt k)");
                const double da_du =
                    2.0 * p.gamma * ak * u - (p.omega != 0 ? 2.0 * p.omega / ak / (u * u * u) : 0.0);
                return da_du * du;
            },
            [&](const GeneralizedKepler& p) -> double {
                require_positive_radius(r, "Kepler potential");
                if (k == 0) {
                    const double w = std::sqrt(p.D * r * r + p.F);
                    return -2.0 * p.B / (r * r * r) - p.D / (r * w) + 2.0 * w / (r * r * r);
                }
                double u = 0, du = 0;
                cot_like(u, du);
                const double w = std::sqrt(p.D + ak * p.F * u * u);
                const double da_du = 2.0 * p.B * ak * u - q * w - q * ak * p.F * u * u / w;
                return da_du * du;
            },
            [&](const PowerLaw& p) -> double {
                if (p.exponent < 1) require_positive_radius(r, "power law");
                return p.coefficient * p.exponent * std::pow(r, p.exponent - 1.0);
            },
        },
        pot);
}

// ---------------------------------------------------------------------------
// family descriptors
// ---------------------------------------------------------------------------

AngularFamily reduced(AngularFamily fam)
{
    if (fam.m > 0 && fam.n > 0) {
        const int g = std::gcd(fam.m, fam.n);
        fam.m /= g;
        fam.n /= g;
    }
    return fam;
}

LinkKind link_kind(const AngularFamily& fam)
{
    return std::holds_alternative<OscillatorLink>(fam.link) ? LinkKind::oscillator : LinkKind::kepler;
}

double nu(const AngularFamily& fam)
{
    if (fam.nu_override) return *fam.nu_override;
    const double ratio = static_cast<double>(fam.n) / static_cast<double>(fam.m);
    return link_kind(fam) == LinkKind::oscillator ? 2.0 * ratio : ratio;
}

double kepler_J(const AngularFamily& fam)
{
    const auto* link = std::get_if<KeplerLink>(&fam.link);
    if (!link) throw DomainError("J is defined only for the Kepler link");
    const double s = (fam.c0 + link->B) * (fam.c0 + link->B) - link->F;
    if (s < 0) throw DomainError("(c0 + B)^2 < F: Kepler-linked well is not real");
    return fam.c0 + std::sqrt(s);
}

double c0_from_J(double B, double F, double J)
{
    if (!(J + B > 0)) throw DomainError("c0_from_J requires J + B > 0");
    const double c0 = (J * J - B * B + F) / (2.0 * (J + B));
    if (c0 > J) throw DomainError("no c0 reproduces the requested J");
    return c0;
}

double well_depth(const AngularFamily& fam)
{
    if (const auto* osc = std::get_if<OscillatorLink>(&fam.link)) return osc->gamma + fam.c0;
    return kepler_J(fam) + std::get<KeplerLink>(fam.link).B;
}

ValidationReport validate_family(const AngularFamily& fam)
{
    ValidationReport rep;
    auto fail = [&](std::string msg) { rep.violations.push_back(std::move(msg)); };

    if (!std::isfinite(fam.alpha) || !std::isfinite(fam.beta) || !std::isfinite(fam.c0))
        fail("alpha, beta and c0 must be finite");
    const double l1 = std::abs(fam.alpha) + std::abs(fam.beta);
    if (l1 > 1.0 + 1e-14) {
        std::ostringstream os;
        os.precision(17);
        os << "square constraint |alpha| + |beta| <= 1 violated: " << l1;
        fail(os.str());
    } else if (std::abs(fam.alpha) >= 1.0 - 1e-14) {
        fail("corner alpha = +-1 of the square: the minimum coincides with an endpoint");
    }
    if (fam.m <= 0 || fam.n <= 0) fail("m and n must be positive integers");
    else if (std::gcd(fam.m, fam.n) != 1) rep.notes.push_back("(m, n) not in lowest terms");
    if (fam.nu_override) {
        if (!(*fam.nu_override > 0)) fail("nu override must be positive");
        rep.notes.push_back("nu override active: family is a negative control");
    }

    std::visit(overloaded{
                   [&](const OscillatorLink& link) {
                       if (!(link.gamma >= 0)) fail("oscillator link requires gamma >= 0");
                       if (!(link.gamma + fam.c0 > 0)) fail("gamma + c0 must be > 0 (degenerate well)");
                   },
                   [&](const KeplerLink& link) {
                       if (!(link.B >= 0)) fail("Kepler link requires B >= 0");
                       if (!(link.F >= 0)) fail("Kepler link requires F >= 0");
                       const double u = fam.c0 + link.B;
                       if (!(u * u > link.F)) fail("(c0 + B)^2 > F required (f(c0) = 1)");
                       if (!(u + std::sqrt(std::max(link.F, 0.0)) > 0))
                           fail("c0 + B + sqrt(F) must be > 0");
                       if (u * u > link.F && u + std::sqrt(std::max(link.F, 0.0)) > 0 &&
                           kepler_J(fam) + link.B < 0)
                           rep.notes.push_back("J + B < 0: c_+ branch (experimental)");
                   },
               },
               fam.link);
    return rep;
}

AngularDomain angular_domain(const AngularFamily& fam)
{
    const double v = nu(fam);
    const double theta_tilde = std::acos(clamp_unit(fam.alpha - fam.beta));
    const double theta0 = 2.0 * pi - std::acos(clamp_unit(fam.alpha + fam.beta));
    AngularDomain dom;
    dom.phi_tilde = theta_tilde / (2.0 * v);
    dom.phi_end = dom.phi_tilde + pi / v;
    dom.phi0 = theta0 / (2.0 * v);
    return dom;
}

// ---------------------------------------------------------------------------
// f-maps
// ---------------------------------------------------------------------------

double f_of_c(const AngularFamily& fam, double c)
{
    if (!(c >= fam.c0)) throw DomainError("f(c) requires c >= c0");
    if (const auto* osc = std::get_if<OscillatorLink>(&fam.link))
        return (2.0 * fam.c0 + osc->gamma - c) / (c + osc->gamma);
    const auto& link = std::get<KeplerLink>(fam.link);
    const double J = kepler_J(fam);
    const double s = (c + link.B) * (c + link.B) - link.F;
    if (!(s > 0)) throw DomainError("(c + B)^2 <= F in Kepler f-map");
    return (J - c) / std::sqrt(s);
}

double f_prime_of_c(const AngularFamily& fam, double c)
{
    if (const auto* osc = std::get_if<OscillatorLink>(&fam.link)) {
        const double K = osc->gamma + fam.c0;
        return -2.0 * K / ((c + osc->gamma) * (c + osc->gamma));
    }
    const auto& link = std::get<KeplerLink>(fam.link);
    const double P = kepler_J(fam) + link.B;
    const double u = c + link.B;
    const double s = u * u - link.F;
    return -(u * P - link.F) / (s * std::sqrt(s));
}

double one_minus_f_of_c(const AngularFamily& fam, double c)
{
    if (!(c >= fam.c0)) throw DomainError("f(c) requires c >= c0");
    if (const auto* osc = std::get_if<OscillatorLink>(&fam.link)) return 2.0 * (c - fam.c0) / (c + osc->gamma);
    const auto& link = std::get<KeplerLink>(fam.link);
    const double J = kepler_J(fam);
    const double s = (c + link.B) * (c + link.B) - link.F;
    if (!(s > 0)) throw DomainError("(c + B)^2 <= F in Kepler f-map");
    const double root = std::sqrt(s);
    // root^2 - (J - c)^2 = 2 (c - c0)(J + B)
    return 2.0 * (c - fam.c0) * (J + link.B) / (root * (root + J - c));
}

namespace {

/// c(f~) given f~ and the cancellation-free 1 -+ f~.
double c_from_parts(const AngularFamily& fam, double f, double one_minus, double one_plus)
{
    if (const auto* osc = std::get_if<OscillatorLink>(&fam.link)) {
        const double K = osc->gamma + fam.c0;
        return fam.c0 + K * one_minus / one_plus;
    }
    const auto& link = std::get<KeplerLink>(fam.link);
    const double B = link.B;
    const double F = link.F;
    const double J = kepler_J(fam);
    const double P = J + B;
    const double one_minus_sq = one_minus * one_plus;
    const double root = std::sqrt(std::max(P * P + F * (f * f - 1.0), 0.0));
    // c_- for J + B > 0, c_+ otherwise
    const double sgn = P > 0 ? -1.0 : 1.0;
    if (f > 0 && one_minus_sq < 1e-6) {
        // rationalized form, regular at f~ = 1
        return (J * J + (F - B * B) * f * f) / (J + B * f * f - sgn * f * root);
    }
    return (J + B * f * f + sgn * f * root) / one_minus_sq;
}

}  // namespace

double c_of_ftilde(const AngularFamily& fam, double ftilde)
{
    if (!(ftilde > -1.0 && ftilde <= 1.0)) throw DomainError("c(f~) requires f~ in (-1, 1]");
    return c_from_parts(fam, ftilde, 1.0 - ftilde, 1.0 + ftilde);
}

// ---------------------------------------------------------------------------
// f~(phi)
// ---------------------------------------------------------------------------

double ftilde_formula(double alpha, double beta, double nu_value, double phi)
{
    const double th = 2.0 * nu_value * phi;
    const double s = std::sin(th);
    const double C = std::cos(th) - alpha;
    const double a = C * C + s * s;
    return (beta * C - s * std::sqrt(std::max(a - beta * beta, 0.0))) / a;
}

FtildeParts ftilde_parts(const AngularFamily& fam, double phi)
{
    const double v = nu(fam);
    const double th = 2.0 * v * phi;
    const double s = std::sin(th);
    const double ct = std::cos(th);
    const double C = ct - fam.alpha;
    const double a = C * C + s * s;
    const double th_tilde = std::acos(clamp_unit(fam.alpha - fam.beta));
    const double th_plus = std::acos(clamp_unit(fam.alpha + fam.beta));
    const double cp = cos_difference(th, th_tilde);  // C + beta
    const double cm = cos_difference(th, th_plus);   // C - beta
    const double rad = std::max(cp * cm + s * s, 0.0);  // a - beta^2
    const double v_term = s * std::sqrt(rad);

    FtildeParts out;
    out.value = (fam.beta * C - v_term) / a;

    // (u - v)(u + v) = a (C + beta)^2 with u = a + beta C
    const double u = C * cp + s * s;  // a + beta C without cancellation
    out.one_plus = (u * v_term > 0) ? cp * cp / (u + v_term) : (u - v_term) / a;
    // (w + v)(w - v) = a (C - beta)^2 with w = a - beta C
    const double w = C * cm + s * s;  // a - beta C
    out.one_minus = (w * v_term < 0) ? cm * cm / (w - v_term) : (w + v_term) / a;
    return out;
}

namespace {

void check_closed_domain(const AngularFamily& fam, double phi)
{
    const AngularDomain dom = angular_domain(fam);
    const double slack = 1e-14 * std::max(1.0, std::abs(dom.phi_end));
    if (!(phi >= dom.phi_tilde - slack && phi <= dom.phi_end + slack)) {
        std::ostringstream os;
        os.precision(17);
        os << "phi = " << phi << " outside the angular domain [" << dom.phi_tilde << ", " << dom.phi_end << "]";
        throw DomainError(os.str());
    }
}

void check_open_domain(const AngularFamily& fam, double phi)
{
    const AngularDomain dom = angular_domain(fam);
    if (!(phi > dom.phi_tilde + endpoint_guard && phi < dom.phi_end - endpoint_guard)) {
        std::ostringstream os;
        os.precision(17);
        os << "phi = " << phi << " not strictly inside the angular domain (" << dom.phi_tilde << ", "
           << dom.phi_end << ")";
        throw DomainError(os.str());
    }
}

}  // namespace

double ftilde_of_phi(const AngularFamily& fam, double phi)
{
    check_closed_domain(fam, phi);
    return ftilde_parts(fam, phi).value;
}

double ftilde_derivative(const AngularFamily& fam, double phi)
{
    check_closed_domain(fam, phi);
    const double v = nu(fam);
    const double th = 2.0 * v * phi;
    const double s = std::sin(th);
    const double ct = std::cos(th);
    const double C = ct - fam.alpha;
    const double a = C * C + s * s;
    const double rad = a - fam.beta * fam.beta;
    if (!(rad > 0)) throw DomainError("f~'(phi) singular where a(phi) = beta^2");
    const double sq = std::sqrt(rad);
    const double N = fam.beta * C - s * sq;
    const double dN = -fam.beta * s - ct * sq - fam.alpha * s * s / sq;
    const double da = 2.0 * fam.alpha * s;
    return 2.0 * v * (dN * a - N * da) / (a * a);
}

double angular_value(const AngularFamily& fam, double phi)
{
    check_open_domain(fam, phi);
    const FtildeParts p = ftilde_parts(fam, phi);
    return c_from_parts(fam, p.value, p.one_minus, p.one_plus);
}

double angular_derivative(const AngularFamily& fam, double phi)
{
    const double c = angular_value(fam, phi);
    return ftilde_derivative(fam, phi) / f_prime_of_c(fam, c);
}

double phi_of_ftilde(const AngularFamily& fam, double ftilde, Side side)
{
    if (!(ftilde >= -1.0 && ftilde <= 1.0)) throw DomainError("phi(f~) requires f~ in [-1, 1]");
    const double th_plus = std::acos(clamp_unit(fam.alpha + fam.beta));
    const double theta0 = 2.0 * pi - th_plus;
    const double shift = std::acos(clamp_unit(fam.alpha * ftilde + fam.beta)) - th_plus;
    const double arc = std::acos(ftilde);
    const double theta = side == Side::left ? theta0 - arc - shift : theta0 + arc - shift;
    return theta / (2.0 * nu(fam));
}

// ---------------------------------------------------------------------------
// closed forms
// ---------------------------------------------------------------------------

double poschl_teller_value(double A_plus, double A_minus, double nu_value, double gamma, double phi)
{
    const double x = nu_value * phi;
    if (!(x > 0 && x < pi)) throw DomainError("Poschl-Teller form requires nu*phi in (0, pi)");
    const double c = std::cos(0.5 * x);
    const double s = std::sin(0.5 * x);
    return A_minus / (c * c) + A_plus / (s * s) - gamma;
}

PoschlTellerAmplitudes poschl_teller_amplitudes(double gamma, double c0, double alpha)
{
    if (!(alpha >= 0)) throw DomainError("Poschl-Teller amplitudes need alpha >= 0");
    const double K = gamma + c0;
    const double sa = std::sqrt(alpha);
    return {K * (1 + sa) * (1 + sa) / 4.0, K * (1 - sa) * (1 - sa) / 4.0};
}

namespace {

/// gamma of the f-map entering the quadrant / beta = 0 oscillator forms.
double oscillator_like_gamma(const AngularFamily& fam)
{
    if (const auto* osc = std::get_if<OscillatorLink>(&fam.link)) return osc->gamma;
    const auto& link = std::get<KeplerLink>(fam.link);
    if (link.F != 0) throw DomainError("closed form requires the oscillator link or the Kepler link with F = 0");
    return link.B;
}

}  // namespace

double quadrant_value(const AngularFamily& fam, Quadrant quadrant, double phi)
{
    const double gamma = oscillator_like_gamma(fam);
    const double K = gamma + fam.c0;
    const double a = fam.alpha;
    const double x = nu(fam) * phi;
    constexpr double edge_tol = 1e-12;
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw DomainError(msg);
    };
    auto inside = [&](double lo, double hi) {
        require(x > lo && x < hi, "phi outside the quadrant-specific interval");
    };
    const double s = std::sin(x);
    const double c = std::cos(x);
    switch (quadrant) {
    case Quadrant::II: {
        require(a > 0 && a < 1 && std::abs(fam.beta - (a - 1)) < edge_tol, "quadrant II needs beta = alpha - 1");
        inside(0, pi);
        const double t = c + std::sqrt(a);
        return K * t * t / (s * s) + fam.c0;
    }
    case Quadrant::IV: {
        require(a < 0 && a > -1 && std::abs(fam.beta - (a + 1)) < edge_tol, "quadrant IV needs beta = alpha + 1");
        inside(0.5 * pi, 1.5 * pi);
        const double t = s - std::sqrt(-a);
        return K * t * t / (c * c) + fam.c0;
    }
    case Quadrant::I: {
        require(a > 0 && a < 1 && std::abs(fam.beta - (1 - a)) < edge_tol, "quadrant I needs beta = 1 - alpha");
        const double lo = std::acos(std::sqrt(a));
        inside(lo, lo + pi);
        const double t = x < pi ? c - std::sqrt(a) : c + std::sqrt(a);
        return K * s * s / (t * t) + fam.c0;
    }
    case Quadrant::III: {
        require(a < 0 && a > -1 && std::abs(fam.beta + (1 + a)) < edge_tol,
                "quadrant III needs beta = -(1 + alpha)");
        const double lo = std::acos(std::sqrt(1 + a));
        inside(lo, lo + pi);
        const double t = x < 0.5 * pi ? s - std::sqrt(-a) : s + std::sqrt(-a);
        return K * c * c / (t * t) + fam.c0;
    }
    }
    throw DomainError("unknown quadrant");
}

double beta_zero_value(const AngularFamily& fam, double phi)
{
    if (std::abs(fam.beta) > 1e-15) throw DomainError("beta = 0 closed form needs beta = 0");
    check_open_domain(fam, phi);
    const double th = 2.0 * nu(fam) * phi;
    const double s = std::sin(th);
    const double C = std::cos(th) - fam.alpha;
    if (const auto* link = std::get_if<KeplerLink>(&fam.link); link && link->F != 0) {
        const double J = kepler_J(fam);
        const double P = J + link->B;
        const double root = std::sqrt((P * P - link->F) * C * C + P * P * s * s);
        return (P * s * s + s * root) / (C * C) + J;
    }
    const double K = oscillator_like_gamma(fam) + fam.c0;
    const double sa = std::sqrt(C * C + s * s);
    return K * (sa + s) / (sa - s) + fam.c0;
}

}  // namespace superint
