#include "superint/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "superint/errors.hpp"

namespace superint {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

// Stop duplication once the argument spread is below this; the truncation
// error of the fifth-order series is then ~ tol^6.
const double rf_tol = std::pow(3.0 * eps, 1.0 / 6.0);
const double rj_tol = std::pow(eps / 4.0, 1.0 / 6.0);

}  // namespace

double carlson_rf(double x, double y, double z)
{
    if (!(x >= 0 && y >= 0 && z >= 0)) throw DomainError("carlson_rf: negative argument");
    if ((x == 0) + (y == 0) + (z == 0) > 1) throw DomainError("carlson_rf: two zero arguments");

    const double x0 = x, y0 = y;
    const double A0 = (x + y + z) / 3.0;
    const double Q = std::max({std::abs(A0 - x), std::abs(A0 - y), std::abs(A0 - z)}) / rf_tol;
    double A = A0;
    double scale = 1.0;
    while (Q * scale >= std::abs(A)) {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * sy + sx * sz + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        A = 0.25 * (A + lam);
        scale *= 0.25;
    }
    const double X = (A0 - x0) * scale / A;
    const double Y = (A0 - y0) * scale / A;
    const double Z = -(X + Y);
    const double E2 = X * Y - Z * Z;
    const double E3 = X * Y * Z;
    return (1.0 - E2 / 10.0 + E3 / 14.0 + E2 * E2 / 24.0 - 3.0 * E2 * E3 / 44.0) / std::sqrt(A);
}

double carlson_rc(double x, double y)
{
    if (!(x >= 0 && y > 0)) throw DomainError("carlson_rc: requires x >= 0, y > 0");
    if (x == y) return 1.0 / std::sqrt(x);
    if (x < y) {
        if (x == 0) return 0.5 * std::numbers::pi / std::sqrt(y);
        return std::atan(std::sqrt((y - x) / x)) / std::sqrt(y - x);
    }
    return std::atanh(std::sqrt((x - y) / x)) / std::sqrt(x - y);
}

double carlson_rj(double x, double y, double z, double p)
{
    if (!(x >= 0 && y >= 0 && z >= 0)) throw DomainError("carlson_rj: negative argument");
    if ((x == 0) + (y == 0) + (z == 0) > 1) throw DomainError("carlson_rj: two zero arguments");
    if (!(p > 0)) throw DomainError("carlson_rj: p must be > 0");

    const double x0 = x, y0 = y, z0 = z;
    const double A0 = (x + y + z + 2.0 * p) / 5.0;
    const double delta = (p - x) * (p - y) * (p - z);
    const double Q =
        std::max({std::abs(A0 - x), std::abs(A0 - y), std::abs(A0 - z), std::abs(A0 - p)}) / rj_tol;
    double A = A0;
    double scale = 1.0;
    double sum = 0.0;
    double pow4 = 1.0;  // 4^-j
    while (Q * scale >= std::abs(A)) {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z), sp = std::sqrt(p);
        const double lam = sx * sy + sx * sz + sy * sz;
        const double d = (sp + sx) * (sp + sy) * (sp + sz);
        const double e = delta * pow4 * pow4 * pow4 / (d * d);
        sum += pow4 * 6.0 / d * carlson_rc(1.0, 1.0 + e);
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        p = 0.25 * (p + lam);
        A = 0.25 * (A + lam);
        scale *= 0.25;
        pow4 *= 0.25;
    }
    const double X = (A0 - x0) * scale / A;
    const double Y = (A0 - y0) * scale / A;
    const double Z = (A0 - z0) * scale / A;
    const double P = -(X + Y + Z) / 2.0;
    const double E2 = X * Y + X * Z + Y * Z - 3.0 * P * P;
    const double E3 = X * Y * Z + 2.0 * E2 * P + 4.0 * P * P * P;
    const double E4 = (2.0 * X * Y * Z + E2 * P + 3.0 * P * P * P) * P;
    const double E5 = X * Y * Z * P * P;
    const double series = 1.0 - 3.0 * E2 / 14.0 + E3 / 6.0 + 9.0 * E2 * E2 / 88.0 - 3.0 * E4 / 22.0 -
                          9.0 * E2 * E3 / 52.0 + 3.0 * E5 / 26.0;
    return scale * series / (A * std::sqrt(A)) + sum;
}

namespace {

/// Integral over [0, t] with |t| <= pi/2 via the sin-form reduction.
double pi_principal(double t, double Omega, double k2)
{
    const double s = std::sin(t);
    const double c = std::cos(t);
    const double s2 = s * s;
    const double y = 1.0 - k2 * s2;
    const double p = 1.0 - Omega * s2;
    return s * carlson_rf(c * c, y, 1.0) + Omega / 3.0 * s * s2 * carlson_rj(c * c, y, 1.0, p);
}

void check_args(const EllipticArgs& a, double max_sin2)
{
    const double k2 = a.Upsilon * a.Upsilon;
    if (!std::isfinite(a.Lambda) || !std::isfinite(a.Omega) || !std::isfinite(a.Upsilon))
        throw DomainError("ellip_pi: non-finite argument");
    if (k2 * max_sin2 >= 1.0) throw DomainError("ellip_pi: |Upsilon sin x| >= 1 on the range");
    if (a.Omega * max_sin2 >= 1.0) throw SingularityError("ellip_pi: 1 - Omega sin^2 x vanishes on the range");
}

}  // namespace

double ellip_pi(const EllipticArgs& args)
{
    const double L = args.Lambda;
    const double half_pi = 0.5 * std::numbers::pi;
    const double aL = std::abs(L);
    // largest sin^2 reached on [0, |L|]
    const double max_sin2 = aL >= half_pi ? 1.0 : std::sin(aL) * std::sin(aL);
    check_args(args, max_sin2);
    if (L == 0) return 0.0;

    const double k2 = args.Upsilon * args.Upsilon;
    const double sign = L < 0 ? -1.0 : 1.0;
    // |L| = j*pi + t with |t| <= pi/2
    const double j = std::round(aL / std::numbers::pi);
    const double t = aL - j * std::numbers::pi;
    double value = pi_principal(t, args.Omega, k2);
    if (j != 0) value += 2.0 * j * pi_principal(half_pi, args.Omega, k2);
    return sign * value;
}

double ellip_pi_csc(const EllipticArgs& args)
{
    const double L = args.Lambda;
    if (!(L > 0 && L <= 0.5 * std::numbers::pi)) throw DomainError("ellip_pi_csc: requires 0 < Lambda <= pi/2");
    const double s = std::sin(L);
    check_args(args, s * s);
    const double c = 1.0 / (s * s);
    const double k2 = args.Upsilon * args.Upsilon;
    const double n = args.Omega;
    return carlson_rf(c - 1.0, c - k2, c) + n / 3.0 * carlson_rj(c - 1.0, c - k2, c, c - n);
}

}  // namespace superint
