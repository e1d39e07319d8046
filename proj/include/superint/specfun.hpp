#pragma once

namespace superint {

/// Carlson R_F(x, y, z) = 1/2 int_0^inf dt / sqrt((t+x)(t+y)(t+z)).
/// x, y, z >= 0 with at most one zero.
double carlson_rf(double x, double y, double z);

/// Carlson R_C(x, y) = R_F(x, y, y); y > 0.
double carlson_rc(double x, double y);

/// Carlson R_J(x, y, z, p) = 3/2 int_0^inf dt / ((t+p) sqrt((t+x)(t+y)(t+z))).
/// p > 0 only (no principal values).
double carlson_rj(double x, double y, double z, double p);

/// Arguments of the incomplete third-kind integral
///   Pi(Lambda, Omega, Upsilon) = int_0^Lambda dx / ((1 - Omega sin^2 x) sqrt(1 - Upsilon^2 sin^2 x)).
/// Note the sign: the characteristic enters as (1 - Omega sin^2 x).
struct EllipticArgs {
    double Lambda = 0.0;
    double Omega = 0.0;
    double Upsilon = 0.0;
};

/// Throws DomainError if |Upsilon sin x| >= 1 somewhere on the range and
/// SingularityError if 1 - Omega sin^2 x vanishes on the range.
double ellip_pi(const EllipticArgs& args);

/// Same integral from the csc^2 form of the Legendre reduction; 0 < Lambda <= pi/2.
double ellip_pi_csc(const EllipticArgs& args);

}  // namespace superint
