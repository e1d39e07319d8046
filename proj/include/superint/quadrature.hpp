#pragma once

#include <functional>

namespace superint {

using Integrand = std::function<double(double)>;

/// Relative tolerance used by every quadrature in the library unless overridden.
inline constexpr double default_quad_tol = 1e-12;

/// Adaptive Gauss-Kronrod on a smooth integrand.
double integrate_smooth(const Integrand& g, double a, double b, double tol = default_quad_tol);

/// int_a^b g(x) dx where g may behave like (x-a)^(+-1/2) and (b-x)^(+-1/2).
/// Substitutes x = mid - half*cos(theta).
double integrate_libration(const Integrand& g, double a, double b, double tol = default_quad_tol);

/// int_a^x g where g has a square-root type endpoint at a only (x may lie on
/// either side of a). Substitutes x = a + t^2.
double integrate_from_turning(const Integrand& g, double a, double x, double tol = default_quad_tol);

/// int_a^x g for x in [a, b] with square-root endpoints at both a and b.
/// Uses the one-endpoint rule from whichever end is nearer; `full` is the
/// complete integral over [a, b] (pass NaN to have it computed).
double integrate_partial_libration(const Integrand& g, double a, double b, double x, double full,
                                   double tol = default_quad_tol);

/// int_a^b u(x) / sqrt(W(x)) dx where W has simple zeros at a and b and is
/// positive between. Integrates u / sqrt(W / ((x-a)(b-x))) in the angle
/// variable; the smooth ratio is extrapolated linearly within 1e-6 (b-a) of
/// each end, so rounding in W and in the roots does not reach the quadrature.
double integrate_inverse_sqrt(const Integrand& u, const Integrand& W, double a, double b,
                              double tol = default_quad_tol);

/// int_end^x u / sqrt(W) with a simple zero of W at `end` only; `scale` is
/// the libration width that sets the extrapolation zone.
double integrate_inverse_sqrt_from(const Integrand& u, const Integrand& W, double end, double x, double scale,
                                   double tol = default_quad_tol);

/// Same integrand over [a, x], x in [a, b]; `full` as for integrate_partial_libration.
double integrate_inverse_sqrt_partial(const Integrand& u, const Integrand& W, double a, double b, double x,
                                      double full, double tol = default_quad_tol);

}  // namespace superint
