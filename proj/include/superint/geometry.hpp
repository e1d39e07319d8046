#pragma once

namespace superint {

/// Gaussian curvature of the configuration surface (1/length^2).
/// k > 0: sphere, k = 0: plane, k < 0: hyperbolic plane.
struct Curvature {
    double k = 0.0;

    bool operator==(const Curvature&) const = default;
};

enum class Regime { hyperbolic, flat, spherical };

Regime regime(Curvature curv);

/// Upper end of the geodesic polar chart: pi/sqrt(k) for k > 0, +inf otherwise.
double chart_limit(Curvature curv);

/// Throws DomainError unless 0 <= r < chart_limit(curv).
void check_chart(Curvature curv, double r);

/// Metric function of ds^2 = dr^2 + s_k(r)^2 dphi^2.
double s_k(Curvature curv, double r);

/// d s_k / dr.
double s_k_prime(Curvature curv, double r);

}  // namespace superint
