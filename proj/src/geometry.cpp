#include "superint/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "superint/errors.hpp"

namespace superint {

Regime regime(Curvature curv)
{
    if (curv.k > 0) return Regime::spherical;
    if (curv.k < 0) return Regime::hyperbolic;
    return Regime::flat;
}

double chart_limit(Curvature curv)
{
    if (curv.k > 0) return std::numbers::pi / std::sqrt(curv.k);
    return std::numeric_limits<double>::infinity();
}

void check_chart(Curvature curv, double r)
{
    if (!std::isfinite(curv.k)) throw DomainError("curvature must be finite");
    if (!(r >= 0.0)) throw DomainError("radius must be non-negative, got " + std::to_string(r));
    // the bound itself is excluded: s_k vanishes there
    if (curv.k > 0 && !(r < chart_limit(curv)))
        throw DomainError("radius " + std::to_string(r) + " outside the polar chart r < pi/sqrt(k)");
}

double s_k(Curvature curv, double r)
{
    check_chart(curv, r);
    switch (regime(curv)) {
    case Regime::spherical: {
        const double q = std::sqrt(curv.k);
        return std::sin(q * r) / q;
    }
    case Regime::hyperbolic: {
        const double q = std::sqrt(-curv.k);
        return std::sinh(q * r) / q;
    }
    case Regime::flat:
        break;
    }
    return r;
}

double s_k_prime(Curvature curv, double r)
{
    check_chart(curv, r);
    switch (regime(curv)) {
    case Regime::spherical:
        return std::cos(std::sqrt(curv.k) * r);
    case Regime::hyperbolic:
        return std::cosh(std::sqrt(-curv.k) * r);
    case Regime::flat:
        break;
    }
    return 1.0;
}

}  // namespace superint
