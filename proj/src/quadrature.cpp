#include "superint/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "superint/errors.hpp"

namespace superint {

namespace {

constexpr unsigned max_depth = 12;
constexpr double end_frac = 1e-4;

/// W(x) / dist(x) with dist vanishing at `end`; replaced by the quadratic
/// through three nodes near `end`, where W is dominated by rounding.
/// The window shrinks with |end| so that 1/r^2 weights stay resolved.
class EndRatio {
public:
    EndRatio(const Integrand& W, std::function<double(double)> dist, double end, double width)
        : W_(W), dist_(std::move(dist)), end_(end), h_(end_frac * window(end, width))
    {
        for (int i = 0; i < 3; ++i) q_[i] = raw(end + (i + 1) * h_);
    }

    double operator()(double x) const
    {
        const double s = (x - end_) / h_;  // node i+1 at s = i+1
        if (s >= 1.0) return raw(x);
        const double l1 = (s - 2.0) * (s - 3.0) / 2.0;
        const double l2 = -(s - 1.0) * (s - 3.0);
        const double l3 = (s - 1.0) * (s - 2.0) / 2.0;
        return q_[0] * l1 + q_[1] * l2 + q_[2] * l3;
    }

private:
    static double window(double end, double width)
    {
        if (end == 0.0) return width;
        return std::copysign(std::min(std::abs(width), std::abs(end)), width);
    }

    double raw(double x) const { return W_(x) / dist_(x); }

    const Integrand& W_;
    std::function<double(double)> dist_;
    double end_;
    double h_;
    double q_[3] = {0, 0, 0};
};

double safe_inv_sqrt(double q) { return q > 0 ? 1.0 / std::sqrt(q) : 0.0; }

}  // namespace

double integrate_smooth(const Integrand& g, double a, double b, double tol)
{
    if (a == b) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, max_depth, tol, &err);
}

double integrate_libration(const Integrand& g, double a, double b, double tol)
{
    if (a == b) return 0.0;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto h = [&](double th) {
        const double s = std::sin(th);
        if (s == 0.0) return 0.0;
        return g(mid - half * std::cos(th)) * half * s;
    };
    return integrate_smooth(h, 0.0, std::numbers::pi, tol);
}

double integrate_from_turning(const Integrand& g, double a, double x, double tol)
{
    if (a == x) return 0.0;
    const double dir = x > a ? 1.0 : -1.0;
    const double T = std::sqrt(std::abs(x - a));
    auto h = [&](double t) {
        if (t == 0.0) return 0.0;
        return g(a + dir * t * t) * 2.0 * t;
    };
    return dir * integrate_smooth(h, 0.0, T, tol);
}

double integrate_partial_libration(const Integrand& g, double a, double b, double x, double full, double tol)
{
    if (!(x >= a && x <= b)) throw DomainError("partial libration integral: x outside [a, b]");
    if (x <= 0.5 * (a + b)) return integrate_from_turning(g, a, x, tol);
    if (std::isnan(full)) full = integrate_libration(g, a, b, tol);
    return full + integrate_from_turning(g, b, x, tol);  // int_b^x = -int_x^b
}

double integrate_inverse_sqrt(const Integrand& u, const Integrand& W, double a, double b, double tol)
{
    if (a == b) return 0.0;
    auto dist = [a, b](double x) { return (x - a) * (b - x); };
    const EndRatio left(W, dist, a, b - a);
    const EndRatio right(W, dist, b, a - b);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto h = [&](double th) {
        const double x = mid - half * std::cos(th);
        const double q = x < mid ? left(x) : right(x);
        return u(x) * safe_inv_sqrt(q);
    };
    return integrate_smooth(h, 0.0, std::numbers::pi, tol);
}

double integrate_inverse_sqrt_from(const Integrand& u, const Integrand& W, double end, double x, double scale,
                                   double tol)
{
    if (x == end) return 0.0;
    const double dir = x > end ? 1.0 : -1.0;
    const EndRatio ratio(W, [end](double y) { return std::abs(y - end); }, end, dir * std::abs(scale));
    auto h = [&](double t) {
        const double y = end + dir * t * t;
        return 2.0 * u(y) * safe_inv_sqrt(ratio(y));
    };
    return dir * integrate_smooth(h, 0.0, std::sqrt(std::abs(x - end)), tol);
}

double integrate_inverse_sqrt_partial(const Integrand& u, const Integrand& W, double a, double b, double x,
                                      double full, double tol)
{
    if (!(x >= a && x <= b)) throw DomainError("partial libration integral: x outside [a, b]");
    if (x <= 0.5 * (a + b)) return integrate_inverse_sqrt_from(u, W, a, x, b - a, tol);
    if (std::isnan(full)) full = integrate_inverse_sqrt(u, W, a, b, tol);
    return full + integrate_inverse_sqrt_from(u, W, b, x, b - a, tol);
}

}  // namespace superint
