#include "superint/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "superint/actions.hpp"
#include "superint/errors.hpp"

namespace superint {

namespace {

constexpr double pi = std::numbers::pi;

struct Tableau {
    int s;
    double a[3][3];
    double b[3];
    double c[3];
};

const Tableau& tableau(Scheme scheme)
{
    static const double r3 = std::sqrt(3.0);
    static const double r15 = std::sqrt(15.0);
    static const Tableau midpoint{1, {{0.5}}, {1.0}, {0.5}};
    static const Tableau g4{2,
                            {{0.25, 0.25 - r3 / 6.0}, {0.25 + r3 / 6.0, 0.25}},
                            {0.5, 0.5},
                            {0.5 - r3 / 6.0, 0.5 + r3 / 6.0}};
    static const Tableau g6{3,
                            {{5.0 / 36.0, 2.0 / 9.0 - r15 / 15.0, 5.0 / 36.0 - r15 / 30.0},
                             {5.0 / 36.0 + r15 / 24.0, 2.0 / 9.0, 5.0 / 36.0 - r15 / 24.0},
                             {5.0 / 36.0 + r15 / 30.0, 2.0 / 9.0 + r15 / 15.0, 5.0 / 36.0}},
                            {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0},
                            {0.5 - r15 / 10.0, 0.5, 0.5 + r15 / 10.0}};
    switch (scheme) {
    case Scheme::gauss4: return g4;
    case Scheme::gauss6: return g6;
    default: return midpoint;
    }
}

/// Rejected step: caught by the halving logic.
struct StepRejected {};

class Stepper {
public:
    Stepper(const Model& model, const IntegratorControl& control)
        : model_(model), control_(control), tab_(tableau(control.scheme))
    {
        if (!is_central(model)) {
            const AngularDomain dom = angular_domain(family_of(model));
            lo_ = dom.phi_tilde + control.boundary_guard;
            hi_ = dom.phi_end - control.boundary_guard;
        }
    }

    StateVector field(const StateVector& y) const
    {
        if (!(y[1] > lo_ && y[1] < hi_)) throw StepRejected{};
        try {
            StateVector f = vector_field(model_, y);
            for (double v : f)
                if (!std::isfinite(v)) throw StepRejected{};
            return f;
        } catch (const DomainError&) {
            throw StepRejected{};
        }
    }

    /// One Gauss-Legendre step; throws StepRejected.
    StateVector gauss_step(const StateVector& y, double h) const
    {
        const int s = tab_.s;
        std::array<StateVector, 3> K;
        const StateVector f0 = field(y);
        for (int i = 0; i < s; ++i) K[i] = f0;
        double scale = 1.0;
        for (double v : y) scale = std::max(scale, std::abs(v));
        for (int it = 0; it < control_.max_iterations; ++it) {
            double change = 0.0;
            std::array<StateVector, 3> next;
            for (int i = 0; i < s; ++i) {
                StateVector Y = y;
                for (int j = 0; j < s; ++j)
                    for (int d = 0; d < 4; ++d) Y[d] += h * tab_.a[i][j] * K[j][d];
                next[i] = field(Y);
                for (int d = 0; d < 4; ++d) change = std::max(change, std::abs(h * (next[i][d] - K[i][d])));
            }
            K = next;
            if (change <= control_.fixed_point_tol * scale) {
                StateVector out = y;
                for (int i = 0; i < s; ++i)
                    for (int d = 0; d < 4; ++d) out[d] += h * tab_.b[i] * K[i][d];
                field(out);  // the new state must be admissible too
                return out;
            }
        }
        throw StepRejected{};
    }

    /// Step of size h, halving on rejection.
    StateVector step(const StateVector& y, double h, int depth, double t) const
    {
        try {
            return gauss_step(y, h);
        } catch (const StepRejected&) {
            if (depth >= control_.max_halvings)
                throw StepFailure("step rejected after repeated halving", from_vector(y, t));
            const StateVector mid = step(y, 0.5 * h, depth + 1, t);
            return step(mid, 0.5 * h, depth + 1, t + 0.5 * h);
        }
    }

private:
    const Model& model_;
    const IntegratorControl& control_;
    const Tableau& tab_;
    double lo_ = -std::numeric_limits<double>::infinity();
    double hi_ = std::numeric_limits<double>::infinity();
};

Sample make_sample(const Model& model, const PhaseState& s)
{
    Sample out;
    out.state = s;
    out.derivative = vector_field(model, to_vector(s));
    out.H = hamiltonian(model, s);
    out.l = liouville_l(model, s.phi, s.p_phi);
    return out;
}

double hermite(double y0, double d0, double y1, double d1, double h, double u)
{
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * d0 + (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * h * d1;
}

double relative_drift(const std::vector<Sample>& s, double Sample::*field)
{
    if (s.empty()) return 0.0;
    const double v0 = s.front().*field;
    double worst = 0.0;
    for (const Sample& x : s) worst = std::max(worst, std::abs(x.*field - v0));
    return worst / std::max(std::abs(v0), std::numeric_limits<double>::min());
}

}  // namespace

StateVector to_vector(const PhaseState& s) { return {s.r, s.phi, s.p_r, s.p_phi}; }

PhaseState from_vector(const StateVector& y, double t) { return {t, y[0], y[1], y[2], y[3]}; }

double hamiltonian(const Model& model, const PhaseState& state)
{
    const double s = s_k(model.curv, state.r);
    const double l = liouville_l(model, state.phi, state.p_phi);
    return 0.5 * state.p_r * state.p_r + l / (s * s) + radial_value(model.radial, model.curv, state.r);
}

double liouville_l(const AngularFamily& fam, double phi, double p_phi)
{
    return 0.5 * p_phi * p_phi + angular_value(fam, phi);
}

double liouville_l(const Model& model, double phi, double p_phi)
{
    return 0.5 * p_phi * p_phi + angular_c(model, phi);
}

StateVector vector_field(const Model& model, const StateVector& y)
{
    const double r = y[0];
    const double phi = y[1];
    const double pr = y[2];
    const double pphi = y[3];
    const double s = s_k(model.curv, r);
    const double sp = s_k_prime(model.curv, r);
    const double s2 = s * s;
    const double l = 0.5 * pphi * pphi + angular_c(model, phi);
    return {pr, pphi / s2, 2.0 * l * sp / (s2 * s) - radial_derivative(model.radial, model.curv, r),
            -angular_c_prime(model, phi) / s2};
}

PhaseState initial_condition(const Model& model, const SeparationConstants& consts, const InitialChoice& choice)
{
    const TurningPoints tp = turning_points(model, consts);
    PhaseState s;
    s.r = choice.r.value_or(tp.r_min);
    if (!(s.r >= tp.r_min && s.r <= tp.r_max)) throw DomainError("initial r outside the radial libration");
    if (is_central(model)) {
        s.phi = choice.phi.value_or(0.0);
    } else {
        s.phi = choice.phi.value_or(angular_domain(family_of(model)).phi0);
        if (!(s.phi >= tp.phi_min && s.phi <= tp.phi_max))
            throw DomainError("initial phi outside the angular libration");
    }
    const double gr = s.r == tp.r_min || s.r == tp.r_max ? 0.0 : std::max(radial_gap(model, consts, s.r), 0.0);
    const double ga = is_central(model) ? consts.L
                      : (s.phi == tp.phi_min || s.phi == tp.phi_max)
                          ? 0.0
                          : std::max(consts.L - angular_c(model, s.phi), 0.0);
    s.p_r = std::sqrt(2.0 * gr) * (choice.p_r_negative ? -1.0 : 1.0);
    s.p_phi = std::sqrt(2.0 * ga) * (choice.p_phi_negative ? -1.0 : 1.0);
    return s;
}

const char* scheme_name(Scheme s)
{
    switch (s) {
    case Scheme::implicit_midpoint: return "implicit_midpoint";
    case Scheme::gauss4: return "gauss4";
    case Scheme::gauss6: return "gauss6";
    case Scheme::rkf78: return "rkf78";
    }
    return "?";
}

std::optional<Scheme> scheme_from_name(const std::string& name)
{
    for (Scheme s : {Scheme::implicit_midpoint, Scheme::gauss4, Scheme::gauss6, Scheme::rkf78})
        if (name == scheme_name(s)) return s;
    return std::nullopt;
}

int default_steps_per_period(Scheme s)
{
    switch (s) {
    case Scheme::implicit_midpoint: return 500000;
    case Scheme::gauss4: return 3000;
    case Scheme::gauss6: return 600;
    case Scheme::rkf78: return 0;
    }
    return 0;
}

Trajectory::Trajectory(std::vector<Sample> samples, bool rotating, double radial_period)
    : samples_(std::move(samples)), rotating_(rotating), radial_period_(radial_period)
{
    if (samples_.empty()) throw std::invalid_argument("empty trajectory");
}

PhaseState Trajectory::at(double t) const
{
    const bool forward = samples_.back().state.t >= samples_.front().state.t;
    auto less = [forward](const Sample& s, double x) { return forward ? s.state.t < x : s.state.t > x; };
    auto it = std::lower_bound(samples_.begin(), samples_.end(), t, less);
    if (it == samples_.end() || (it == samples_.begin() && it->state.t != t))
        throw DomainError("time outside the trajectory");
    if (it->state.t == t) return it->state;
    const Sample& s1 = *it;
    const Sample& s0 = *(it - 1);
    const double h = s1.state.t - s0.state.t;
    const double u = (t - s0.state.t) / h;
    const StateVector y0 = to_vector(s0.state);
    const StateVector y1 = to_vector(s1.state);
    StateVector y;
    for (int d = 0; d < 4; ++d) y[d] = hermite(y0[d], s0.derivative[d], y1[d], s1.derivative[d], h, u);
    return from_vector(y, t);
}

double Trajectory::max_relative_energy_drift() const { return relative_drift(samples_, &Sample::H); }
double Trajectory::max_relative_l_drift() const { return relative_drift(samples_, &Sample::l); }

Trajectory integrate(const Model& model, const PhaseState& start, double t_final, const IntegratorControl& control)
{
    const double E = hamiltonian(model, start);
    const double L = liouville_l(model, start.phi, start.p_phi);
    double Tr = std::numeric_limits<double>::quiet_NaN();
    try {
        Tr = radial_period(model, {E, L});
    } catch (const std::exception&) {
        if (control.dt <= 0) throw;
    }
    const double span = t_final - start.t;
    std::vector<Sample> samples;
    samples.push_back(make_sample(model, start));
    if (span == 0) return Trajectory(std::move(samples), is_central(model), Tr);

    if (control.scheme == Scheme::rkf78) {
        namespace ode = boost::numeric::odeint;
        using stepper_t = ode::runge_kutta_fehlberg78<StateVector>;
        auto sys = [&](const StateVector& y, StateVector& dy, double) { dy = vector_field(model, y); };
        const int per = std::max(control.samples_per_period, 1);
        const double dt_sample = control.dt > 0 ? control.dt : Tr / per;
        const long n = std::max(1L, static_cast<long>(std::ceil(std::abs(span) / dt_sample)));
        const double h = span / static_cast<double>(n);
        StateVector y = to_vector(start);
        auto stepper = ode::make_controlled(control.rkf_tolerance, control.rkf_tolerance, stepper_t());
        double t = start.t;
        for (long i = 1; i <= n; ++i) {
            const double t_next = start.t + h * static_cast<double>(i);
            try {
                ode::integrate_adaptive(stepper, sys, y, t, t_next, h / 8.0);
            } catch (const DomainError&) {
                throw StepFailure("adaptive step left the domain", samples.back().state);
            }
            t = t_next;
            samples.push_back(make_sample(model, from_vector(y, t)));
        }
        return Trajectory(std::move(samples), is_central(model), Tr);
    }

    const int steps_per_period = control.steps_per_period > 0 ? control.steps_per_period
                                                              : default_steps_per_period(control.scheme);
    const double dt = control.dt > 0 ? control.dt : Tr / steps_per_period;
    const long n = std::max(1L, static_cast<long>(std::ceil(std::abs(span) / dt)));
    const double h = span / static_cast<double>(n);
    const long per_period = control.dt > 0 && std::isfinite(Tr) ? std::lround(Tr / dt) : steps_per_period;
    const long stride = std::max(1L, per_period / std::max(control.samples_per_period, 1));

    const Stepper stepper(model, control);
    StateVector y = to_vector(start);
    for (long i = 1; i <= n; ++i) {
        const double t_prev = start.t + h * static_cast<double>(i - 1);
        y = stepper.step(y, h, 0, t_prev);
        if (i % stride == 0 || i == n) {
            const double t = start.t + h * static_cast<double>(i);
            samples.push_back(make_sample(model, from_vector(y, t)));
        }
    }
    return Trajectory(std::move(samples), is_central(model), Tr);
}

double phase_distance(const PhaseState& a, const PhaseState& b, bool rotating)
{
    double dphi = b.phi - a.phi;
    if (rotating) dphi = std::remainder(dphi, 2.0 * pi);
    const double dr = b.r - a.r;
    const double dpr = b.p_r - a.p_r;
    const double dpp = b.p_phi - a.p_phi;
    return std::sqrt(dr * dr + dphi * dphi + dpr * dpr + dpp * dpp);
}

ClosureReport closure_detect(const Trajectory& traj, int m)
{
    if (m <= 0) throw std::invalid_argument("closure_detect: m must be positive");
    ClosureReport rep;
    rep.m = m;
    const auto& s = traj.samples();
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const Sample& a = s[i];
        const Sample& b = s[i + 1];
        if (!(a.state.p_r < 0 && b.state.p_r >= 0)) continue;
        const double h = b.state.t - a.state.t;
        auto g = [&](double u) { return hermite(a.state.p_r, a.derivative[2], b.state.p_r, b.derivative[2], h, u); };
        double u = 1.0;
        if (b.state.p_r != 0) {
            boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
            std::uintmax_t it = 100;
            const auto [lo, hi] = boost::math::tools::toms748_solve(g, 0.0, 1.0, tol, it);
            u = 0.5 * (lo + hi);
        }
        rep.crossing_times.push_back(a.state.t + u * h);
    }
    if (static_cast<int>(rep.crossing_times.size()) < m + 1)
        throw InsufficientSpan("trajectory has " + std::to_string(rep.crossing_times.size()) +
                               " passages through r_min; closure after " + std::to_string(m) + " radial periods needs " +
                               std::to_string(m + 1));
    rep.span = rep.crossing_times[m] - rep.crossing_times[0];
    rep.start = traj.front().state;
    rep.end = traj.at(traj.front().state.t + rep.span);
    rep.distance = phase_distance(rep.start, rep.end, traj.rotating());
    return rep;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<double>* phi_values)
{
    os << "t,r,phi,p_r,p_phi,H,l,Phi\n";
    char buf[512];
    const auto& s = traj.samples();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double Phi =
            phi_values && i < phi_values->size() ? (*phi_values)[i] : std::numeric_limits<double>::quiet_NaN();
        const PhaseState& x = s[i].state;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x.t, x.r, x.phi, x.p_r,
                      x.p_phi, s[i].H, s[i].l, Phi);
        os << buf;
    }
}

}  // namespace superint
