#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "superint/actions.hpp"
#include "superint/dynamics.hpp"
#include "superint/errors.hpp"
#include "superint/geometry.hpp"

using namespace superint;
using std::numbers::pi;

namespace {

Model central(RadialPotential radial, int m, int n, double k = 0.0)
{
    Model md;
    md.curv.k = k;
    md.radial = radial;
    md.angular = Central{m, n};
    return md;
}

Model ttw()
{
    AngularFamily f;
    f.alpha = 0.5;
    f.beta = -0.5;
    f.m = 3;
    f.n = 2;
    f.c0 = 0.5;
    f.link = OscillatorLink{0.5};
    Model md;
    md.radial = Oscillator{0.5, 1.0};
    md.angular = f;
    return md;
}

IntegratorControl gauss6(int steps = 600)
{
    IntegratorControl c;
    c.scheme = Scheme::gauss6;
    c.steps_per_period = steps;
    return c;
}

// Flat oscillator a = omega r^2 in Cartesian form: x'' = -2 omega x.
PhaseState oscillator_exact(const PhaseState& s0, double omega, double t)
{
    const double W = std::sqrt(2 * omega);
    const double x0 = s0.r * std::cos(s0.phi), y0 = s0.r * std::sin(s0.phi);
    const double vr = s0.p_r, vt = s0.p_phi / s0.r;
    const double vx0 = vr * std::cos(s0.phi) - vt * std::sin(s0.phi);
    const double vy0 = vr * std::sin(s0.phi) + vt * std::cos(s0.phi);
    const double c = std::cos(W * t), s = std::sin(W * t);
    const double x = x0 * c + vx0 / W * s, y = y0 * c + vy0 / W * s;
    const double vx = -x0 * W * s + vx0 * c, vy = -y0 * W * s + vy0 * c;
    PhaseState out;
    out.t = t;
    out.r = std::hypot(x, y);
    out.phi = std::atan2(y, x);
    out.p_r = (x * vx + y * vy) / out.r;
    out.p_phi = x * vy - y * vx;
    return out;
}

}  // namespace

TEST_CASE("Hamiltonian and Liouville integral")
{
    const Model md = ttw();
    const auto& f = std::get<AngularFamily>(md.angular);
    const PhaseState s{0.0, 1.3, angular_domain(f).phi0 + 0.05, 0.4, -0.7};
    const double l = 0.5 * s.p_phi * s.p_phi + angular_value(f, s.phi);
    CHECK(liouville_l(md, s.phi, s.p_phi) == doctest::Approx(l).epsilon(1e-15));
    const double H = 0.5 * s.p_r * s.p_r + l / (s.r * s.r) + 0.5 / (s.r * s.r) + s.r * s.r;
    CHECK(hamiltonian(md, s) == doctest::Approx(H).epsilon(1e-15));
}

TEST_CASE("vector field is Hamilton's equations")
{
    for (double k : {-0.4, 0.0, 0.6}) {
        Model md = ttw();
        md.curv.k = k;
        const auto& f = std::get<AngularFamily>(md.angular);
        const PhaseState s{0.0, 0.9, angular_domain(f).phi0 - 0.1, 0.3, 0.8};
        const StateVector y = to_vector(s);
        const StateVector dy = vector_field(md, y);
        const double h = 1e-6;
        StateVector grad{};
        for (int i = 0; i < 4; ++i) {
            StateVector a = y, b = y;
            a[i] += h;
            b[i] -= h;
            grad[i] = (hamiltonian(md, from_vector(a, 0)) - hamiltonian(md, from_vector(b, 0))) / (2 * h);
        }
        CHECK(dy[0] == doctest::Approx(grad[2]).epsilon(1e-8));
        CHECK(dy[1] == doctest::Approx(grad[3]).epsilon(1e-8));
        CHECK(dy[2] == doctest::Approx(-grad[0]).epsilon(1e-8));
        CHECK(dy[3] == doctest::Approx(-grad[1]).epsilon(1e-8));
    }
}

TEST_CASE("initial condition lies on the (E, L) level set")
{
    const Model md = ttw();
    const SeparationConstants c{6.0, 1.5};
    const PhaseState s = initial_condition(md, c);
    CHECK(hamiltonian(md, s) == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(liouville_l(md, s.phi, s.p_phi) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(s.p_r == 0.0);
    CHECK(s.r == doctest::Approx(turning_points(md, c).r_min).epsilon(1e-15));

    InitialChoice ch;
    ch.r = 0.5 * (turning_points(md, c).r_min + turning_points(md, c).r_max);
    ch.p_r_negative = true;
    const PhaseState t = initial_condition(md, c, ch);
    CHECK(t.p_r < 0);
    CHECK(hamiltonian(md, t) == doctest::Approx(6.0).epsilon(1e-13));

    ch.r = 100.0;
    CHECK_THROWS_AS(initial_condition(md, c, ch), DomainError);
}

TEST_CASE("scheme names")
{
    for (Scheme s : {Scheme::implicit_midpoint, Scheme::gauss4, Scheme::gauss6, Scheme::rkf78})
        CHECK(scheme_from_name(scheme_name(s)) == s);
    CHECK_FALSE(scheme_from_name("euler").has_value());
}

TEST_CASE("flat oscillator against the exact solution")
{
    const double omega = 1.0;
    const Model md = central(Oscillator{0.0, omega}, 2, 1);
    const PhaseState s0 = initial_condition(md, {3.0, 0.5});
    const double Tr = radial_period(md, {3.0, 0.5});
    CHECK(Tr == doctest::Approx(pi / std::sqrt(2 * omega)).epsilon(1e-12));

    const Trajectory traj = integrate(md, s0, 4 * Tr, gauss6());
    CHECK(traj.back().state.t == doctest::Approx(4 * Tr).epsilon(1e-14));
    CHECK(traj.max_relative_energy_drift() < 1e-12);
    CHECK(traj.max_relative_l_drift() < 1e-12);
    double err = 0;
    for (const auto& smp : traj.samples()) {
        const PhaseState e = oscillator_exact(s0, omega, smp.state.t);
        err = std::max(err, phase_distance(smp.state, e, true));
    }
    CHECK(err < 1e-9);

    // a centred ellipse closes after two radial periods
    CHECK(closure_detect(traj, 2).distance < 1e-9);
    CHECK(closure_detect(traj, 2).span == doctest::Approx(2 * Tr).epsilon(1e-10));
    CHECK(closure_detect(traj, 1).distance > 0.1);
    CHECK_THROWS_AS(closure_detect(traj, 5), InsufficientSpan);
}

TEST_CASE("Kepler orbit closes after one radial period")
{
    const Model md = central(GeneralizedKepler{0.0, 1.0, 0.0}, 1, 1);
    const SeparationConstants c{-0.125, 1.0};
    // semi-major axis 4, GM = 1
    CHECK(radial_period(md, c) == doctest::Approx(2 * pi * 8).epsilon(1e-10));
    const Trajectory traj = integrate(md, initial_condition(md, c), 2.5 * radial_period(md, c), gauss6(4000));
    CHECK(traj.max_relative_energy_drift() < 1e-11);
    CHECK(closure_detect(traj, 1).distance < 1e-8);
}

TEST_CASE("convergence order of the Gauss-Legendre schemes")
{
    const Model md = central(Oscillator{0.0, 1.0}, 2, 1);
    const PhaseState s0 = initial_condition(md, {3.0, 0.5});
    const double Tr = radial_period(md, {3.0, 0.5});
    const PhaseState exact = oscillator_exact(s0, 1.0, Tr);
    auto error = [&](Scheme sc, int steps) {
        IntegratorControl c;
        c.scheme = sc;
        c.steps_per_period = steps;
        return phase_distance(integrate(md, s0, Tr, c).back().state, exact, true);
    };
    struct Case {
        Scheme scheme;
        int steps;
        double order;
    };
    for (const Case& cs : {Case{Scheme::implicit_midpoint, 200, 2}, Case{Scheme::gauss4, 40, 4},
                           Case{Scheme::gauss6, 16, 6}}) {
        const double ratio = error(cs.scheme, cs.steps) / error(cs.scheme, 2 * cs.steps);
        const double observed = std::log2(ratio);
        CHECK(observed == doctest::Approx(cs.order).epsilon(0.15));
    }
}

TEST_CASE("symmetric schemes are time reversible")
{
    const Model md = ttw();
    const PhaseState s0 = initial_condition(md, {6.0, 1.5});
    const double Tr = radial_period(md, {6.0, 1.5});
    const Trajectory fwd = integrate(md, s0, 0.7 * Tr, gauss6(100));
    PhaseState back = fwd.back().state;
    back.p_r = -back.p_r;
    back.p_phi = -back.p_phi;
    back.t = 0;
    IntegratorControl c = gauss6(100);
    c.dt = fwd.samples()[1].state.t - fwd.samples()[0].state.t;
    c.samples_per_period = 1;
    PhaseState ret = integrate(md, back, 0.7 * Tr, c).back().state;
    ret.p_r = -ret.p_r;
    ret.p_phi = -ret.p_phi;
    CHECK(phase_distance(ret, s0, false) < 1e-12);
}

TEST_CASE("angular libration stays inside the domain")
{
    const Model md = ttw();
    const SeparationConstants c{6.0, 1.5};
    const TurningPoints tp = turning_points(md, c);
    const Trajectory traj = integrate(md, initial_condition(md, c), 6 * radial_period(md, c), gauss6());
    CHECK(traj.max_relative_energy_drift() < 1e-10);
    CHECK(traj.max_relative_l_drift() < 1e-10);
    for (const auto& s : traj.samples()) {
        CHECK(s.state.phi >= tp.phi_min - 1e-9);
        CHECK(s.state.phi <= tp.phi_max + 1e-9);
        CHECK(s.state.r >= tp.r_min - 1e-9);
        CHECK(s.state.r <= tp.r_max + 1e-9);
    }
    // nu = 3/2 for m/n = 3/2 with the oscillator link: closes after m = 3 radial periods
    CHECK(closure_detect(traj, 3).distance < 1e-8);
    CHECK(closure_detect(traj, 1).distance > 1e-3);
}

TEST_CASE("adaptive scheme")
{
    const Model md = ttw();
    const SeparationConstants c{6.0, 1.5};
    IntegratorControl ctl;
    ctl.scheme = Scheme::rkf78;
    ctl.samples_per_period = 2000;
    const Trajectory traj = integrate(md, initial_condition(md, c), 4.2 * radial_period(md, c), ctl);
    CHECK(traj.max_relative_energy_drift() < 1e-10);
    CHECK(closure_detect(traj, 3).distance < 1e-7);
}

TEST_CASE("curved backgrounds conserve H and l")
{
    for (double k : {-0.5, 1.0}) {
        Model md = ttw();
        md.curv.k = k;
        const double L = 1.5;
        const double rstar = effective_minimum(md, L);
        const double rcap = k > 0 ? 0.9 * chart_limit(md.curv) : 50.0;
        const double vmin = effective_potential(md, L, rstar);
        const double E = vmin + 0.3 * (effective_potential(md, L, rcap) - vmin);
        const SeparationConstants c{E, L};
        const Trajectory traj = integrate(md, initial_condition(md, c), 3 * radial_period(md, c), gauss6());
        CHECK(traj.max_relative_energy_drift() < 1e-10);
        CHECK(traj.max_relative_l_drift() < 1e-10);
    }
}

TEST_CASE("interpolation and distance")
{
    const Model md = central(Oscillator{0.0, 1.0}, 2, 1);
    const PhaseState s0 = initial_condition(md, {3.0, 0.5});
    const Trajectory traj = integrate(md, s0, 1.0, gauss6());
    const PhaseState mid = traj.at(0.37);
    CHECK(phase_distance(mid, oscillator_exact(s0, 1.0, 0.37), true) < 1e-9);

    PhaseState a{}, b{};
    a.phi = pi - 0.01;
    b.phi = -pi + 0.01;
    CHECK(phase_distance(a, b, true) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(phase_distance(a, b, false) == doctest::Approx(2 * pi - 0.02).epsilon(1e-12));
}

TEST_CASE("trajectory CSV")
{
    const Model md = central(Oscillator{0.0, 1.0}, 2, 1);
    IntegratorControl c = gauss6(60);
    c.samples_per_period = 10;
    const Trajectory traj = integrate(md, initial_condition(md, {3.0, 0.5}), 2 * radial_period(md, {3.0, 0.5}), c);
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,r,phi,p_r,p_phi,H,l,Phi");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(line.substr(line.rfind(',') + 1) == "nan");
    }
    CHECK(rows == traj.size());
    CHECK(traj.size() >= 21);
    CHECK(traj.size() <= 22);
}
