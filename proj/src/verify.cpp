#include "superint/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <json.hpp>

#include "superint/actions.hpp"
#include "superint/errors.hpp"
#include "superint/superconstants.hpp"

namespace superint {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string num(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string describe_family(const AngularFamily& fam)
{
    std::ostringstream os;
    os << "family alpha=" << num(fam.alpha) << " beta=" << num(fam.beta) << " m=" << fam.m << " n=" << fam.n
       << " c0=" << num(fam.c0) << " nu=" << num(nu(fam));
    if (const auto* o = std::get_if<OscillatorLink>(&fam.link)) {
        os << " link=oscillator(gamma=" << num(o->gamma) << ")";
    } else {
        const auto& k = std::get<KeplerLink>(fam.link);
        os << " link=kepler(B=" << num(k.B) << ", F=" << num(k.F) << ")";
    }
    if (fam.nu_override) os << " nu_override";
    return os.str();
}

std::string describe_model(const Model& model)
{
    std::ostringstream os;
    os << "k=" << num(model.curv.k) << " radial=" << describe(model.radial) << " ";
    if (is_central(model)) {
        const auto& c = std::get<Central>(model.angular);
        os << "central m=" << c.m << " n=" << c.n;
    } else {
        os << describe_family(family_of(model));
    }
    return os.str();
}

const char* kind_name(CheckKind k)
{
    switch (k) {
    case CheckKind::requirement: return "requirement";
    case CheckKind::control: return "control";
    case CheckKind::info: return "info";
    }
    return "?";
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), std::numeric_limits<double>::min()); }

// Irrational ratio near 1 used to detune nu in the controls.
const double detune = 1.0 + (std::sqrt(2.0) - 1.0) / 10.0;

struct OrbitResult {
    double energy_drift = nan;
    double closure = nan;
    double phase_drift = nan;
    std::string error;
};

OrbitResult run_orbit(const Model& model, const SeparationConstants& c, int m, double periods,
                      const IntegratorControl& control, int phase_per_period, bool want_phase, std::optional<Trajectory>* keep = nullptr)
{
    OrbitResult out;
    try {
        const auto start = initial_condition(model, c);
        const double T = radial_period(model, c);
        const double span = std::max(periods, m + 2.0) * T;
        auto traj = integrate(model, start, span, control);
        out.energy_drift = traj.max_relative_energy_drift();
        out.closure = closure_detect(traj, m).distance;
        if (want_phase) {
            const std::size_t per_period = traj.size() / static_cast<std::size_t>(std::ceil(span / T));
            std::size_t stride = std::max<std::size_t>(1, per_period / std::max(phase_per_period, 1));
            // eccentric orbits sweep most of Y~ near pericentre: refine until the branch is tracked
            for (;;) {
                try {
                    out.phase_drift = phase_drift(phase_along(model, traj, PhasePath::quadrature, stride));
                    break;
                } catch (const BranchTrackingError&) {
                    if (stride == 1) throw;
                    stride /= 2;
                }
            }
        }
        if (keep) *keep = std::move(traj);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void VerificationReport::require(std::string name, double measured, double tolerance, std::string detail)
{
    checks.push_back({std::move(name), measured, tolerance, CheckKind::requirement, measured <= tolerance, std::move(detail)});
}

void VerificationReport::require_above(std::string name, double measured, double threshold, std::string detail)
{
    checks.push_back({std::move(name), measured, threshold, CheckKind::requirement, measured > threshold, std::move(detail), true});
}

void VerificationReport::control(std::string name, double measured, double tolerance, std::string detail)
{
    checks.push_back({std::move(name), measured, tolerance, CheckKind::control, measured > tolerance, std::move(detail)});
}

void VerificationReport::info(std::string name, double measured, std::string detail)
{
    checks.push_back({std::move(name), measured, nan, CheckKind::info, true, std::move(detail)});
}

bool VerificationReport::pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.kind == CheckKind::info || c.pass; });
}

bool VerificationReport::broken() const
{
    return std::any_of(checks.begin(), checks.end(), [](const Check& c) { return c.kind == CheckKind::control && !c.pass; });
}

std::string to_json(const std::vector<VerificationReport>& reports)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    bool all = true;
    for (const auto& r : reports) {
        nlohmann::ordered_json j;
        j["suite"] = r.suite;
        j["seed"] = r.seed;
        j["pass"] = r.pass();
        j["broken"] = r.broken();
        j["descriptors"] = r.descriptors;
        nlohmann::ordered_json cs = nlohmann::ordered_json::array();
        for (const auto& c : r.checks) {
            nlohmann::ordered_json cj;
            cj["name"] = c.name;
            cj["kind"] = kind_name(c.kind);
            cj["comparison"] = (c.kind == CheckKind::control || c.lower_bound) ? ">" : "<=";
            cj["measured"] = std::isfinite(c.measured) ? nlohmann::ordered_json(c.measured) : nlohmann::ordered_json();
            cj["tolerance"] = std::isfinite(c.tolerance) ? nlohmann::ordered_json(c.tolerance) : nlohmann::ordered_json();
            cj["pass"] = c.pass;
            if (!c.detail.empty()) cj["detail"] = c.detail;
            cs.push_back(std::move(cj));
        }
        j["checks"] = std::move(cs);
        arr.push_back(std::move(j));
        all = all && r.pass();
    }
    nlohmann::ordered_json root;
    root["schema"] = "superint-report/1";
    root["pass"] = all;
    root["suites"] = std::move(arr);
    return root.dump(2) + "\n";
}

std::string to_text(const std::vector<VerificationReport>& reports)
{
    std::ostringstream os;
    for (const auto& r : reports) {
        std::size_t width = 4;
        for (const auto& c : r.checks) width = std::max(width, c.name.size());
        os << "suite " << r.suite << " (seed " << r.seed << "): " << (r.pass() ? "PASS" : "FAIL")
           << (r.broken() ? " [negative control passed: suite broken]" : "") << "\n";
        for (const auto& d : r.descriptors) os << "  # " << d << "\n";
        for (const auto& c : r.checks) {
            char buf[128];
            const char* verdict = c.kind == CheckKind::info ? "info" : (c.pass ? "ok" : "FAIL");
            const char* cmp = (c.kind == CheckKind::control || c.lower_bound) ? ">" : "<=";
            if (c.kind == CheckKind::info)
                std::snprintf(buf, sizeof buf, "%12.4e  %2s %10s  %s", c.measured, "", "", verdict);
            else
                std::snprintf(buf, sizeof buf, "%12.4e  %2s %10.3e  %s", c.measured, cmp, c.tolerance, verdict);
            os << "  " << c.name << std::string(width - c.name.size() + 2, ' ') << buf;
            if (!c.detail.empty()) os << "  (" << c.detail << ")";
            os << "\n";
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------

RadialPotential radial_of_link(const AngularFamily& fam)
{
    if (const auto* o = std::get_if<OscillatorLink>(&fam.link)) return Oscillator{o->gamma, 1.0};
    const auto& k = std::get<KeplerLink>(fam.link);
    return GeneralizedKepler{k.B, 1.0, k.F};
}

std::vector<double> bounded_L_values(const Model& model, double E, const std::vector<double>& L_grid)
{
    std::vector<double> out;
    for (double L : L_grid) {
        try {
            const auto [a, b] = radial_turning_points(model, {E, L});
            if (a < b) out.push_back(L);
        } catch (const std::exception&) {
        }
    }
    return out;
}

VerificationReport suite_isoperiodicity(const IsoperiodicityInput& in, const Tolerances& tol)
{
    if (in.families.size() < 2) throw std::invalid_argument("isoperiodicity needs at least two families");
    if (in.L_grid.empty()) throw std::invalid_argument("isoperiodicity needs a non-empty L grid");
    VerificationReport rep;
    rep.suite = "isoperiodicity";
    for (const auto& f : in.families) rep.descriptors.push_back(describe_family(f));

    double spread = 0.0;
    double relation = 0.0;
    double control = std::numeric_limits<double>::infinity();
    AngularFamily detuned = in.families.front();
    detuned.nu_override = nu(detuned) * in.control_nu_factor;
    for (double L : in.L_grid) {
        std::vector<double> T;
        for (const auto& f : in.families) T.push_back(period_T_quadrature(f, L));
        const auto [lo, hi] = std::minmax_element(T.begin(), T.end());
        spread = std::max(spread, (*hi - *lo) / *lo);
        const double analytic = -2.0 * std::numbers::pi * (static_cast<double>(in.families.front().m) / in.families.front().n) *
                                dJr_dL(radial_of_link(in.families.front()), L);
        for (double t : T) relation = std::max(relation, rel(t, analytic));
        control = std::min(control, rel(period_T_quadrature(detuned, L), T.front()));
    }
    rep.require("max pairwise relative T(L) spread", spread, tol.isoperiodicity,
                std::to_string(in.families.size()) + " families, " + std::to_string(in.L_grid.size()) + " L values");
    rep.require("T(L) vs -2 pi (m/n) dJr/dL", relation, tol.period_relation);
    rep.control("perturbed-nu family differs", control, tol.isoperiodicity,
                "nu scaled by " + num(in.control_nu_factor));
    return rep;
}

VerificationReport suite_superintegrability(const SuperintegrabilityInput& in, const Tolerances& tol)
{
    VerificationReport rep;
    rep.suite = "superintegrability";
    rep.seed = in.seed;
    rep.descriptors.push_back(describe_model(in.model));
    rep.descriptors.push_back("E=" + num(in.E) + " scheme=" + scheme_name(in.control.scheme));
    if (in.L_grid.size() < 2) throw std::invalid_argument("superintegrability needs at least two L values");

    const int m = model_m(in.model);
    const int n = model_n(in.model);
    const auto comb = action_combination_check(in.model, in.E, in.L_grid, m, n, tol.combination);
    rep.require("m J_r + n J_phi relative spread", comb.relative_spread, tol.combination,
                "f(E)=" + num(comb.mean) + " over " + std::to_string(in.L_grid.size()) + " L values");

    std::mt19937_64 rng(in.seed);
    const int orbits = std::clamp(in.orbits, 1, static_cast<int>(in.L_grid.size()));
    for (int k = 0; k < orbits; ++k) {
        const std::size_t idx = orbits == 1 ? in.L_grid.size() / 2 : k * (in.L_grid.size() - 1) / (orbits - 1);
        const SeparationConstants c{in.E, in.L_grid[idx]};
        const std::string tag = " [L=" + num(c.L) + "]";
        std::optional<Trajectory> kept;
        const auto res = run_orbit(in.model, c, m, in.periods, in.control, in.phase_samples_per_period, true, &kept);
        if (!res.error.empty()) {
            rep.require("orbit" + tag, nan, 0.0, res.error);
            continue;
        }
        const Trajectory& traj = *kept;
        rep.require("energy drift" + tag, res.energy_drift, tol.energy_drift);
        rep.require("closure distance after m periods" + tag, res.closure, tol.closure, "m=" + std::to_string(m));
        rep.require("Phi drift (quadrature)" + tag, res.phase_drift, tol.phase_drift);

        const auto ctx = make_phase_context(in.model, traj.front().state);
        std::uniform_real_distribution<double> when(traj.front().state.t, traj.back().state.t);
        const bool closed = has_y_closed(in.model) &&
                            (is_central(in.model) || has_z_closed(family_of(in.model)));
        if (closed && in.closed_form_states > 0) {
            double worst = 0.0;
            for (int i = 0; i < in.closed_form_states; ++i) {
                const auto st = traj.at(when(rng));
                const double q = phase_phi(ctx, st, PhasePath::quadrature).Phi;
                const double cl = phase_phi(ctx, st, PhasePath::closed).Phi;
                worst = std::max(worst, std::abs(cl - q) / std::max(std::abs(q), 1.0));
            }
            rep.require("closed form vs quadrature Phi" + tag, worst, tol.closed_vs_quadrature,
                        std::to_string(in.closed_form_states) + " random on-orbit states");
        }
        double smallest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < in.independence_points; ++i) {
            smallest = std::min(smallest, functional_independence(in.model, traj.at(when(rng))).smallest);
        }
        if (in.independence_points > 0)
            rep.require_above("smallest singular value of d(H, l, Re C)" + tag, smallest, tol.independence,
                        std::to_string(in.independence_points) + " random on-orbit points");
    }

    if (in.with_control && !is_central(in.model)) {
        Model detuned = in.model;
        auto fam = family_of(in.model);
        fam.nu_override = nu(fam) * detune;
        detuned.angular = fam;
        const SeparationConstants c{in.E, in.L_grid[in.L_grid.size() / 2]};
        const auto res = run_orbit(detuned, c, m, in.periods, in.control, 0, false);
        rep.control("irrational-nu copy does not close", res.error.empty() ? res.closure : nan, tol.closure,
                    res.error.empty() ? "nu scaled by " + num(detune) : res.error);
    }
    return rep;
}

VerificationReport suite_bertrand(const Tolerances& tol)
{
    VerificationReport rep;
    rep.suite = "bertrand";
    IntegratorControl control{Scheme::gauss6};

    Model osc;
    osc.radial = Oscillator{0.0, 1.0};
    osc.angular = Central{2, 1};
    Model kep;
    kep.radial = GeneralizedKepler{0.0, 1.0, 0.0};
    kep.angular = Central{1, 1};
    Model cubic;
    cubic.radial = PowerLaw{1.0, 3.0};
    cubic.angular = Central{1, 1};
    for (const Model* md : {&osc, &kep, &cubic}) rep.descriptors.push_back(describe_model(*md));

    const auto o = run_orbit(osc, {3.0, 0.5}, 2, 4.0, control, 0, false);
    rep.require("central oscillator closes after 2 radial periods", o.error.empty() ? o.closure : nan, tol.closure,
                o.error);
    const auto k = run_orbit(kep, {-0.3, 0.5}, 1, 3.0, control, 0, false);
    rep.require("central Kepler closes after 1 radial period", k.error.empty() ? k.closure : nan, tol.closure, k.error);

    double best = std::numeric_limits<double>::infinity();
    std::string err;
    for (int mm = 1; mm <= 4; ++mm) {
        const auto c = run_orbit(cubic, {2.0, 0.5}, mm, 6.0, control, 0, false);
        if (!c.error.empty()) {
            err = c.error;
            best = nan;
            break;
        }
        best = std::min(best, c.closure);
    }
    rep.control("r^3 orbit does not close within 4 radial periods", best, tol.closure, err);
    return rep;
}

VerificationReport suite_abel_consistency(const AbelInput& in, const Tolerances& tol)
{
    VerificationReport rep;
    rep.suite = "abel_consistency";
    rep.descriptors.push_back(describe_family(in.family));
    const auto& fam = in.family;
    const RadialPotential radial = radial_of_link(fam);
    const double ratio = static_cast<double>(fam.m) / fam.n;

    double relation = 0.0;
    double control = std::numeric_limits<double>::infinity();
    double inverse = 0.0;
    bool ordered = true;
    const double phi0 = angular_domain(fam).phi0;
    for (double L : in.L_grid) {
        const double T = period_T_quadrature(fam, L);
        const double rhs = -2.0 * std::numbers::pi * ratio * dJr_dL(radial, L);
        relation = std::max(relation, rel(T, rhs));
        control = std::min(control, rel(T, rhs / in.control_nu_factor));

        for (int i = 1; i <= in.branch_points; ++i) {
            const double c = fam.c0 + (L - fam.c0) * i / in.branch_points;
            const double f = f_of_c(fam, c);
            for (Side side : {Side::left, Side::right}) {
                const double phi = phi_of_ftilde(fam, f, side);
                ordered = ordered && (side == Side::left ? phi <= phi0 : phi >= phi0);
                inverse = std::max(inverse, rel(angular_value(fam, phi), c));
            }
        }
    }
    rep.require("T(L) vs -2 pi (m/n) dJr/dL", relation, tol.period_relation);
    rep.require("c(phi_pm(c)) = c on both branches", inverse, tol.branch_inverse,
                std::to_string(in.branch_points) + " c values per L");
    rep.require("branches on the correct side of phi0", ordered ? 0.0 : 1.0, 0.0);
    rep.control("wrong nu on the right-hand side differs", control, tol.period_relation,
                "nu scaled by " + num(in.control_nu_factor));
    return rep;
}

}  // namespace superint
