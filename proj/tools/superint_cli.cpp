// superint: tabulate potentials, trace orbits and run the verification suites
// from a YAML config. Exit codes: 0 ok, 1 suite or integration failure,
// 2 bad input (config, domain, no bounded motion).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "superint/actions.hpp"
#include "superint/config.hpp"
#include "superint/dynamics.hpp"
#include "superint/errors.hpp"
#include "superint/superconstants.hpp"
#include "superint/verify.hpp"

namespace fs = std::filesystem;
using namespace superint;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

/// Invalid input; exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string g17(double x)
{
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_table(const fs::path& path, const Table& t, const std::string& format)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    if (format == "json") {
        nlohmann::ordered_json j;
        j["columns"] = t.columns;
        auto rows = nlohmann::ordered_json::array();
        for (const auto& r : t.rows) {
            auto row = nlohmann::ordered_json::array();
            for (double x : r) row.push_back(std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json());
            rows.push_back(std::move(row));
        }
        j["rows"] = std::move(rows);
        os << j.dump() << "\n";
        return;
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << g17(r[i]);
        os << "\n";
    }
}

std::vector<double> interior(double a, double b, int n)
{
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = a + (b - a) * (i + 1) / (n + 1);
    return x;
}

std::vector<double> closed(double a, double b, int n)
{
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
    return x;
}

struct Options {
    std::string config;
    std::string out;
    std::string suites;
    int grid = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string format;
};

fs::path prepare_out(const Config& c)
{
    fs::path dir(c.output.directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

std::string ext(const Config& c) { return c.output.format == "json" ? ".json" : ".csv"; }

// ---------------------------------------------------------------------------

int cmd_tabulate(const Config& c)
{
    const auto& tab = c.tabulate;
    Table ang{{"phi", "ftilde", "c"}, {}};
    std::vector<double> phis;
    if (is_central(c.model)) {
        phis = closed(tab.phi_from.value_or(0.0), tab.phi_to.value_or(2 * std::numbers::pi), tab.points);
        for (double p : phis) ang.rows.push_back({p, nan, 0.0});
    } else {
        const auto& fam = family_of(c.model);
        const auto dom = angular_domain(fam);
        if (tab.phi_from && *tab.phi_from <= dom.phi_tilde)
            throw InputError("tabulate.phi_from = " + g17(*tab.phi_from) + " is not above the domain lower bound " +
                             g17(dom.phi_tilde));
        if (tab.phi_to && *tab.phi_to >= dom.phi_end)
            throw InputError("tabulate.phi_to = " + g17(*tab.phi_to) + " is not below the domain upper bound " +
                             g17(dom.phi_end));
        const double a = tab.phi_from.value_or(dom.phi_tilde);
        const double b = tab.phi_to.value_or(dom.phi_end);
        if (!(b > a)) throw InputError("tabulate: empty phi range");
        phis = (tab.phi_from || tab.phi_to) ? closed(a, b, tab.points) : interior(a, b, tab.points);
        for (double p : phis) {
            double c_val = nan;
            try {
                c_val = angular_value(fam, p);
            } catch (const DomainError&) {
                // within the guard band of an asymptote
            }
            ang.rows.push_back({p, ftilde_of_phi(fam, p), c_val});
        }
    }
    const auto dir = prepare_out(c);
    const auto ang_path = dir / (c.name + "_angular" + ext(c));
    write_table(ang_path, ang, c.output.format);
    std::cout << "wrote " << ang_path.string() << " (" << ang.rows.size() << " rows)\n";

    if (tab.radial) {
        const double upper = std::min(radial_upper_limit(c.model.radial, c.model.curv), chart_limit(c.model.curv));
        if (tab.r_from && *tab.r_from <= 0.0)
            throw InputError("tabulate.r_from = " + g17(*tab.r_from) + " is not above the lower bound 0");
        if (tab.r_to && *tab.r_to >= upper)
            throw InputError("tabulate.r_to = " + g17(*tab.r_to) + " is not below the upper bound " + g17(upper));
        const double a = tab.r_from.value_or(0.0);
        const double b = tab.r_to.value_or(std::min(upper, 5.0));
        if (!(b > a)) throw InputError("tabulate: empty r range");
        const bool open_hi = !tab.r_to && b == upper;
        const auto rs = (tab.r_from && !open_hi) ? closed(a, b, tab.points) : interior(a, b, tab.points);
        Table rad{{"r", "a"}, {}};
        for (double r : rs) rad.rows.push_back({r, radial_value(c.model.radial, c.model.curv, r)});
        const auto rad_path = dir / (c.name + "_radial" + ext(c));
        write_table(rad_path, rad, c.output.format);
        std::cout << "wrote " << rad_path.string() << " (" << rad.rows.size() << " rows)\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_trace(const Config& c)
{
    PhaseState start;
    if (c.run.state) {
        start = *c.run.state;
        start.t = 0.0;
    } else {
        if (!c.run.E || !c.run.L) throw InputError("run: trace needs E and L, or an explicit state");
        try {
            start = initial_condition(c.model, {*c.run.E, *c.run.L});
        } catch (const NoBoundedMotion& e) {
            throw InputError(std::string("no bounded motion: ") + e.what());
        }
    }
    SeparationConstants consts{hamiltonian(c.model, start), liouville_l(c.model, start.phi, start.p_phi)};
    double T = 0.0;
    try {
        T = radial_period(c.model, consts);
    } catch (const NoBoundedMotion& e) {
        throw InputError(std::string("no bounded motion: ") + e.what());
    }
    const double t_final = c.run.t_final.value_or(c.run.periods * T);

    std::optional<Trajectory> maybe;
    try {
        maybe = integrate(c.model, start, t_final, c.run.control);
    } catch (const StepFailure& e) {
        const auto& s = e.last_valid;
        std::cerr << "integration failed: " << e.what() << "\nlast valid state: t=" << g17(s.t) << " r=" << g17(s.r)
                  << " phi=" << g17(s.phi) << " p_r=" << g17(s.p_r) << " p_phi=" << g17(s.p_phi) << "\n";
        return 1;
    }
    const Trajectory& traj = *maybe;

    std::vector<double> phi_vals;
    std::string phase_note;
    try {
        const bool closed = has_y_closed(c.model) && (is_central(c.model) || has_z_closed(family_of(c.model)));
        phi_vals = phase_along(c.model, traj, closed ? PhasePath::closed : PhasePath::quadrature);
        phase_note = closed ? "closed" : "quadrature";
    } catch (const std::exception& e) {
        phi_vals.assign(traj.size(), nan);
        phase_note = e.what();
    }

    Table t{{"t", "r", "phi", "p_r", "p_phi", "H", "l", "Phi"}, {}};
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& s = traj.samples()[i];
        t.rows.push_back({s.state.t, s.state.r, s.state.phi, s.state.p_r, s.state.p_phi, s.H, s.l, phi_vals[i]});
    }
    const auto dir = prepare_out(c);
    const auto path = dir / (c.name + "_trace" + ext(c));
    write_table(path, t, c.output.format);

    double closure = nan;
    std::string closure_note;
    try {
        closure = closure_detect(traj, model_m(c.model)).distance;
    } catch (const InsufficientSpan& e) {
        closure_note = e.what();
    }

    std::printf("trace %s\n", c.name.c_str());
    std::printf("  file             %s\n", path.string().c_str());
    std::printf("  samples          %zu\n", traj.size());
    std::printf("  E                %.17g\n", consts.E);
    std::printf("  L                %.17g\n", consts.L);
    std::printf("  radial period    %.17g\n", T);
    std::printf("  t_final          %.17g\n", t_final);
    std::printf("  scheme           %s\n", scheme_name(c.run.control.scheme));
    std::printf("  energy drift     %.6e\n", traj.max_relative_energy_drift());
    std::printf("  l drift          %.6e\n", traj.max_relative_l_drift());
    std::printf("  Phi drift        %.6e (%s)\n", phase_drift(phi_vals), phase_note.c_str());
    std::printf("  closure distance %.6e (m = %d)%s%s\n", closure, model_m(c.model), closure_note.empty() ? "" : " ",
                closure_note.c_str());
    return 0;
}

// ---------------------------------------------------------------------------

std::vector<AngularFamily> isoperiodic_families(const Config& c)
{
    const auto& fam = family_of(c.model);
    std::vector<std::pair<double, double>> pairs = c.verify.companions;
    if (pairs.empty()) pairs = {{0.0, 0.0}, {0.3, 0.4}, {0.5, -0.5}, {-0.4, 0.2}};
    std::vector<AngularFamily> out{fam};
    for (const auto& [a, b] : pairs) {
        if (a == fam.alpha && b == fam.beta) continue;
        AngularFamily f = fam;
        f.alpha = a;
        f.beta = b;
        if (validate_family(f).ok()) out.push_back(f);
        else if (!c.verify.companions.empty())
            throw InputError("verify.companions: (" + g17(a) + ", " + g17(b) + ") is not a valid family: " +
                             validate_family(f).violations.front());
    }
    return out;
}

int cmd_verify(const Config& c, const std::vector<std::string>& selected, std::uint64_t seed)
{
    const auto suites = selected.empty() ? (c.verify.suites.empty() ? default_suites(c) : c.verify.suites) : selected;
    const auto& tol = c.verify.tolerances;
    const auto grid = verify_L_grid(c);
    std::vector<VerificationReport> reports;
    for (const auto& name : suites) {
        if ((name == "isoperiodicity" || name == "abel_consistency") && is_central(c.model))
            throw InputError("suite " + name + " needs an angular family");
        if (name == "isoperiodicity") {
            reports.push_back(suite_isoperiodicity({isoperiodic_families(c), grid}, tol));
        } else if (name == "abel_consistency") {
            AbelInput in;
            in.family = family_of(c.model);
            in.L_grid = grid;
            reports.push_back(suite_abel_consistency(in, tol));
        } else if (name == "bertrand") {
            reports.push_back(suite_bertrand(tol));
        } else if (name == "superintegrability") {
            SuperintegrabilityInput in;
            in.model = c.model;
            in.E = verify_energy(c);
            in.L_grid = bounded_L_values(c.model, in.E, grid);
            if (in.L_grid.size() < 2)
                throw InputError("superintegrability: fewer than two grid values of L give bounded motion at E = " +
                                 g17(in.E));
            in.orbits = c.verify.orbits;
            in.periods = c.verify.periods;
            in.control = c.run.control;
            in.closed_form_states = c.verify.closed_form_states;
            in.independence_points = c.verify.independence_points;
            in.seed = seed;
            reports.push_back(suite_superintegrability(in, tol));
        } else {
            throw InputError("unknown suite '" + name + "'");
        }
    }
    const auto dir = prepare_out(c);
    const auto text = to_text(reports);
    {
        std::ofstream js(dir / (c.name + "_verify.json"), std::ios::binary);
        js << to_json(reports);
        std::ofstream tx(dir / (c.name + "_verify.txt"), std::ios::binary);
        tx << text;
    }
    std::cout << text;
    bool ok = true;
    for (const auto& r : reports) ok = ok && r.pass();
    return ok ? 0 : 1;
}

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

Config load(const Options& o)
{
    Config c = load_config(o.config);
    if (!o.out.empty()) c.output.directory = o.out;
    if (!o.format.empty()) c.output.format = o.format;
    if (o.grid > 0) {
        c.tabulate.points = o.grid;
        c.verify.grid_points = o.grid;
    }
    if (o.seed_given) c.run.seed = o.seed;
    return c;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Superintegrable (alpha, beta) families on spaces of constant curvature"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "YAML config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory (overrides output.directory)");
        sub->add_option("--format", o.format, "data file format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--grid", o.grid, "grid points (tabulate points, verify L grid size)")
            ->check(CLI::Range(2, 10000000));
        sub->add_option("--seed", o.seed, "random seed")->each([&](const std::string&) { o.seed_given = true; });
    };
    auto* tab = app.add_subcommand("tabulate", "write (phi, f~, c) and optionally (r, a) tables");
    add_common(tab);
    auto* trace = app.add_subcommand("trace", "integrate one orbit and summarise its invariants");
    add_common(trace);
    auto* ver = app.add_subcommand("verify", "run verification suites");
    add_common(ver);
    ver->add_option("--suite", o.suites, "comma-separated suites (isoperiodicity, superintegrability, bertrand, "
                                         "abel_consistency)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const Config c = load(o);
        if (tab->parsed()) return cmd_tabulate(c);
        if (trace->parsed()) return cmd_trace(c);
        return cmd_verify(c, split(o.suites), o.seed_given ? o.seed : c.run.seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const NoBoundedMotion& e) {
        std::cerr << "no bounded motion: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
