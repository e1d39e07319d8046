#include "superint/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "superint/actions.hpp"
#include "superint/errors.hpp"

namespace superint {

namespace {

std::string what_of(const std::string& source, int line, int column, const std::string& field, const std::string& msg)
{
    std::ostringstream os;
    os << source;
    if (line > 0) os << ":" << line << ":" << column;
    os << ": ";
    if (!field.empty()) os << field << ": ";
    os << msg;
    return os.str();
}

class Section {
public:
    Section(YAML::Node node, std::string path, const std::string& source)
        : node_(std::move(node)), path_(std::move(path)), source_(source)
    {
        if (!node_.IsMap()) fail("", "expected a mapping");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const { fail_at(node_, key, msg); }

    [[noreturn]] void fail_at(const YAML::Node& n, const std::string& key, const std::string& msg) const
    {
        const auto mark = n.Mark();
        const int line = mark.line >= 0 ? mark.line + 1 : 0;
        const int col = mark.column >= 0 ? mark.column + 1 : 0;
        throw ConfigError(source_, line, col, field(key), msg);
    }

    std::string field(const std::string& key) const
    {
        if (key.empty()) return path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

    YAML::Node raw(const std::string& key)
    {
        used_.insert(key);
        return node_[key];
    }

    template <class T>
    std::optional<T> opt(const std::string& key)
    {
        used_.insert(key);
        const YAML::Node n = node_[key];
        if (!n) return std::nullopt;
        return convert<T>(n, key);
    }

    template <class T>
    T get(const std::string& key, T fallback)
    {
        return opt<T>(key).value_or(fallback);
    }

    template <class T>
    T req(const std::string& key)
    {
        auto v = opt<T>(key);
        if (!v) fail(key, "required field is missing");
        return *v;
    }

    template <class T>
    T convert(const YAML::Node& n, const std::string& key) const
    {
        if (!n.IsScalar()) fail_at(n, key, "expected a scalar");
        try {
            T v = n.as<T>();
            if constexpr (std::is_floating_point_v<T>) {
                if (!std::isfinite(v)) fail_at(n, key, "expected a finite number");
            }
            return v;
        } catch (const YAML::BadConversion&) {
            if constexpr (std::is_same_v<T, bool>) fail_at(n, key, "expected true or false");
            else if constexpr (std::is_integral_v<T>) fail_at(n, key, "expected an integer, got '" + n.Scalar() + "'");
            else if constexpr (std::is_floating_point_v<T>) fail_at(n, key, "expected a number, got '" + n.Scalar() + "'");
            else fail_at(n, key, "expected a string");
        }
    }

    Section child(const std::string& key)
    {
        used_.insert(key);
        return Section(node_[key], field(key), source_);
    }

    /// Rejects keys that were never read (typos).
    void finish() const
    {
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!used_.count(key)) fail_at(kv.first, key, "unknown field");
        }
    }

    const YAML::Node& node() const { return node_; }

private:
    YAML::Node node_;
    std::string path_;
    const std::string& source_;
    std::set<std::string> used_;
};

template <class T>
void positive(Section& s, const std::string& key, T v)
{
    if (!(v > 0)) s.fail(key, "must be positive");
}

RadialPotential parse_radial(Section s)
{
    const auto type = s.req<std::string>("type");
    RadialPotential out;
    if (type == "oscillator") {
        Oscillator o;
        o.gamma = s.get("gamma", 0.0);
        o.omega = s.req<double>("omega");
        out = o;
    } else if (type == "kepler") {
        GeneralizedKepler g;
        g.B = s.get("B", 0.0);
        g.D = s.req<double>("D");
        g.F = s.get("F", 0.0);
        out = g;
    } else if (type == "power_law") {
        PowerLaw p;
        p.coefficient = s.req<double>("coefficient");
        p.exponent = s.req<double>("exponent");
        out = p;
    } else {
        s.fail("type", "unknown radial type '" + type + "' (oscillator, kepler, power_law)");
    }
    s.finish();
    try {
        check_radial(out);
    } catch (const DomainError& e) {
        s.fail("", e.what());
    }
    return out;
}

AngularPart parse_angular(Section s, const RadialPotential& radial)
{
    const auto type = s.req<std::string>("type");
    if (type == "central") {
        Central c;
        c.m = s.get("m", 1);
        c.n = s.get("n", 1);
        positive(s, "m", c.m);
        positive(s, "n", c.n);
        s.finish();
        return c;
    }
    if (type != "family") s.fail("type", "unknown angular type '" + type + "' (family, central)");

    AngularFamily fam;
    fam.alpha = s.req<double>("alpha");
    fam.beta = s.req<double>("beta");
    fam.m = s.req<int>("m");
    fam.n = s.req<int>("n");
    positive(s, "m", fam.m);
    positive(s, "n", fam.n);
    if (const auto* o = std::get_if<Oscillator>(&radial)) {
        fam.link = OscillatorLink{o->gamma};
        if (s.has("J")) s.fail("J", "J applies to the generalized-Kepler link only");
        fam.c0 = s.req<double>("c0");
    } else if (const auto* g = std::get_if<GeneralizedKepler>(&radial)) {
        fam.link = KeplerLink{g->B, g->F};
        const auto c0 = s.opt<double>("c0");
        const auto J = s.opt<double>("J");
        if (c0 && J) s.fail("J", "give c0 or J, not both");
        if (!c0 && !J) s.fail("c0", "required field is missing (or give J)");
        if (J) {
            try {
                fam.c0 = c0_from_J(g->B, g->F, *J);
            } catch (const DomainError& e) {
                s.fail("J", e.what());
            }
        } else {
            fam.c0 = *c0;
        }
    } else {
        s.fail("type", "an angular family needs an oscillator or kepler radial potential");
    }
    fam.nu_override = s.opt<double>("nu_override");
    s.finish();
    const auto report = validate_family(fam);
    if (!report.ok()) s.fail("", report.violations.front());
    return fam;
}

PhaseState parse_state(Section s)
{
    PhaseState st;
    st.r = s.req<double>("r");
    st.phi = s.req<double>("phi");
    st.p_r = s.req<double>("p_r");
    st.p_phi = s.req<double>("p_phi");
    s.finish();
    return st;
}

RunConfig parse_run(Section s)
{
    RunConfig run;
    run.E = s.opt<double>("E");
    run.L = s.opt<double>("L");
    if (s.has("state")) run.state = parse_state(s.child("state"));
    run.periods = s.get("periods", run.periods);
    positive(s, "periods", run.periods);
    run.t_final = s.opt<double>("t_final");
    if (run.t_final) positive(s, "t_final", *run.t_final);
    const auto scheme = s.get<std::string>("scheme", scheme_name(run.control.scheme));
    const auto sc = scheme_from_name(scheme);
    if (!sc) s.fail("scheme", "unknown scheme '" + scheme + "' (implicit_midpoint, gauss4, gauss6, rkf78)");
    run.control.scheme = *sc;
    run.control.steps_per_period = s.get("steps_per_period", run.control.steps_per_period);
    if (run.control.steps_per_period < 0) s.fail("steps_per_period", "must be >= 0");
    run.control.dt = s.get("dt", run.control.dt);
    if (run.control.dt < 0) s.fail("dt", "must be >= 0");
    run.control.samples_per_period = s.get("samples_per_period", run.control.samples_per_period);
    positive(s, "samples_per_period", run.control.samples_per_period);
    run.control.rkf_tolerance = s.get("rkf_tolerance", run.control.rkf_tolerance);
    positive(s, "rkf_tolerance", run.control.rkf_tolerance);
    run.seed = s.get<std::uint64_t>("seed", run.seed);
    s.finish();
    return run;
}

TabulateConfig parse_tabulate(Section s)
{
    TabulateConfig t;
    t.points = s.get("points", t.points);
    if (t.points < 2) s.fail("points", "must be at least 2");
    t.phi_from = s.opt<double>("phi_from");
    t.phi_to = s.opt<double>("phi_to");
    t.radial = s.get("radial", t.radial);
    t.r_from = s.opt<double>("r_from");
    t.r_to = s.opt<double>("r_to");
    s.finish();
    return t;
}

Tolerances parse_tolerances(Section s)
{
    Tolerances t;
    const std::pair<const char*, double*> fields[] = {
        {"isoperiodicity", &t.isoperiodicity},
        {"period_relation", &t.period_relation},
        {"branch_inverse", &t.branch_inverse},
        {"combination", &t.combination},
        {"energy_drift", &t.energy_drift},
        {"closure", &t.closure},
        {"phase_drift", &t.phase_drift},
        {"closed_vs_quadrature", &t.closed_vs_quadrature},
        {"independence", &t.independence},
    };
    for (const auto& [key, ptr] : fields) {
        *ptr = s.get(key, *ptr);
        positive(s, key, *ptr);
    }
    s.finish();
    return t;
}

const std::set<std::string> known_suites = {"isoperiodicity", "superintegrability", "bertrand", "abel_consistency"};

VerifyConfig parse_verify(Section s)
{
    VerifyConfig v;
    if (s.has("suites")) {
        const auto n = s.raw("suites");
        if (!n.IsSequence()) s.fail_at(n, "suites", "expected a list");
        for (const auto& e : n) {
            const auto name = s.convert<std::string>(e, "suites");
            if (!known_suites.count(name)) s.fail_at(e, "suites", "unknown suite '" + name + "'");
            v.suites.push_back(name);
        }
    }
    if (s.has("L_grid")) {
        const auto n = s.raw("L_grid");
        if (!n.IsSequence()) s.fail_at(n, "L_grid", "expected a list");
        for (const auto& e : n) v.L_grid.push_back(s.convert<double>(e, "L_grid"));
        if (v.L_grid.size() < 2) s.fail_at(n, "L_grid", "needs at least two values");
    }
    v.grid_points = s.get("grid_points", v.grid_points);
    if (v.grid_points < 2) s.fail("grid_points", "must be at least 2");
    v.grid_lo = s.get("grid_lo", v.grid_lo);
    v.grid_hi = s.get("grid_hi", v.grid_hi);
    positive(s, "grid_lo", v.grid_lo);
    if (!(v.grid_hi > v.grid_lo)) s.fail("grid_hi", "must exceed grid_lo");
    if (s.has("companions")) {
        const auto n = s.raw("companions");
        if (!n.IsSequence()) s.fail_at(n, "companions", "expected a list of [alpha, beta] pairs");
        for (const auto& e : n) {
            if (!e.IsSequence() || e.size() != 2) s.fail_at(e, "companions", "expected [alpha, beta]");
            v.companions.emplace_back(s.convert<double>(e[0], "companions"), s.convert<double>(e[1], "companions"));
        }
    }
    v.orbits = s.get("orbits", v.orbits);
    positive(s, "orbits", v.orbits);
    v.periods = s.get("periods", v.periods);
    positive(s, "periods", v.periods);
    v.closed_form_states = s.get("closed_form_states", v.closed_form_states);
    v.independence_points = s.get("independence_points", v.independence_points);
    if (v.closed_form_states < 0) s.fail("closed_form_states", "must be >= 0");
    if (v.independence_points < 0) s.fail("independence_points", "must be >= 0");
    if (s.has("tolerances")) v.tolerances = parse_tolerances(s.child("tolerances"));
    s.finish();
    return v;
}

OutputConfig parse_output(Section s)
{
    OutputConfig o;
    o.directory = s.get("directory", o.directory);
    o.format = s.get("format", o.format);
    if (o.format != "csv" && o.format != "json") s.fail("format", "expected csv or json");
    s.finish();
    return o;
}

// Shortest decimal that reads back to the same double.
std::string fmt(double x)
{
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    std::string s = buf;
    // keep YAML from reading an integral double as an int in other tools
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

}  // namespace

ConfigError::ConfigError(const std::string& src, int ln, int col, const std::string& fld, const std::string& msg)
    : std::runtime_error(what_of(src, ln, col, fld, msg)), source(src), line(ln), column(col), field(fld), message(msg)
{
}

Config parse_config(const std::string& text, const std::string& source)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source, e.mark.line + 1, e.mark.column + 1, "", e.msg);
    }
    if (!root || root.IsNull()) throw ConfigError(source, 0, 0, "", "empty config");
    Section top(root, "", source);

    const auto schema = top.opt<std::string>("schema");
    if (!schema) top.fail("schema", std::string("required field is missing (expected ") + config_schema + ")");
    if (*schema != config_schema)
        top.fail_at(root["schema"], "schema", "unsupported schema '" + *schema + "' (expected " + config_schema + ")");

    Config c;
    c.name = top.get<std::string>("name", c.name);
    c.model.curv.k = top.get("curvature", 0.0);
    c.model.radial = parse_radial(top.child("radial"));
    c.model.angular = parse_angular(top.child("angular"), c.model.radial);
    {
        const auto report = validate_model(c.model);
        if (!report.ok()) top.fail("angular", report.violations.front());
    }
    if (top.has("run")) c.run = parse_run(top.child("run"));
    if (top.has("tabulate")) c.tabulate = parse_tabulate(top.child("tabulate"));
    if (top.has("verify")) c.verify = parse_verify(top.child("verify"));
    if (top.has("output")) c.output = parse_output(top.child("output"));
    top.finish();

    if (c.run.L && *c.run.L <= angular_floor(c.model))
        throw ConfigError(source, 0, 0, "run.L", "must exceed the angular minimum " + fmt(angular_floor(c.model)));
    return c;
}

Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, 0, "", "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string to_yaml(const Config& c)
{
    std::ostringstream os;
    os << "schema: " << config_schema << "\n";
    os << "name: \"" << c.name << "\"\n";
    os << "curvature: " << fmt(c.model.curv.k) << "\n";

    os << "radial:\n";
    if (const auto* o = std::get_if<Oscillator>(&c.model.radial)) {
        os << "  type: oscillator\n  gamma: " << fmt(o->gamma) << "\n  omega: " << fmt(o->omega) << "\n";
    } else if (const auto* g = std::get_if<GeneralizedKepler>(&c.model.radial)) {
        os << "  type: kepler\n  B: " << fmt(g->B) << "\n  D: " << fmt(g->D) << "\n  F: " << fmt(g->F) << "\n";
    } else {
        const auto& p = std::get<PowerLaw>(c.model.radial);
        os << "  type: power_law\n  coefficient: " << fmt(p.coefficient) << "\n  exponent: " << fmt(p.exponent) << "\n";
    }

    os << "angular:\n";
    if (const auto* ce = std::get_if<Central>(&c.model.angular)) {
        os << "  type: central\n  m: " << ce->m << "\n  n: " << ce->n << "\n";
    } else {
        const auto& f = std::get<AngularFamily>(c.model.angular);
        os << "  type: family\n  alpha: " << fmt(f.alpha) << "\n  beta: " << fmt(f.beta) << "\n  m: " << f.m
           << "\n  n: " << f.n << "\n  c0: " << fmt(f.c0) << "\n";
        if (f.nu_override) os << "  nu_override: " << fmt(*f.nu_override) << "\n";
    }

    const auto& r = c.run;
    os << "run:\n";
    if (r.E) os << "  E: " << fmt(*r.E) << "\n";
    if (r.L) os << "  L: " << fmt(*r.L) << "\n";
    if (r.state)
        os << "  state:\n    r: " << fmt(r.state->r) << "\n    phi: " << fmt(r.state->phi) << "\n    p_r: "
           << fmt(r.state->p_r) << "\n    p_phi: " << fmt(r.state->p_phi) << "\n";
    os << "  periods: " << fmt(r.periods) << "\n";
    if (r.t_final) os << "  t_final: " << fmt(*r.t_final) << "\n";
    os << "  scheme: " << scheme_name(r.control.scheme) << "\n";
    os << "  steps_per_period: " << r.control.steps_per_period << "\n";
    os << "  dt: " << fmt(r.control.dt) << "\n";
    os << "  samples_per_period: " << r.control.samples_per_period << "\n";
    os << "  rkf_tolerance: " << fmt(r.control.rkf_tolerance) << "\n";
    os << "  seed: " << r.seed << "\n";

    const auto& t = c.tabulate;
    os << "tabulate:\n  points: " << t.points << "\n";
    if (t.phi_from) os << "  phi_from: " << fmt(*t.phi_from) << "\n";
    if (t.phi_to) os << "  phi_to: " << fmt(*t.phi_to) << "\n";
    os << "  radial: " << (t.radial ? "true" : "false") << "\n";
    if (t.r_from) os << "  r_from: " << fmt(*t.r_from) << "\n";
    if (t.r_to) os << "  r_to: " << fmt(*t.r_to) << "\n";

    const auto& v = c.verify;
    os << "verify:\n";
    if (!v.suites.empty()) {
        os << "  suites: [";
        for (std::size_t i = 0; i < v.suites.size(); ++i) os << (i ? ", " : "") << v.suites[i];
        os << "]\n";
    }
    if (!v.L_grid.empty()) {
        os << "  L_grid: [";
        for (std::size_t i = 0; i < v.L_grid.size(); ++i) os << (i ? ", " : "") << fmt(v.L_grid[i]);
        os << "]\n";
    }
    os << "  grid_points: " << v.grid_points << "\n  grid_lo: " << fmt(v.grid_lo) << "\n  grid_hi: " << fmt(v.grid_hi)
       << "\n";
    if (!v.companions.empty()) {
        os << "  companions:\n";
        for (const auto& [a, b] : v.companions) os << "    - [" << fmt(a) << ", " << fmt(b) << "]\n";
    }
    os << "  orbits: " << v.orbits << "\n  periods: " << fmt(v.periods) << "\n  closed_form_states: "
       << v.closed_form_states << "\n  independence_points: " << v.independence_points << "\n";
    const auto& tol = v.tolerances;
    os << "  tolerances:\n"
       << "    isoperiodicity: " << fmt(tol.isoperiodicity) << "\n"
       << "    period_relation: " << fmt(tol.period_relation) << "\n"
       << "    branch_inverse: " << fmt(tol.branch_inverse) << "\n"
       << "    combination: " << fmt(tol.combination) << "\n"
       << "    energy_drift: " << fmt(tol.energy_drift) << "\n"
       << "    closure: " << fmt(tol.closure) << "\n"
       << "    phase_drift: " << fmt(tol.phase_drift) << "\n"
       << "    closed_vs_quadrature: " << fmt(tol.closed_vs_quadrature) << "\n"
       << "    independence: " << fmt(tol.independence) << "\n";

    os << "output:\n  directory: \"" << c.output.directory << "\"\n  format: " << c.output.format << "\n";
    return os.str();
}

std::vector<std::string> default_suites(const Config& config)
{
    if (is_central(config.model)) return {"superintegrability", "bertrand"};
    return {"isoperiodicity", "abel_consistency", "superintegrability"};
}

std::vector<double> verify_L_grid(const Config& config)
{
    const auto& v = config.verify;
    std::vector<double> grid = v.L_grid;
    if (grid.empty()) {
        if (is_central(config.model)) {
            // log-spaced in (lo, hi) directly; no well depth for c = 0
            for (int i = 0; i < v.grid_points; ++i)
                grid.push_back(v.grid_lo * std::pow(v.grid_hi / v.grid_lo, double(i) / (v.grid_points - 1)));
        } else {
            grid = default_L_grid(family_of(config.model), v.grid_points, v.grid_lo, v.grid_hi);
        }
    }
    return grid;
}

double verify_energy(const Config& config)
{
    if (config.run.E) return *config.run.E;
    const auto grid = verify_L_grid(config);
    const double L = *std::max_element(grid.begin(), grid.end());
    const double vmin = effective_potential(config.model, L, effective_minimum(config.model, L));
    return vmin + 0.5 * std::abs(vmin);
}

}  // namespace superint
