#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <numbers>

#include "superint/actions.hpp"
#include "superint/verify.hpp"

using namespace superint;

namespace {

AngularFamily family(double alpha, double beta, int m, int n, double c0, AngularLink link)
{
    AngularFamily f;
    f.alpha = alpha;
    f.beta = beta;
    f.m = m;
    f.n = n;
    f.c0 = c0;
    f.link = link;
    return f;
}

Model ttw()
{
    Model md;
    md.radial = Oscillator{0.5, 1.0};
    md.angular = family(0.5, -0.5, 3, 2, 0.5, OscillatorLink{0.5});
    return md;
}

SuperintegrabilityInput small_input(Model md)
{
    SuperintegrabilityInput in;
    in.model = md;
    in.E = 6.0;
    in.L_grid = {0.8, 1.5, 2.5};
    in.orbits = 1;
    in.periods = 4;
    in.closed_form_states = 10;
    in.independence_points = 2;
    return in;
}

const Check* find(const VerificationReport& r, const std::string& prefix)
{
    for (const auto& c : r.checks)
        if (c.name.rfind(prefix, 0) == 0) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("report bookkeeping")
{
    VerificationReport r;
    r.suite = "demo";
    r.require("small", 1e-9, 1e-8);
    r.require_above("sigma", 0.3, 1e-6);
    r.control("detuned", 0.1, 1e-8);
    r.info("note", 42.0);
    CHECK(r.pass());
    CHECK_FALSE(r.broken());

    r.info("nan info", NAN);
    CHECK(r.pass());

    VerificationReport bad = r;
    bad.require("large", 1e-3, 1e-8);
    CHECK_FALSE(bad.pass());

    VerificationReport nan_req = r;
    nan_req.require("nan", NAN, 1.0);
    CHECK_FALSE(nan_req.pass());

    VerificationReport blind = r;
    blind.control("indistinguishable", 1e-12, 1e-8);
    CHECK(blind.broken());
    CHECK_FALSE(blind.pass());

    const auto j = nlohmann::json::parse(to_json({r, bad}));
    CHECK(j["schema"] == "superint-report/1");
    CHECK(j["pass"] == false);
    REQUIRE(j["suites"].size() == 2);
    const auto& checks = j["suites"][0]["checks"];
    CHECK(checks[0]["comparison"] == "<=");
    CHECK(checks[1]["comparison"] == ">");
    CHECK(checks[2]["kind"] == "control");
    CHECK(checks[4]["measured"].is_null());

    const std::string text = to_text({r});
    CHECK(text.find("suite demo") != std::string::npos);
    CHECK(text.find("PASS") != std::string::npos);
}

TEST_CASE("radial potential of a link")
{
    const auto o = radial_of_link(family(0, 0, 1, 1, 0.5, OscillatorLink{0.7}));
    REQUIRE(std::holds_alternative<Oscillator>(o));
    CHECK(std::get<Oscillator>(o).gamma == 0.7);
    const auto k = radial_of_link(family(0, 0, 1, 1, 0.5, KeplerLink{0.7, 0.2}));
    REQUIRE(std::holds_alternative<GeneralizedKepler>(k));
    CHECK(std::get<GeneralizedKepler>(k).F == 0.2);
    CHECK(std::get<GeneralizedKepler>(k).B == 0.7);
}

TEST_CASE("bounded L values")
{
    Model md;
    md.radial = GeneralizedKepler{0.0, 1.0, 0.0};
    md.angular = Central{1, 1};
    // circular orbit at E = -1/(4 L): E = -0.1 is bounded for L < 2.5
    const auto v = bounded_L_values(md, -0.1, {0.5, 1.0, 2.0, 2.6, 5.0});
    CHECK(v == std::vector<double>{0.5, 1.0, 2.0});
}

TEST_CASE("isoperiodicity suite")
{
    IsoperiodicityInput in;
    for (auto [a, b] : {std::pair{0.0, 0.0}, {0.3, 0.4}, {0.5, -0.5}, {-0.4, 0.2}})
        in.families.push_back(family(a, b, 3, 2, 0.5, OscillatorLink{0.5}));
    in.L_grid = default_L_grid(in.families[0]);
    const auto rep = suite_isoperiodicity(in);
    CHECK(rep.pass());
    CHECK_FALSE(rep.broken());
    const Check* control = nullptr;
    for (const auto& c : rep.checks)
        if (c.kind == CheckKind::control) control = &c;
    REQUIRE(control);
    CHECK(control->measured > 1e-3);

    // a companion with a different m/n is not isoperiodic
    in.families.push_back(family(0.1, 0.1, 2, 1, 0.5, OscillatorLink{0.5}));
    CHECK_FALSE(suite_isoperiodicity(in).pass());
}

TEST_CASE("Abel consistency suite")
{
    AbelInput in;
    in.family = family(0.5, -0.5, 3, 2, 0.5, OscillatorLink{0.5});
    in.L_grid = default_L_grid(in.family);
    const auto rep = suite_abel_consistency(in);
    CHECK(rep.pass());
    CHECK_FALSE(rep.broken());

    AbelInput kep;
    kep.family = family(0.5, 0.0, 3, 2, c0_from_J(1.0, 0.5, 1.0), KeplerLink{1.0, 0.5});
    kep.L_grid = default_L_grid(kep.family);
    CHECK(suite_abel_consistency(kep).pass());
}

TEST_CASE("superintegrability suite")
{
    const auto rep = suite_superintegrability(small_input(ttw()));
    for (const auto& c : rep.checks) {
        CAPTURE(c.name);
        CAPTURE(c.measured);
        if (c.kind == CheckKind::requirement || c.kind == CheckKind::control) CHECK(c.pass);
    }
    CHECK(rep.pass());
    CHECK(find(rep, "m J_r + n J_phi"));
    CHECK(find(rep, "closure distance"));

    // same seed, same report
    const auto again = suite_superintegrability(small_input(ttw()));
    CHECK(to_json({rep}) == to_json({again}));
}

TEST_CASE("superintegrability suite rejects irrational nu")
{
    Model md = ttw();
    std::get<AngularFamily>(md.angular).nu_override = std::sqrt(2.0);
    auto in = small_input(md);
    in.closed_form_states = 0;
    in.with_control = false;
    const auto rep = suite_superintegrability(in);
    CHECK_FALSE(rep.pass());
    const Check* closure = find(rep, "closure distance");
    REQUIRE(closure);
    CHECK_FALSE(closure->pass);
}

TEST_CASE("Bertrand suite")
{
    const auto rep = suite_bertrand();
    CHECK(rep.pass());
    CHECK_FALSE(rep.broken());
}
