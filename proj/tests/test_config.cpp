#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "superint/config.hpp"

using namespace superint;

namespace {

const char* minimal = R"(schema: superint-config/1
name: t
radial:
  type: oscillator
  gamma: 0.5
  omega: 1
angular:
  type: family
  alpha: 0.5
  beta: -0.5
  m: 3
  n: 2
  c0: 0.5
run:
  E: 6
  L: 1.5
)";

ConfigError error_of(const std::string& text)
{
    try {
        parse_config(text, "cfg.yaml");
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a ConfigError");
    return ConfigError("", 0, 0, "", "");
}

std::string replace(std::string s, const std::string& from, const std::string& to)
{
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("minimal config")
{
    const Config c = parse_config(minimal);
    CHECK(c.name == "t");
    CHECK(c.model.curv.k == 0.0);
    const auto& f = std::get<AngularFamily>(c.model.angular);
    CHECK(f.alpha == 0.5);
    CHECK(f.beta == -0.5);
    CHECK(std::holds_alternative<OscillatorLink>(f.link));
    CHECK(c.run.E == 6.0);
    CHECK(c.run.control.scheme == Scheme::gauss6);
    CHECK(c.output.format == "csv");
    CHECK(default_suites(c) == std::vector<std::string>{"isoperiodicity", "abel_consistency", "superintegrability"});
    CHECK(parse_config(to_yaml(c)) == c);
}

TEST_CASE("shipped configs round trip")
{
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(SUPERINT_CONFIG_DIR)) {
        if (entry.path().extension() != ".yaml") continue;
        CAPTURE(entry.path().string());
        ++count;
        const Config c = load_config(entry.path().string());
        const std::string y = to_yaml(c);
        const Config back = parse_config(y);
        CHECK(back == c);
        CHECK(to_yaml(back) == y);
        CHECK(verify_L_grid(c).size() >= 2);
        CHECK(std::isfinite(verify_energy(c)));
    }
    CHECK(count == 7);
}

TEST_CASE("Kepler link with F = 0 keeps the Kepler branch")
{
    std::string t = replace(minimal, "  type: oscillator\n  gamma: 0.5\n  omega: 1\n",
                            "  type: kepler\n  B: 0.5\n  D: 1\n  F: 0\n");
    t = replace(t, "  E: 6\n", "  E: -0.05\n");
    const Config c = parse_config(t);
    const auto& f = std::get<AngularFamily>(c.model.angular);
    REQUIRE(std::holds_alternative<KeplerLink>(f.link));
    CHECK(std::get<KeplerLink>(f.link).F == 0.0);
}

TEST_CASE("diagnostics carry position and field")
{
    SUBCASE("unknown key")
    {
        const auto e = error_of(replace(minimal, "  omega: 1\n", "  omega: 1\n  omgea: 2\n"));
        CHECK(e.field == "radial.omgea");
        CHECK(e.line == 7);
        CHECK(std::string(e.what()).rfind("cfg.yaml:7:", 0) == 0);
    }
    SUBCASE("wrong type")
    {
        const auto e = error_of(replace(minimal, "alpha: 0.5", "alpha: half"));
        CHECK(e.field == "angular.alpha");
        CHECK(e.line == 9);
    }
    SUBCASE("missing schema")
    {
        const auto e = error_of(replace(minimal, "schema: superint-config/1\n", ""));
        CHECK(e.field == "schema");
    }
    SUBCASE("wrong schema")
    {
        const auto e = error_of(replace(minimal, "superint-config/1", "superint-config/9"));
        CHECK(e.field == "schema");
        CHECK(e.line == 1);
    }
    SUBCASE("invalid family")
    {
        const auto e = error_of(replace(minimal, "beta: -0.5", "beta: 0.7"));
        CHECK(e.field.rfind("angular", 0) == 0);
    }
    SUBCASE("L below the angular floor")
    {
        const auto e = error_of(replace(minimal, "  L: 1.5\n", "  L: 0.2\n"));
        CHECK(e.field == "run.L");
    }
    SUBCASE("unknown radial type")
    {
        const auto e = error_of(replace(minimal, "type: oscillator", "type: yukawa"));
        CHECK(e.field == "radial.type");
    }
    SUBCASE("bad output format")
    {
        const auto e = error_of(std::string(minimal) + "output:\n  format: xml\n");
        CHECK(e.field == "output.format");
        CHECK(e.line == 18);
    }
    SUBCASE("malformed YAML")
    {
        const auto e = error_of("schema: [superint-config/1\n");
        CHECK(e.line >= 1);
    }
    SUBCASE("missing file")
    {
        CHECK_THROWS_AS(load_config("/nonexistent/cfg.yaml"), ConfigError);
    }
}

TEST_CASE("central models")
{
    std::string t = replace(minimal,
                            "  type: family\n  alpha: 0.5\n  beta: -0.5\n  m: 3\n  n: 2\n  c0: 0.5\n",
                            "  type: central\n  m: 2\n  n: 1\n");
    const Config c = parse_config(t);
    CHECK(std::holds_alternative<Central>(c.model.angular));
    CHECK(default_suites(c) == std::vector<std::string>{"superintegrability", "bertrand"});
    CHECK(parse_config(to_yaml(c)) == c);
}
