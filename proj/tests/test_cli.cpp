#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args)
{
    const std::string cmd = std::string(SUPERINT_CLI) + " " + args + " 2>&1";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string config(const std::string& name) { return std::string(SUPERINT_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("superint_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string& header)
{
    std::ifstream in(p);
    std::getline(in, header);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

double summary_value(const std::string& out, const std::string& key)
{
    const auto pos = out.find(key);
    REQUIRE(pos != std::string::npos);
    return std::stod(out.substr(pos + key.size()));
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text)
{
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("verify exits 0 on the shipped configs")
{
    const fs::path dir = scratch("verify");
    for (const char* name : {"ttw_flat.yaml", "pw_flat.yaml", "kepler_beta0_fig.yaml", "sphere_oscillator.yaml",
                             "hyperbolic_oscillator.yaml", "central_oscillator.yaml"}) {
        CAPTURE(name);
        const auto r = run("verify --config " + config(name) + " --out " + dir.string());
        CAPTURE(r.out);
        CHECK(r.code == 0);
    }
    const auto j = nlohmann::json::parse(slurp(dir / "ttw_flat_verify.json"));
    CHECK(j["schema"] == "superint-report/1");
    CHECK(j["pass"] == true);
    CHECK(j["suites"].size() == 3);
}

TEST_CASE("negative control exits 1")
{
    const fs::path dir = scratch("negative");
    const auto r = run("verify --config " + config("negative_control_irrational_nu.yaml") + " --out " + dir.string());
    CHECK(r.code == 1);
    CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("verify output is reproducible")
{
    const fs::path a = scratch("repro_a"), b = scratch("repro_b");
    const std::string args = "verify --config " + config("ttw_flat.yaml") + " --suite superintegrability --seed 7";
    REQUIRE(run(args + " --out " + a.string()).code == 0);
    REQUIRE(run(args + " --out " + b.string()).code == 0);
    CHECK(slurp(a / "ttw_flat_verify.json") == slurp(b / "ttw_flat_verify.json"));
    CHECK(slurp(a / "ttw_flat_verify.txt") == slurp(b / "ttw_flat_verify.txt"));
    const auto j = nlohmann::json::parse(slurp(a / "ttw_flat_verify.json"));
    CHECK(j["suites"][0]["seed"] == 7);
}

TEST_CASE("malformed configs exit 2")
{
    const fs::path dir = scratch("malformed");
    const auto bad = write_file(dir, "bad.yaml", "schema: superint-config/1\nradial:\n  type: oscillator\n  omega: x\n");
    const auto r = run("tabulate --config " + bad.string() + " --out " + dir.string());
    CHECK(r.code == 2);
    CHECK(r.out.find("bad.yaml:4:") != std::string::npos);
    CHECK(r.out.find("radial.omega") != std::string::npos);

    CHECK(run("verify --config " + (dir / "missing.yaml").string()).code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("verify --config " + config("ttw_flat.yaml") + " --suite nonsense --out " + dir.string()).code == 2);
}

TEST_CASE("tabulate rejects out-of-domain ranges")
{
    const fs::path dir = scratch("domain");
    const std::string text = slurp(config("kepler_beta0_fig.yaml")) + "";
    std::string t = text;
    t.replace(t.find("tabulate:\n"), 10, "tabulate:\n  phi_from: 0.1\n  phi_to: 1.0\n");
    const auto p = write_file(dir, "out_of_domain.yaml", t);
    const auto r = run("tabulate --config " + p.string() + " --out " + dir.string());
    CHECK(r.code != 0);
    CHECK(r.out.find("phi_from") != std::string::npos);
}

TEST_CASE("tabulate the beta = 0 Kepler family")
{
    const fs::path dir = scratch("tabulate");
    const auto r = run("tabulate --config " + config("kepler_beta0_fig.yaml") + " --out " + dir.string());
    REQUIRE(r.code == 0);
    std::string header;
    const auto rows = read_csv(dir / "kepler_beta0_angular.csv", header);
    CHECK(header == "phi,ftilde,c");
    REQUIRE(rows.size() == 2001);
    const double pi = std::numbers::pi;
    CHECK(rows.front()[0] > pi / 4);
    CHECK(rows.back()[0] < 7 * pi / 4);
    CHECK(rows.front()[0] < pi / 4 + 0.01);
    CHECK(rows.back()[0] > 7 * pi / 4 - 0.01);
    // c rises towards both asymptotes
    CHECK(rows.front()[2] > rows[1000][2]);
    CHECK(rows.back()[2] > rows[1000][2]);

    const auto again = scratch("tabulate_again");
    REQUIRE(run("tabulate --config " + config("kepler_beta0_fig.yaml") + " --out " + again.string()).code == 0);
    CHECK(slurp(dir / "kepler_beta0_angular.csv") == slurp(again / "kepler_beta0_angular.csv"));

    const auto js = run("tabulate --config " + config("ttw_flat.yaml") + " --format json --grid 11 --out " + dir.string());
    REQUIRE(js.code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "ttw_flat_angular.json"));
    CHECK(j["columns"] == nlohmann::json::array({"phi", "ftilde", "c"}));
    CHECK(j["rows"].size() == 11);
    CHECK(fs::exists(dir / "ttw_flat_radial.json"));
}

TEST_CASE("trace closes the TTW orbit")
{
    const fs::path dir = scratch("trace");
    const auto r = run("trace --config " + config("ttw_flat.yaml") + " --out " + dir.string());
    CAPTURE(r.out);
    REQUIRE(r.code == 0);
    CHECK(summary_value(r.out, "closure distance") < 1e-6);
    CHECK(summary_value(r.out, "energy drift") < 1e-9);
    CHECK(summary_value(r.out, "Phi drift") < 1e-6);
    std::string header;
    const auto rows = read_csv(dir / "ttw_flat_trace.csv", header);
    CHECK(header == "t,r,phi,p_r,p_phi,H,l,Phi");
    REQUIRE(rows.size() > 100);
    CHECK(rows.front()[5] == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(rows.back()[7] == doctest::Approx(rows.front()[7]).epsilon(1e-6));
}
