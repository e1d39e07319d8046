#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "superint/dynamics.hpp"
#include "superint/model.hpp"
#include "superint/verify.hpp"

namespace superint {

inline constexpr const char* config_schema = "superint-config/1";

/// Parse or validation failure. line and column are 1-based; 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, int column, const std::string& field, const std::string& message);

    std::string source;
    int line = 0;
    int column = 0;
    std::string field;
    std::string message;
};

struct RunConfig {
    std::optional<double> E;
    std::optional<double> L;
    std::optional<PhaseState> state;  ///< explicit initial state; overrides E and L
    double periods = 10.0;            ///< radial periods when t_final is absent
    std::optional<double> t_final;
    IntegratorControl control{Scheme::gauss6};
    std::uint64_t seed = 1;

    bool operator==(const RunConfig&) const = default;
};

struct TabulateConfig {
    int points = 1001;
    std::optional<double> phi_from;  ///< defaults to the angular domain (open ends)
    std::optional<double> phi_to;
    bool radial = false;             ///< also write (r, a^k(r))
    std::optional<double> r_from;
    std::optional<double> r_to;

    bool operator==(const TabulateConfig&) const = default;
};

struct VerifyConfig {
    std::vector<std::string> suites;  ///< empty: every suite that applies to the model
    std::vector<double> L_grid;       ///< empty: log-spaced default grid
    int grid_points = 8;
    double grid_lo = 0.1;             ///< fractions of the well depth above c0
    double grid_hi = 10.0;
    std::vector<std::pair<double, double>> companions;  ///< extra (alpha, beta) for isoperiodicity
    int orbits = 2;
    double periods = 10.0;
    int closed_form_states = 50;
    int independence_points = 5;
    Tolerances tolerances;

    bool operator==(const VerifyConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "out";
    std::string format = "csv";  ///< csv or json

    bool operator==(const OutputConfig&) const = default;
};

struct Config {
    std::string name = "run";
    Model model;
    RunConfig run;
    TabulateConfig tabulate;
    VerifyConfig verify;
    OutputConfig output;

    bool operator==(const Config&) const = default;
};

Config parse_config(const std::string& text, const std::string& source = "<string>");
Config load_config(const std::string& path);

/// YAML with the schema field first and doubles at 17 significant digits;
/// parse_config(to_yaml(c)) == c.
std::string to_yaml(const Config& config);

/// Suites run by default: isoperiodicity, abel_consistency and superintegrability
/// for families; superintegrability and bertrand for central models.
std::vector<std::string> default_suites(const Config& config);

/// L grid of the verify block, restricted to bounded motion at `E` when given.
std::vector<double> verify_L_grid(const Config& config);

/// Energy used by the superintegrability suite: run.E, or a value inside the
/// well picked from the grid.
double verify_energy(const Config& config);

}  // namespace superint
