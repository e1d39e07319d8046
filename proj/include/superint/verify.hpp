#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "superint/dynamics.hpp"
#include "superint/model.hpp"

namespace superint {

/// Every tolerance used by the suites.
struct Tolerances {
    double isoperiodicity = 1e-7;      ///< pairwise relative spread of T(L)
    double period_relation = 1e-8;     ///< T(L) against -2 pi (m/n) dJ_r/dL
    double branch_inverse = 1e-8;      ///< c(phi_pm(c)) = c
    double combination = 1e-7;         ///< m J_r + n J_phi spread
    double energy_drift = 1e-9;
    double closure = 1e-6;
    double phase_drift = 1e-6;
    double closed_vs_quadrature = 1e-7;
    double independence = 1e-6;        ///< smallest singular value

    bool operator==(const Tolerances&) const = default;
};

enum class CheckKind {
    requirement,  ///< must pass
    control,      ///< negative control: passes when the measured value exceeds the tolerance
    info,         ///< reported, never affects the verdict
};

struct Check {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    CheckKind kind = CheckKind::requirement;
    bool pass = false;
    std::string detail;
    bool lower_bound = false;  ///< requirement is measured > tolerance
};

struct VerificationReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<std::string> descriptors;
    std::vector<Check> checks;

    /// measured <= tolerance (requirement) or measured > tolerance (control).
    void require(std::string name, double measured, double tolerance, std::string detail = {});
    void require_above(std::string name, double measured, double threshold, std::string detail = {});
    void control(std::string name, double measured, double tolerance, std::string detail = {});
    void info(std::string name, double measured, std::string detail = {});

    bool pass() const;
    /// A negative control passed: the suite cannot tell good from bad.
    bool broken() const;
};

std::string to_json(const std::vector<VerificationReport>& reports);
std::string to_text(const std::vector<VerificationReport>& reports);

// ---------------------------------------------------------------------------

struct IsoperiodicityInput {
    std::vector<AngularFamily> families;  ///< same nu and link; at least two
    std::vector<double> L_grid;
    double control_nu_factor = 1.05;      ///< nu of the perturbed control family
};

VerificationReport suite_isoperiodicity(const IsoperiodicityInput& in, const Tolerances& tol = {});

struct SuperintegrabilityInput {
    Model model;
    double E = 0.0;
    std::vector<double> L_grid;        ///< bounded motion at E for every entry
    int orbits = 2;                    ///< grid points that are integrated
    double periods = 10.0;             ///< radial periods per orbit
    IntegratorControl control{Scheme::gauss6};
    int phase_samples_per_period = 64;
    int closed_form_states = 50;       ///< random on-orbit states for the closed-form comparison
    int independence_points = 5;
    bool with_control = true;          ///< irrational-nu copy of the family must not close
    std::uint64_t seed = 1;
};

VerificationReport suite_superintegrability(const SuperintegrabilityInput& in, const Tolerances& tol = {});

/// Central oscillator (m/n = 2) and Kepler (m/n = 1) close; r^3 does not.
VerificationReport suite_bertrand(const Tolerances& tol = {});

struct AbelInput {
    AngularFamily family;
    std::vector<double> L_grid;
    int branch_points = 64;            ///< c values per L for the branch inversion
    double control_nu_factor = 1.1;    ///< nu used on the right-hand side of the control
};

VerificationReport suite_abel_consistency(const AbelInput& in, const Tolerances& tol = {});

/// Radial potential whose f-map is the family's link (omega = 1, D = 1).
RadialPotential radial_of_link(const AngularFamily& fam);

/// Grid entries at which E gives bounded radial motion.
std::vector<double> bounded_L_values(const Model& model, double E, const std::vector<double>& L_grid);

}  // namespace superint
