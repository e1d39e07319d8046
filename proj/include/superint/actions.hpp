#pragma once

#include <utility>
#include <vector>

#include "superint/model.hpp"

namespace superint {

struct ActionPair {
    double J_r = 0.0;
    double J_phi = 0.0;
    SeparationConstants at;
};

/// Roots of the radial and angular momentum integrands. For central models
/// phi_min and phi_max are NaN (the angle rotates).
struct TurningPoints {
    double r_min = 0.0;
    double r_max = 0.0;
    double phi_min = 0.0;
    double phi_max = 0.0;
};

/// a^k(r) + L / s_k(r)^2.
double effective_potential(const Model& model, double L, double r);

/// E - a^k(r) - L / s_k(r)^2 (half the squared radial momentum).
double radial_gap(const Model& model, const SeparationConstants& consts, double r);

/// Radius of the minimum of the effective potential.
double effective_minimum(const Model& model, double L);

/// Throws NoBoundedMotion if E does not exceed the effective-potential minimum
/// or the well is open.
std::pair<double, double> radial_turning_points(const Model& model, const SeparationConstants& consts);

/// Roots of L - c(phi) bracketing phi0; L > c0.
std::pair<double, double> angular_turning_points(const AngularFamily& fam, double L);

TurningPoints turning_points(const Model& model, const SeparationConstants& consts);

double radial_action_quadrature(const Model& model, const SeparationConstants& consts);
double angular_action_quadrature(const AngularFamily& fam, double L);

/// Closed form; depends on nu and the link parameters only.
double angular_action_closed(const AngularFamily& fam, double L);

/// dJ_phi/dL from the closed form.
double angular_action_derivative(const AngularFamily& fam, double L);

/// J_phi of the model: closed form for families, |p_phi| = sqrt(2L) for central models.
double angular_action(const Model& model, double L);
double angular_action_derivative(const Model& model, double L);

ActionPair actions(const Model& model, const SeparationConstants& consts);

/// Closed-form dJ_r/dL of the superintegrable radial potentials (independent of E and k).
double dJr_dL(const RadialPotential& radial, double L);
double dJr_dL(const Model& model, const SeparationConstants& consts);

/// -(1/pi) int dr / (s_k^2 sqrt(2 (E - a - L/s_k^2))).
double dJr_dL_quadrature(const Model& model, const SeparationConstants& consts);

/// Period of the angular libration in the variable tau (dtau = dt / s_k^2):
/// closed form of the family's link.
double period_T(const AngularFamily& fam, double L);

/// sqrt(2) int dphi / sqrt(L - c(phi)) over the libration.
double period_T_quadrature(const AngularFamily& fam, double L);

/// Radial period in time t: sqrt(2) int dr / sqrt(E - a - L/s^2).
double radial_period(const Model& model, const SeparationConstants& consts);

struct CombinationReport {
    std::vector<double> L_values;
    std::vector<double> combination;  ///< m J_r + n J_phi at each L
    double mean = 0.0;                ///< the constant f(E)
    double relative_spread = 0.0;     ///< (max - min) / |mean|
    bool pass = false;
};

/// m J_r(E, L) + n J_phi(L) over an L grid at fixed E.
CombinationReport action_combination_check(const Model& model, double E, const std::vector<double>& L_grid, int m,
                                           int n, double tolerance = 1e-7);

/// Period integral split by the substitution phi(f~) into the arccos(f~) part
/// (integrated in f~) and the arccos(alpha f~ + beta) part (integrated in phi).
struct SubstitutionSplit {
    double full = 0.0;          ///< int dphi / sqrt(L - c)
    double arccos_term = 0.0;   ///< (1/nu) int_{f(L)}^1 df / (sqrt(1 - f^2) sqrt(L - c(f)))
    double g_term = 0.0;        ///< int (dG~/dphi) dphi / sqrt(L - c); zero over a libration
};

SubstitutionSplit substitution_split(const AngularFamily& fam, double L);

/// count L values log-spaced in (c0 + lo*depth, c0 + hi*depth).
std::vector<double> default_L_grid(const AngularFamily& fam, int count = 8, double lo = 0.1, double hi = 10.0);

}  // namespace superint
