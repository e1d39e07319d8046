#pragma once

#include <variant>

#include "superint/geometry.hpp"
#include "superint/potentials.hpp"

namespace superint {

/// Rotation-invariant angular part c(phi) = 0. (m, n) is the ratio expected
/// from the radial potential (2:1 oscillator, 1:1 Kepler).
struct Central {
    int m = 1;
    int n = 1;

    bool operator==(const Central&) const = default;
};

using AngularPart = std::variant<Central, AngularFamily>;

/// H = p_r^2/2 + (p_phi^2/2 + c(phi))/s_k(r)^2 + a^k(r).
struct Model {
    Curvature curv;
    RadialPotential radial = Oscillator{};
    AngularPart angular = Central{};

    bool operator==(const Model&) const = default;
};

struct SeparationConstants {
    double E = 0.0;
    double L = 0.0;

    bool operator==(const SeparationConstants&) const = default;
};

bool is_central(const Model& model);
const AngularFamily& family_of(const Model& model);  ///< throws DomainError for central models
int model_m(const Model& model);
int model_n(const Model& model);

/// c(phi) and c'(phi); zero for central models.
double angular_c(const Model& model, double phi);
double angular_c_prime(const Model& model, double phi);

/// Lowest admissible L: c0, or 0 for central models.
double angular_floor(const Model& model);

/// Checks the family, the radial parameters, and that the family's f-map
/// belongs to the radial potential (same gamma, or same B and F).
ValidationReport validate_model(const Model& model);

}  // namespace superint
