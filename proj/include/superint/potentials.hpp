#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "superint/geometry.hpp"

namespace superint {

// ---------------------------------------------------------------------------
// Radial potentials a^k(r)
// ---------------------------------------------------------------------------

/// gamma/r^2 + omega r^2 on the plane and its cot^2 / coth^2 curved analogues.
struct Oscillator {
    double gamma = 0.0;  ///< energy * length^2
    double omega = 0.0;  ///< energy / length^2

    bool operator==(const Oscillator&) const = default;
};

/// B/r^2 - sqrt(D r^2 + F)/r^2 on the plane and its curved analogues.
/// F = 0 is the ordinary Kepler-Coulomb potential.
struct GeneralizedKepler {
    double B = 0.0;
    double D = 0.0;
    double F = 0.0;

    bool operator==(const GeneralizedKepler&) const = default;
};

/// coefficient * r^exponent in the geodesic radius. Not superintegrable for
/// exponent outside {-1, 2}; used as a negative control.
struct PowerLaw {
    double coefficient = 1.0;
    double exponent = 3.0;

    bool operator==(const PowerLaw&) const = default;
};

using RadialPotential = std::variant<Oscillator, GeneralizedKepler, PowerLaw>;

std::string describe(const RadialPotential& pot);

/// Throws DomainError for negative parameters of the two superintegrable kinds.
void check_radial(const RadialPotential& pot);

double radial_value(const RadialPotential& pot, Curvature curv, double r);
double radial_derivative(const RadialPotential& pot, Curvature curv, double r);

/// Largest radius where the potential is regular: pi/(2 sqrt k) for the
/// spherical oscillator with omega > 0, the chart limit otherwise.
double radial_upper_limit(const RadialPotential& pot, Curvature curv);

// ---------------------------------------------------------------------------
// Angular families
// ---------------------------------------------------------------------------

/// f-map of the oscillator-type radial potential (Kepler with F = 0 is the
/// same map with gamma -> B).
struct OscillatorLink {
    double gamma = 0.0;

    bool operator==(const OscillatorLink&) const = default;
};

/// f-map of the generalized-Kepler radial potential.
struct KeplerLink {
    double B = 0.0;
    double F = 0.0;

    bool operator==(const KeplerLink&) const = default;
};

using AngularLink = std::variant<OscillatorLink, KeplerLink>;

enum class LinkKind { oscillator, kepler };

/// Two-parameter (alpha, beta) family of angular potentials c(phi).
///
/// The period of f~(phi) is pi/nu with nu = 2n/m for the oscillator link and
/// nu = n/m for the Kepler link. (m, n) are kept as integers; nu is derived.
struct AngularFamily {
    double alpha = 0.0;
    double beta = 0.0;
    int m = 1;
    int n = 1;
    double c0 = 0.0;  ///< minimum value of c(phi)
    AngularLink link = OscillatorLink{};
    /// Replaces the rational nu. Only for negative controls (irrational periods).
    std::optional<double> nu_override;

    bool operator==(const AngularFamily&) const = default;
};

/// Returns the family with (m, n) divided by their gcd.
AngularFamily reduced(AngularFamily fam);

LinkKind link_kind(const AngularFamily& fam);
double nu(const AngularFamily& fam);

/// J = c0 + sqrt((c0 + B)^2 - F) of a Kepler-linked family.
double kepler_J(const AngularFamily& fam);

/// c0 for which the Kepler link has the given J.
double c0_from_J(double B, double F, double J);

/// gamma + c0 (oscillator link) or J + B (Kepler link).
double well_depth(const AngularFamily& fam);

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> notes;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_family(const AngularFamily& fam);

/// Interval (phi_tilde, phi_end) on which c(phi) is defined, and its minimum.
struct AngularDomain {
    double phi_tilde = 0.0;
    double phi_end = 0.0;
    double phi0 = 0.0;
};

AngularDomain angular_domain(const AngularFamily& fam);

/// f(c); c >= c0.
double f_of_c(const AngularFamily& fam, double c);
double f_prime_of_c(const AngularFamily& fam, double c);

/// 1 - f(c) without cancellation near c0.
double one_minus_f_of_c(const AngularFamily& fam, double c);

/// Inverse of f_of_c on (-1, 1].
double c_of_ftilde(const AngularFamily& fam, double ftilde);

/// f~(phi) for arbitrary phi (periodic, no domain check).
double ftilde_formula(double alpha, double beta, double nu, double phi);

/// f~(phi) together with 1 + f~ and 1 - f~ evaluated without cancellation.
struct FtildeParts {
    double value = 0.0;
    double one_plus = 0.0;
    double one_minus = 0.0;
};

FtildeParts ftilde_parts(const AngularFamily& fam, double phi);

/// f~(phi) on the closed domain [phi_tilde, phi_end].
double ftilde_of_phi(const AngularFamily& fam, double phi);
double ftilde_derivative(const AngularFamily& fam, double phi);

/// c(phi) = c(f~(phi)); rejects phi within 1e-12 of either endpoint.
double angular_value(const AngularFamily& fam, double phi);
double angular_derivative(const AngularFamily& fam, double phi);

/// Implicit inverse branches phi_-(f~) (left of phi0) and phi_+(f~) (right).
enum class Side { left, right };
double phi_of_ftilde(const AngularFamily& fam, double ftilde, Side side);

// ---------------------------------------------------------------------------
// Closed forms used as cross-checks
// ---------------------------------------------------------------------------

/// A_- / cos^2(nu phi/2) + A_+ / sin^2(nu phi/2) - gamma, nu*phi in (0, pi).
double poschl_teller_value(double A_plus, double A_minus, double nu, double gamma, double phi);

struct PoschlTellerAmplitudes {
    double A_plus = 0.0;
    double A_minus = 0.0;
};

/// A_+- = (gamma + c0)(1 +- sqrt(alpha))^2 / 4.
PoschlTellerAmplitudes poschl_teller_amplitudes(double gamma, double c0, double alpha);

enum class Quadrant { I, II, III, IV };

/// Closed forms on the edges |alpha| + |beta| = 1 (oscillator link, or Kepler
/// link with F = 0).
double quadrant_value(const AngularFamily& fam, Quadrant quadrant, double phi);

/// Explicit beta = 0 potentials: oscillator/Kepler link and generalized-Kepler link.
double beta_zero_value(const AngularFamily& fam, double phi);

}  // namespace superint
