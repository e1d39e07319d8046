#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "superint/actions.hpp"
#include "superint/dynamics.hpp"
#include "superint/specfun.hpp"

namespace superint {

// ---------------------------------------------------------------------------
// Z and Y integrals
// ---------------------------------------------------------------------------

/// Z(phi) = int_{phi_min}^{phi} dphi / sqrt(L - c(phi)), by quadrature.
double z_integral(const AngularFamily& fam, double L, double phi);
double z_full(const AngularFamily& fam, double L);

/// Y(r) = int_{r_min}^{r} dr / (s_k^2 sqrt(E - a - L/s_k^2)), by quadrature.
double y_integral(const Model& model, const SeparationConstants& consts, double r);
double y_full(const Model& model, const SeparationConstants& consts);

/// Elliptic closed form of Z: oscillator link (or Kepler link with F = 0) for
/// alpha - beta > -1, and the generalized-Kepler link with beta = 0.
bool has_z_closed(const AngularFamily& fam);
double z_closed(const AngularFamily& fam, double L, double phi);

/// Elementary closed form of Y on the plane (oscillator and generalized Kepler).
bool has_y_closed(const Model& model);
double y_closed(const Model& model, const SeparationConstants& consts, double r);

// ---------------------------------------------------------------------------
// Conserved phase
// ---------------------------------------------------------------------------

enum class PhasePath { quadrature, closed };

/// Orbit data shared by every phase evaluation at fixed (E, L).
struct PhaseContext {
    Model model;
    SeparationConstants consts;
    TurningPoints tp;
    int m = 1;
    int n = 1;
    double Z_full = 0.0;  ///< Z(phi_max); 0 for central models
    double Y_full = 0.0;  ///< Y(r_max)
    double r_star = 0.0;  ///< effective-potential minimum
    // |d gap / d coordinate| at the turning points, times s_k^2 for r.
    double z_slope_lo = 0.0;
    double z_slope_hi = 0.0;
    double y_slope_lo = 0.0;
    double y_slope_hi = 0.0;
    double factor = 0.0;  ///< (sqrt(2)/2) m dL/dJ_phi
};

PhaseContext make_phase_context(const Model& model, const SeparationConstants& consts);

/// Context for the orbit through `state` (E = H, L = l).
PhaseContext make_phase_context(const Model& model, const PhaseState& state);

/// Near a turning point the coordinate is recovered from the momentum
/// (L - c(phi) = p_phi^2/2, E - a - L/s^2 = p_r^2/2), which keeps Z and Y
/// well conditioned there.
///
/// Phase with Z and Y continued across turning points by the momentum sign:
/// Z~ = Z(phi) for p_phi >= 0 and 2 Z_full - Z(phi) otherwise (Y~ likewise).
/// Windings count completed librations added by a PhaseAccumulator.
struct PhaseValue {
    double Phi = 0.0;
    double Z_tilde = 0.0;
    double Y_tilde = 0.0;
    long z_winding = 0;
    long y_winding = 0;
};

PhaseValue phase_phi(const PhaseContext& ctx, const PhaseState& state, PhasePath path = PhasePath::quadrature);

/// Convenience: builds the context from the state itself.
PhaseValue phase_phi(const Model& model, const PhaseState& state, PhasePath path = PhasePath::quadrature);

/// Continues Phi along consecutive trajectory samples. Each libration of phi
/// (or r) adds 2 Z_full (2 Y_full) to the unwrapped Z~ (Y~).
class PhaseAccumulator {
public:
    explicit PhaseAccumulator(PhaseContext ctx, PhasePath path = PhasePath::quadrature,
                              double max_jump_fraction = 0.25);

    /// Throws BranchTrackingError when the continued Z~ or Y~ moves by more
    /// than max_jump_fraction of its branch period between samples.
    PhaseValue push(const PhaseState& state);

    const PhaseContext& context() const { return ctx_; }

    /// (sample index, z winding, y winding) at each winding change.
    struct LedgerEntry {
        std::size_t sample;
        long z_winding;
        long y_winding;
    };
    const std::vector<LedgerEntry>& ledger() const { return ledger_; }

private:
    PhaseContext ctx_;
    PhasePath path_;
    double max_jump_fraction_;
    bool started_ = false;
    std::size_t count_ = 0;
    double z_prev_ = 0.0;
    double y_prev_ = 0.0;
    long zw_ = 0;
    long yw_ = 0;
    std::vector<LedgerEntry> ledger_;
};

/// Phi continued along every `stride`-th sample of `traj` (the last sample is
/// always included).
std::vector<double> phase_along(const Model& model, const Trajectory& traj, PhasePath path = PhasePath::quadrature,
                                std::size_t stride = 1);

/// Largest |Phi - Phi(0)| / max(|Phi(0)|, 1) over a phase series.
double phase_drift(const std::vector<double>& phi);

using ActionFunction = std::function<double(double J_r, double J_phi)>;

/// C = h(J_r, J_phi) exp(i Phi); h defaults to 1.
std::complex<double> superconstant_C(const PhaseContext& ctx, const PhaseState& state, const ActionFunction& h = {});
std::complex<double> superconstant_C(const Model& model, const PhaseState& state, const ActionFunction& h = {});

struct IndependenceReport {
    std::array<std::array<double, 4>, 3> gradients{};  ///< rows dH, dl, dRe C (unnormalized)
    std::array<double, 3> singular_values{};           ///< of the row-normalized Jacobian
    double smallest = 0.0;
    bool pass = false;
};

/// Rank test of the 3x4 Jacobian of (H, l, Re C) by central differences.
IndependenceReport functional_independence(const Model& model, const PhaseState& state, double rel_step = 1e-6,
                                           double threshold = 1e-6);

// ---------------------------------------------------------------------------
// Literal (uncorrected) closed forms, kept for comparison
// ---------------------------------------------------------------------------

/// Elliptic arguments of the literal oscillator-link phase at (L, phi). These
/// carry (1 - (alpha - beta)) where the correct form has (1 + (alpha - beta)).
struct LiteralOscillatorArgs {
    EllipticArgs args;
    double sin2_Lambda = 0.0;  ///< radicand of Lambda
    double Upsilon2 = 0.0;     ///< radicand of Upsilon
    bool valid = false;        ///< all radicands in range
    std::vector<std::string> issues;
};

LiteralOscillatorArgs literal_oscillator_args(const AngularFamily& fam, double L, double phi);

/// The literal flat oscillator phase, radial radicand E - 4 omega (L + gamma)
/// instead of E^2 - ...; NaN where any radicand or arcsin argument is out of range.
double literal_oscillator_phase(const Model& model, const SeparationConstants& consts, const PhaseState& state);

/// Sub-symbols of the literal generalized-Kepler phase.
struct KeplerPhaseSymbols {
    double a = 0.0;
    double b = 0.0;
    double d = 0.0;
    double rho = 0.0;
    double mu_radicand = 0.0;  ///< (b-d)(a-rho) / ((b-a)(a-rho)), literal
    double mu = 0.0;           ///< arcsin(sqrt(mu_radicand)); NaN outside [0, 1]
    double zeta = 0.0;
    double P_plus = 0.0;
    double P_minus = 0.0;
    double Q_plus = 0.0;
    double Q_minus = 0.0;
    double Delta = 0.0;
};

KeplerPhaseSymbols kepler_phase_symbols(const Model& model, const SeparationConstants& consts, double phi);

/// Literal Y: 1/sqrt(Delta) multiplies only the first term of each arcsin argument.
double literal_kepler_y(const Model& model, const SeparationConstants& consts, double r);

/// Literal Z; NaN where its arguments leave the real domain.
double literal_kepler_z(const Model& model, const SeparationConstants& consts, double phi);

}  // namespace superint
