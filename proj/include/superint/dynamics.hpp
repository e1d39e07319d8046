#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "superint/model.hpp"

namespace superint {

struct PhaseState {
    double t = 0.0;
    double r = 0.0;
    double phi = 0.0;
    double p_r = 0.0;
    double p_phi = 0.0;

    bool operator==(const PhaseState&) const = default;
};

using StateVector = std::array<double, 4>;  ///< (r, phi, p_r, p_phi)

StateVector to_vector(const PhaseState& s);
PhaseState from_vector(const StateVector& y, double t);

double hamiltonian(const Model& model, const PhaseState& state);

/// l = p_phi^2/2 + c(phi).
double liouville_l(const AngularFamily& fam, double phi, double p_phi);
double liouville_l(const Model& model, double phi, double p_phi);

/// Hamilton's equations.
StateVector vector_field(const Model& model, const StateVector& y);

/// Where to place the initial state inside the wells. Defaults: r = r_min,
/// phi = phi0 (0 for central models).
struct InitialChoice {
    std::optional<double> r;
    std::optional<double> phi;
    bool p_r_negative = false;
    bool p_phi_negative = false;
};

PhaseState initial_condition(const Model& model, const SeparationConstants& consts, const InitialChoice& choice = {});

enum class Scheme {
    implicit_midpoint,  ///< 1-stage Gauss-Legendre (order 2)
    gauss4,             ///< 2-stage Gauss-Legendre
    gauss6,             ///< 3-stage Gauss-Legendre
    rkf78,              ///< adaptive Runge-Kutta-Fehlberg 7(8), not symmetric
};

const char* scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(const std::string& name);

struct IntegratorControl {
    Scheme scheme = Scheme::implicit_midpoint;
    double dt = 0.0;             ///< fixed step; 0 derives it from the radial period
    int steps_per_period = 0;    ///< 0 picks a scheme-dependent default
    double fixed_point_tol = 1e-14;
    int max_iterations = 100;
    int samples_per_period = 1024;
    double rkf_tolerance = 1e-13;
    double boundary_guard = 1e-9;  ///< reject steps this close to an angular-domain endpoint
    int max_halvings = 20;

    bool operator==(const IntegratorControl&) const = default;
};

int default_steps_per_period(Scheme s);

/// A step could not be completed even after repeated halving.
class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, const PhaseState& last) : std::runtime_error(what), last_valid(last) {}
    PhaseState last_valid;
};

struct Sample {
    PhaseState state;
    StateVector derivative{};
    double H = 0.0;
    double l = 0.0;
};

class Trajectory {
public:
    Trajectory(std::vector<Sample> samples, bool rotating, double radial_period);

    const std::vector<Sample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    const Sample& front() const { return samples_.front(); }
    const Sample& back() const { return samples_.back(); }

    /// True when phi is a rotation angle (central models).
    bool rotating() const { return rotating_; }

    /// Radial period at the initial (E, L), used for step selection.
    double radial_period() const { return radial_period_; }

    /// Cubic Hermite interpolation between samples.
    PhaseState at(double t) const;

    double max_relative_energy_drift() const;
    double max_relative_l_drift() const;

private:
    std::vector<Sample> samples_;
    bool rotating_;
    double radial_period_;
};

Trajectory integrate(const Model& model, const PhaseState& start, double t_final,
                     const IntegratorControl& control = {});

/// Euclidean distance in (r, phi, p_r, p_phi); phi difference wrapped to
/// (-pi, pi] when `rotating`.
double phase_distance(const PhaseState& a, const PhaseState& b, bool rotating);

struct ClosureReport {
    int m = 0;
    std::vector<double> crossing_times;  ///< upward p_r zeros (passages through r_min)
    double span = 0.0;                   ///< time of m radial periods
    double distance = 0.0;               ///< |state(0) - state(span)|
    PhaseState start;
    PhaseState end;
};

/// Throws InsufficientSpan if fewer than m + 1 upward crossings exist.
ClosureReport closure_detect(const Trajectory& traj, int m);

/// CSV with header t,r,phi,p_r,p_phi,H,l,Phi and 17 significant digits.
/// `phi_values` (one per sample) fills the Phi column; otherwise it is nan.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<double>* phi_values = nullptr);

}  // namespace superint
