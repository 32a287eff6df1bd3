#pragma once

#include "bbmnet/errors.hpp"

#include <optional>
#include <vector>

namespace bbmnet {

enum class ProfileKind { smooth, singular };

// Parameters of one travelling-wave profile of the BBM equation
// u_t - a u_xxt + b u u_x + d u_x = 0. Substituting u(x,t) = phi(x - c t)
// and integrating once reduces the equation to the planar system
//
//   phi' = psi,   psi' = (A + (c - d) phi - b phi^2 / 2) / (a c),
//
// whose homoclinic orbit is the solitary wave. The constant A plays two
// roles that coincide for A = 0:
//   * in phase_rhs / hamiltonian / stationary_points it is the
//     integration constant of the planar system above;
//   * in profile_value / profile_derivative it is the far-field level of
//     the wave: phi(y) = A + 6 m / b * 1 / (1 +- cosh(k y)) with
//     m = c - d - b A and k = sqrt(m / (a c)).
// A vertically shifted profile solves the same equation with d replaced
// by d + b A, which fixes m = c - d - b A; plugging either candidate into
// ode_residual confirms the sign. The far-field level A equals the
// abscissa of the saddle of the planar system with integration constant
// A (b A / 2 - (c - d)); homoclinic_apex below uses that correspondence.
struct ProfileParams {
    double a = 1.0; // dispersion, > 0
    double b = 1.0; // nonlinearity, != 0
    double d = 0.0; // drift
    double c = 1.0; // wave speed, > 0
    double A = 0.0; // far-field level / integration constant
    ProfileKind kind = ProfileKind::smooth;

    /// Effective level difference m = c - d - b A; must be positive.
    double level_gap() const { return c - d - b * A; }
    /// Wavenumber k = sqrt(m / (a c)).
    double wavenumber() const;
    /// Coefficient 6 m / b in front of 1 / (1 +- cosh); the peak deviation
    /// from the far field is half of it.
    double amplitude() const { return 6.0 * level_gap() / b; }

    /// Throws InvalidParams unless a > 0, b != 0, c > max{d + bA, 0}.
    void validate() const;
};

struct PhaseState {
    double phi = 0.0;
    double psi = 0.0;
};

enum class StationaryClass { saddle, center };

// Stationary points of the planar system: present iff the discriminant
// (c - d)^2 + 2 A b is positive. p1 (minus root) is always the saddle,
// p2 (plus root) the center.
struct StationaryPoints {
    double discriminant = 0.0;
    std::optional<PhaseState> saddle;
    std::optional<PhaseState> center;
};

struct OrbitPoint {
    double y = 0.0;
    PhaseState state;
    double hamiltonian = 0.0;
};

/// Value of the travelling profile at y. The singular kind is defined on
/// y != 0 only and throws SingularAtZero at y = 0.
double profile_value(const ProfileParams& p, double y);

/// Analytic derivative of order 1, 2 or 3 of the profile.
double profile_derivative(const ProfileParams& p, double y, int order);

/// Residual of a c phi''' + b phi phi' + (d - c) phi' at y, computed with
/// the analytic derivatives. Vanishes to roundoff for valid parameters.
double ode_residual(const ProfileParams& p, double y);

/// Right-hand side of the planar system at the given state.
PhaseState phase_rhs(const ProfileParams& p, const PhaseState& s);

/// First integral H(phi, psi) = psi^2/2 - (A phi + (c-d)/2 phi^2
/// - b/6 phi^3) / (a c); constant along trajectories.
double hamiltonian(const ProfileParams& p, const PhaseState& s);

StationaryPoints stationary_points(const ProfileParams& p);

/// Rightmost point (psi = 0) of the homoclinic loop of the planar system
/// with integration constant A: phi = (c - d + 2 sqrt(disc)) / b. Throws
/// InvalidParams when the discriminant is not positive.
PhaseState homoclinic_apex(const ProfileParams& p);

/// Fixed-step classical Runge-Kutta trajectory of the planar system from
/// `start`, spanning [0, span] (or [span, 0] when span < 0) in steps of
/// `step`. Records the Hamiltonian at every node. Throws Diverged when
/// the state magnitude exceeds 1e12.
std::vector<OrbitPoint> integrate_orbit(const ProfileParams& p, PhaseState start,
                                        double span, double step);

} // namespace bbmnet
