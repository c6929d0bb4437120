#pragma once

#include "wpk/field.hpp"
#include "wpk/potential.hpp"

#include <optional>
#include <ostream>
#include <vector>

namespace wpk {

struct PhasePoint {
    double x = 0.0;
    double xi = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<PhasePoint> points;
    std::vector<double> action_values; // accumulated action, starts at 0

    /// CSV with header t,x,xi,action.
    void write_csv(std::ostream& os) const;
};

/// Phi(t1, t0)(z) by velocity-Verlet (kick-drift-kick, force at the step
/// midpoint time). N = ceil(|t1-t0|/dt) equal steps; |t1-t0| <= 10.
PhasePoint flow(const Potential& p, PhasePoint z, double t0, double t1, double dt);

/// Classical action int_{t0}^{t1} xi^2/2 - V dtau along the discrete
/// trajectory (trapezoid rule).
double action(const Potential& p, PhasePoint z, double t0, double t1, double dt);

/// Every step of the discrete trajectory with the running action.
Trajectory trajectory(const Potential& p, PhasePoint z, double t0, double t1, double dt);

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
};

struct PairEstimates {
    double m2 = 0.0;
    InequalityCheck position;          // |x0^t - x1^t|
    InequalityCheck momentum_drift;    // |dxi^t - dxi^s|
    InequalityCheck position_remainder; // |dx^t - dx^s - (t-s) dxi^s|
    bool all_satisfied() const {
        return position.satisfied && momentum_drift.satisfied && position_remainder.satisfied;
    }
};

/// The three trajectory-difference bounds for states z0, z1 given at time s.
/// M2 is estimated over a box around both trajectories unless supplied.
PairEstimates check_pair_estimates(const Potential& p, PhasePoint z0, PhasePoint z1, double s, double t,
                                   double dt = 1e-4, std::optional<double> m2 = std::nullopt);

struct CollisionReport {
    double m2 = 0.0;
    double delta_used = 0.0;
    bool zero_relative_velocity = false;
    double window = 0.0;         // 2Cr/|dxi|, or delta when dxi = 0
    double drift_bound = 0.0;
    double max_drift = 0.0;      // over times with separation <= Cr so far
    double min_outside_separation = kInfinity;
    int samples = 0;
    bool separation_ok = true;
    bool drift_ok = true;
    bool satisfied = false;
};

/// Largest delta <= 1 with e^{m2}(delta^2 + delta^3) <= 1/100.
double collision_delta(double m2);

/// Scans |t-s| <= delta for states z0, z1 given at time s with
/// |x0 - x1| <= r and C >= 2.
CollisionReport collision_window(const Potential& p, PhasePoint z0, PhasePoint z1, double s, double r, double c,
                                 double dt = 1e-4);

struct CubeContainment {
    bool entered = false;          // false: not applicable
    double c_required = 0.0;       // valid when entered
    double entry_time = 0.0;
    double window = 0.0;
    double m2 = 0.0;
};

/// z0ref and z are states at time 0. If z^t enters z0ref^t + r Q_eta for some
/// |t - t_center| <= min(1/|eta|, 1), returns the smallest C with
/// z^{t_center} in the concentric dilate z0ref^{t_center} + (0, r eta) + C r [-1,1]^2.
CubeContainment cube_containment(const Potential& p, PhasePoint z0ref, PhasePoint z, double t_center, double eta,
                                 double r, int samples = 401, double dt = 1e-4);

} // namespace wpk
