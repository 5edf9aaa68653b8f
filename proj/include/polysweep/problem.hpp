#ifndef POLYSWEEP_PROBLEM_HPP
#define POLYSWEEP_PROBLEM_HPP

#include <cmath>
#include <optional>

#include "sweeping.hpp"

namespace polysweep {

// Discretization bookkeeping for the step-k problem: locality radius for
// proximity to a reference trajectory, endpoint-set inflation delta, and the
// optional reference itself.  Without a reference the proximity terms vanish
// (self-referenced mode).
struct DiscretizationConfig {
    int k = 1;
    double eps_locality = 1.0;    // radius of the W^{1,2} x L^2 x R locality ball
    double delta_endpoint = 0.0;  // inflation of the terminal sets
    std::optional<DiscreteTrajectory> reference;
    double tol = 1e-8;
};

struct FeasibilityReport {
    bool state_feasible = false;
    bool endpoint_x_ok = false;
    bool endpoint_T_ok = false;
    bool locality_ok = false;
    bool velocity_cap_ok = false;
    double max_violation = 0.0;
    int worst_state_step = -1;

    bool all_ok() const {
        return state_feasible && endpoint_x_ok && endpoint_T_ok && locality_ok && velocity_cap_ok;
    }
};

inline double mayer_cost(const SweepingProblem& P, const DiscreteTrajectory& traj) {
    return P.mayer(traj.xT(), traj.T);
}

namespace detail {

// Piecewise-constant sample of the reference velocity / control at time t
// (left-continuous cells, last cell extended beyond the reference horizon by
// a constant state, i.e. zero velocity and last control).
inline Vec ref_velocity(const DiscreteTrajectory& ref, double t) {
    const double h = ref.h();
    int i = static_cast<int>(std::floor(t / h));
    if (i >= ref.k) return Vec::Zero(ref.states.front().size());
    if (i < 0) i = 0;
    return (ref.states[static_cast<std::size_t>(i) + 1] - ref.states[static_cast<std::size_t>(i)]) / h;
}

inline Vec ref_control(const DiscreteTrajectory& ref, double t) {
    const double h = ref.h();
    int i = static_cast<int>(std::floor(t / h));
    if (i >= ref.k) i = ref.k - 1;
    if (i < 0) i = 0;
    return ref.controls[static_cast<std::size_t>(i)];
}

// Linear interpolation of the reference state at time t (constant beyond T).
inline Vec ref_state(const DiscreteTrajectory& ref, double t) {
    const double h = ref.h();
    if (t >= ref.T) return ref.states.back();
    if (t <= 0) return ref.states.front();
    int i = static_cast<int>(std::floor(t / h));
    double w = (t - i * h) / h;
    return (1 - w) * ref.states[static_cast<std::size_t>(i)] +
           w * ref.states[static_cast<std::size_t>(i) + 1];
}

// Integral over [a,b] of the squared deviation of the candidate's constant
// cell data (velocity v, control u) from the reference's piecewise-constant
// data, split exactly at the reference's cell boundaries.
inline double proximity_cell(const DiscreteTrajectory& ref, double a, double b,
                             const Vec& v, const Vec& u) {
    const double h = ref.h();
    double acc = 0.0;
    double t = a;
    while (t < b - 1e-15) {
        int i = static_cast<int>(std::floor(t / h + 1e-12));
        double cell_end = std::min(b, (i + 1) * h);
        if (cell_end <= t + 1e-15) cell_end = std::min(b, t + h);
        const double mid = 0.5 * (t + cell_end);
        Vec dv = v - ref_velocity(ref, mid);
        Vec du = u - ref_control(ref, mid);
        acc += (dv.squaredNorm() + du.squaredNorm()) * (cell_end - t);
        t = cell_end;
    }
    return acc;
}

} // namespace detail

// Discretized cost: Mayer term + (T - Tref)^2 + proximity integrals to the
// reference.  Self-referenced (no reference) collapses to the Mayer cost.
inline double pk_cost(const SweepingProblem& P, const DiscreteTrajectory& traj,
                      const DiscretizationConfig& cfg) {
    double J = mayer_cost(P, traj);
    if (!cfg.reference) return J;
    const DiscreteTrajectory& ref = *cfg.reference;
    if (ref.states.empty() || ref.states.front().size() != P.n)
        throw incompatible_reference("pk_cost: reference dimension mismatch");
    const double dT = traj.T - ref.T;
    J += dT * dT;
    const double h = traj.h();
    for (int i = 0; i < traj.k; ++i) {
        Vec v = (traj.states[static_cast<std::size_t>(i) + 1] -
                 traj.states[static_cast<std::size_t>(i)]) / h;
        J += detail::proximity_cell(ref, traj.t(i), traj.t(i + 1), v,
                                    traj.controls[static_cast<std::size_t>(i)]);
    }
    return J;
}

inline FeasibilityReport feasibility(const SweepingProblem& P, const DiscreteTrajectory& traj,
                                     const DiscretizationConfig& cfg) {
    FeasibilityReport rep;
    const double tol = cfg.tol;
    const double del = cfg.delta_endpoint;

    // Pointwise state constraints x_i in C(t_i).
    rep.state_feasible = true;
    rep.max_violation = 0.0;
    for (int i = 0; i <= traj.k; ++i) {
        Vec r = eval_constraints(P.C, traj.t(i), traj.states[static_cast<std::size_t>(i)]);
        const double v = r.maxCoeff();
        if (v > rep.max_violation) {
            rep.max_violation = v;
            rep.worst_state_step = i;
        }
        if (v > tol) rep.state_feasible = false;
    }

    // Terminal constraints, inflated by delta.
    rep.endpoint_x_ok = true;
    if (P.omega_x_E.rows() > 0) {
        Vec resid = P.omega_x_E * traj.xT() - P.omega_x_e;
        const double v = resid.cwiseAbs().maxCoeff();
        rep.endpoint_x_ok = v <= tol + del;
        rep.max_violation = std::max(rep.max_violation, std::max(0.0, v - del));
    }
    rep.endpoint_T_ok = traj.T >= P.omega_T_lo - del - tol && traj.T <= P.omega_T_hi + del + tol;

    // Locality: proximity to the reference in L^2 (velocities+controls),
    // sup norm at common grid points, and final-time distance.
    rep.locality_ok = true;
    if (cfg.reference) {
        const DiscreteTrajectory& ref = *cfg.reference;
        double l2 = pk_cost(P, traj, cfg) - mayer_cost(P, traj) -
                    (traj.T - ref.T) * (traj.T - ref.T);
        double sup = 0.0;
        for (int i = 0; i <= traj.k; ++i)
            sup = std::max(sup, (traj.states[static_cast<std::size_t>(i)] -
                                 detail::ref_state(ref, traj.t(i))).norm());
        rep.locality_ok = l2 <= cfg.eps_locality && sup <= cfg.eps_locality &&
                          std::abs(traj.T - ref.T) <= cfg.eps_locality;
    }

    // Velocity cap ||(x_{i+1}-x_i)/h|| <= L+1.
    rep.velocity_cap_ok = true;
    const double h = traj.h();
    for (int i = 0; i < traj.k; ++i) {
        double speed = ((traj.states[static_cast<std::size_t>(i) + 1] -
                         traj.states[static_cast<std::size_t>(i)]) / h).norm();
        if (speed > P.lipschitz_cap + 1.0 + tol) rep.velocity_cap_ok = false;
    }
    return rep;
}

} // namespace polysweep

#endif
