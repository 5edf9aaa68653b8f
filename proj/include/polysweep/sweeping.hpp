#ifndef POLYSWEEP_SWEEPING_HPP
#define POLYSWEEP_SWEEPING_HPP

#include <cmath>
#include <vector>

#include "geometry.hpp"

namespace polysweep {

// Full problem instance: sweeping dynamics xdot in -N(x; C(t)) + g(x,u) with
// affine perturbation g(x,u) = g_A x + g_B u + g_c, box controls, quadratic
// Mayer cost phi(x,T) = wT*T + 1/2 sum W_i (x_i - xref_i)^2, affine terminal
// state constraint E x(T) = e, and a closed interval for the free final time.
struct SweepingProblem {
    int n = 0; // state dimension
    int d = 0; // control dimension
    MovingPolyhedron C;
    Mat g_A;   // n x n
    Mat g_B;   // n x d
    Vec g_c;   // n
    Vec U_lo;  // d
    Vec U_hi;  // d
    Vec x0;    // n, must lie in C(0)
    double phi_wT = 0.0;
    Vec phi_W;    // n, diagonal weights >= 0
    Vec phi_xref; // n
    Mat omega_x_E; // mE x n (possibly 0 rows)
    Vec omega_x_e; // mE
    double omega_T_lo = 0.0;
    double omega_T_hi = 0.0;
    // Velocity bound L+1 used by the post-hoc cap check; generous default.
    double lipschitz_cap = 1e9;

    Vec g(const Vec& x, const Vec& u) const { return g_A * x + g_B * u + g_c; }

    double mayer(const Vec& xT, double T) const {
        double J = phi_wT * T;
        for (int i = 0; i < n; ++i) {
            const double dx = xT(i) - phi_xref(i);
            J += 0.5 * phi_W(i) * dx * dx;
        }
        return J;
    }

    void validate() const {
        C.validate();
        if (C.dim != n) throw dimension_mismatch("SweepingProblem: polyhedron dim != n");
        if (g_A.rows() != n || g_A.cols() != n || g_B.rows() != n || g_B.cols() != d ||
            g_c.size() != n || x0.size() != n || U_lo.size() != d || U_hi.size() != d ||
            phi_W.size() != n || phi_xref.size() != n)
            throw dimension_mismatch("SweepingProblem: inconsistent dimensions");
        if (omega_x_E.rows() != omega_x_e.size() ||
            (omega_x_E.rows() > 0 && omega_x_E.cols() != n))
            throw dimension_mismatch("SweepingProblem: endpoint rows inconsistent");
        for (int c = 0; c < d; ++c)
            if (U_lo(c) > U_hi(c)) throw dimension_mismatch("SweepingProblem: empty control box");
        if (omega_T_lo > omega_T_hi) throw dimension_mismatch("SweepingProblem: empty time interval");
        if (phi_W.minCoeff() < 0) throw dimension_mismatch("SweepingProblem: negative cost weight");
        Vec r0 = eval_constraints(C, 0.0, x0);
        if (r0.maxCoeff() > activity_tol(x0))
            throw infeasible_point("SweepingProblem: x0 outside C(0)");
    }
};

// Piecewise-constant control: value levels[j] on [breakpoints[j], breakpoints[j+1]).
struct ControlLaw {
    std::vector<double> breakpoints; // 0 = s0 < s1 < ... < sm = T
    std::vector<Vec> levels;         // m vectors of length d

    double T() const { return breakpoints.back(); }
    int segments() const { return static_cast<int>(levels.size()); }

    Vec at(double t) const {
        // Right-continuous sample; last level beyond T.
        int m = segments();
        for (int j = 0; j < m; ++j)
            if (t < breakpoints[static_cast<std::size_t>(j) + 1]) return levels[static_cast<std::size_t>(j)];
        return levels[static_cast<std::size_t>(m) - 1];
    }

    void validate(const SweepingProblem& P) const {
        if (breakpoints.size() != levels.size() + 1 || levels.empty())
            throw dimension_mismatch("ControlLaw: breakpoints/levels shape");
        for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j)
            if (!(breakpoints[j] < breakpoints[j + 1]))
                throw dimension_mismatch("ControlLaw: breakpoints not strictly increasing");
        if (std::abs(breakpoints.front()) > 1e-12)
            throw dimension_mismatch("ControlLaw: first breakpoint must be 0");
        const double pad = 1e-9;
        for (const Vec& u : levels) {
            if (u.size() != P.d) throw dimension_mismatch("ControlLaw: level dimension");
            for (int c = 0; c < P.d; ++c)
                if (u(c) < P.U_lo(c) - pad || u(c) > P.U_hi(c) + pad)
                    throw dimension_mismatch("ControlLaw: level outside control box");
        }
    }
};

// Uniform-grid trajectory with per-step normal-cone multipliers eta.
struct DiscreteTrajectory {
    double T = 0.0;
    int k = 0;
    std::vector<Vec> states;   // k+1
    std::vector<Vec> controls; // k
    std::vector<Vec> etas;     // k, each length s, eta >= 0

    double h() const { return T / k; }
    double t(int i) const { return T * i / k; }
    const Vec& xT() const { return states.back(); }
};

// One implicit catching-up step: x+ = proj_{C(t+h)}(x + h g(x,u)).
inline Vec catchup_step(const SweepingProblem& P, double t, double h, const Vec& x, const Vec& u) {
    return project(P.C, t + h, x + h * P.g(x, u));
}

// Per-step multipliers eta_i >= 0 solving
//   g(x_i,u_i) - (x_{i+1}-x_i)/h = sum_j eta_{i,j} a_j
// on the rows active at the projection target (t_{i+1}, x_{i+1}).
inline std::vector<Vec> recover_eta(const SweepingProblem& P, const DiscreteTrajectory& traj) {
    std::vector<Vec> etas;
    etas.reserve(static_cast<std::size_t>(traj.k));
    const double h = traj.h();
    for (int i = 0; i < traj.k; ++i) {
        const Vec& x = traj.states[static_cast<std::size_t>(i)];
        const Vec& xn = traj.states[static_cast<std::size_t>(i) + 1];
        Vec w = P.g(x, traj.controls[static_cast<std::size_t>(i)]) - (xn - x) / h;
        NormalDecomposition nd = normal_decompose(P.C, traj.t(i + 1), xn, w);
        const double bound = 1e-8 * (1.0 + P.g(x, traj.controls[static_cast<std::size_t>(i)]).norm());
        if (nd.residual > bound)
            throw decomposition_failed("recover_eta: residual " + std::to_string(nd.residual) +
                                       " at step " + std::to_string(i) +
                                       " (constraint qualification suspect)");
        etas.push_back(nd.lambda);
    }
    return etas;
}

// Integrate the law on the uniform grid t_i = i T / k with controls sampled at
// the left endpoint of each cell, then recover eta.
inline DiscreteTrajectory integrate(const SweepingProblem& P, const ControlLaw& law, int k,
                                    bool with_etas = true) {
    if (k < 1) throw dimension_mismatch("integrate: k must be >= 1");
    law.validate(P);
    DiscreteTrajectory traj;
    traj.T = law.T();
    traj.k = k;
    const double h = traj.h();
    traj.states.reserve(static_cast<std::size_t>(k) + 1);
    traj.controls.reserve(static_cast<std::size_t>(k));
    traj.states.push_back(P.x0);
    for (int i = 0; i < k; ++i) {
        const double t = traj.t(i);
        Vec u = law.at(t);
        traj.controls.push_back(u);
        traj.states.push_back(catchup_step(P, t, h, traj.states.back(), u));
    }
    if (with_etas) traj.etas = recover_eta(P, traj);
    return traj;
}

// Max over steps of the distance from (x_i - x_{i+1})/h + g(x_i,u_i) to the
// cone spanned by the normals active at (t_{i+1}, x_{i+1}).  Zero by
// construction for catching-up output; diagnostic for external trajectories.
inline double inclusion_residual(const SweepingProblem& P, const DiscreteTrajectory& traj) {
    double worst = 0.0;
    const double h = traj.h();
    for (int i = 0; i < traj.k; ++i) {
        const Vec& x = traj.states[static_cast<std::size_t>(i)];
        const Vec& xn = traj.states[static_cast<std::size_t>(i) + 1];
        Vec w = (x - xn) / h + P.g(x, traj.controls[static_cast<std::size_t>(i)]);
        double res;
        try {
            // Distance to cone{active normals}: the NNLS fit residual.
            Vec rn = eval_constraints(P.C, traj.t(i + 1), xn);
            std::vector<int> act;
            for (int j = 0; j < P.C.s(); ++j)
                if (std::abs(rn(j)) <= activity_tol(xn)) act.push_back(j);
            if (act.empty()) {
                res = w.norm();
            } else {
                Mat A = P.C.normals_as_columns(act);
                Vec lam = nnls(A, w);
                res = (A * lam - w).norm();
            }
        } catch (const std::exception&) {
            res = w.norm();
        }
        worst = std::max(worst, res);
    }
    return worst;
}

} // namespace polysweep

#endif
