#ifndef POLYSWEEP_CERTIFICATES_HPP
#define POLYSWEEP_CERTIFICATES_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "problem.hpp"

namespace polysweep {

// Discrete dual variables for a trajectory: cost multiplier mu0, adjoint
// vectors p_i, per-step measure weights gamma_i (signed), control-slot
// multipliers psi_i, endpoint facet multipliers etaT, endpoint affine-row
// coefficients lambdaT, and the reconstructed q_i = p_i + h sum_{l>=i}
// gamma_l-weighted normals (discrete right-continuous representative of the
// adjoint before subtracting the accumulated constraint measure).
struct MultiplierBundle {
    double mu0 = 1.0;
    std::vector<Vec> p;     // k+1 vectors in R^n
    std::vector<Vec> gamma; // k vectors in R^s
    std::vector<Vec> psi;   // k vectors in R^d
    Vec etaT;               // R^s, >= 0
    Vec lambdaT;            // coefficients of the endpoint affine rows
    std::vector<Vec> q;     // k+1 vectors in R^n
    double Hbar = 0.0;
    double rho_k = 0.0;     // zero in self-referenced mode
    std::vector<Vec> xi_u;  // per-step reference deviations (zero self-referenced)
    std::vector<Vec> xi_y;
};

struct CertificateReport {
    double stationarity_resid = 0.0;
    double dynamics_resid = 0.0;
    double transversality_resid = 0.0;
    bool complementarity_ok = false;
    bool sign_ok = false;
    double maximization_resid = 0.0;
    double nontriviality_norm = 0.0;
    bool support_ok = false;
    double Hbar_minus_mu = 0.0;
    double tol_used = 0.0;

    bool passed() const {
        return stationarity_resid <= tol_used && dynamics_resid <= tol_used &&
               transversality_resid <= tol_used && std::abs(Hbar_minus_mu) <= tol_used &&
               maximization_resid <= tol_used && complementarity_ok && sign_ok &&
               support_ok && nontriviality_norm > tol_used;
    }
};

// Index sets splitting the active rows by the sign of <a_j, y>.
struct IndexSets {
    std::vector<int> I0;  // active rows with <a_j, y> = 0 within tol
    std::vector<int> Igt; // active rows with <a_j, y> > tol
};

inline IndexSets index_sets(const MovingPolyhedron& C, double t, const Vec& x, const Vec& y,
                            double tol = -1.0) {
    if (tol < 0) tol = activity_tol(x);
    ActiveIndexSet act = active_set(C, t, x, tol); // throws infeasible_point outside C(t)
    IndexSets out;
    for (int j : act.indices) {
        const double s = C.rows[static_cast<std::size_t>(j)].normal.dot(y);
        if (std::abs(s) <= tol)
            out.I0.push_back(j);
        else if (s > tol)
            out.Igt.push_back(j);
    }
    return out;
}

struct CoderivativeCheck {
    double residual = 0.0; // distance of z to the upper estimate
    bool domain_ok = false;
};

// Residual of z = (z_x, z_u) against the coderivative upper estimate
//   z in (-g_A^T y, -g_B^T y) + (span{a_j : j in I0(y)} + cone{a_j : j in Igt(y)}, 0)
// plus, when requested, the domain representation check: y + g(x,u) must be a
// nonnegative combination of active normals with <a_j,y>=0 on the support and
// <a_j,y> >= 0 off it; requires independent active normals.
inline CoderivativeCheck coderivative_membership(const SweepingProblem& P, double t, const Vec& x,
                                                const Vec& u, const Vec& w, const Vec& y,
                                                const Vec& z_x, const Vec& z_u,
                                                bool check_domain = false, double tol = -1.0) {
    if (tol < 0) tol = activity_tol(x);
    const MovingPolyhedron& C = P.C;
    IndexSets is = index_sets(C, t, x, y, tol);

    CoderivativeCheck out;
    Mat S = C.normals_as_columns(is.I0);
    Mat K = C.normals_as_columns(is.Igt);
    const Vec rx = z_x - (-(P.g_A.transpose() * y));
    const Vec ru = z_u - (-(P.g_B.transpose() * y));
    out.residual = dist_span_plus_cone(rx, S, K) + ru.norm();

    out.domain_ok = true;
    if (check_domain) {
        ActiveIndexSet act = active_set(C, t, x, tol);
        if (!check_licq(C, t, x, tol))
            throw licq_violated("coderivative_membership: dependent active normals");
        // w must be -g + normal-cone element; lambda is unique under LICQ.
        Vec target = w + P.g(x, u);
        Vec lam;
        double resid;
        if (act.indices.empty()) {
            lam = Vec::Zero(0);
            resid = target.norm();
        } else {
            Mat A = C.normals_as_columns(act.indices);
            lam = nnls(A, target);
            resid = (A * lam - target).norm();
        }
        if (resid > tol * (1.0 + target.norm())) out.domain_ok = false;
        // Domain pattern for the y + g representation.
        Vec ty = y + P.g(x, u);
        Vec lamy;
        double residy;
        if (act.indices.empty()) {
            residy = ty.norm();
            lamy = Vec::Zero(0);
        } else {
            Mat A = C.normals_as_columns(act.indices);
            lamy = nnls(A, ty);
            residy = (A * lamy - ty).norm();
        }
        if (residy > tol * (1.0 + ty.norm())) out.domain_ok = false;
        for (std::size_t c = 0; c < static_cast<std::size_t>(lamy.size()); ++c) {
            const double ay =
                C.rows[static_cast<std::size_t>(act.indices[c])].normal.dot(y);
            if (lamy(static_cast<Eigen::Index>(c)) > tol && std::abs(ay) > tol) out.domain_ok = false;
            if (lamy(static_cast<Eigen::Index>(c)) <= tol && ay < -tol) out.domain_ok = false;
        }
    }
    return out;
}

// H_bar = (1/k) sum_i <p_{i+1}, (x_{i+1}-x_i)/h>.
inline double compute_Hbar(const DiscreteTrajectory& traj, const std::vector<Vec>& p) {
    const double h = traj.h();
    double acc = 0.0;
    for (int i = 0; i < traj.k; ++i)
        acc += p[static_cast<std::size_t>(i) + 1].dot(
            (traj.states[static_cast<std::size_t>(i) + 1] - traj.states[static_cast<std::size_t>(i)]) / h);
    return acc / traj.k;
}

namespace detail {

// Per-step structural data shared by the solver and the checker.
struct StepSupports {
    std::vector<std::vector<int>> active; // rows active at (t_{i+1}, x_{i+1}), per step
    std::vector<std::vector<int>> eta_pos; // rows with eta_{i,j} > eta_tol, per step
    double eta_tol = 0.0;
};

inline StepSupports step_supports(const SweepingProblem& P, const DiscreteTrajectory& traj) {
    StepSupports sup;
    double eta_max = 0.0;
    for (const Vec& e : traj.etas) eta_max = std::max(eta_max, e.size() ? e.maxCoeff() : 0.0);
    sup.eta_tol = 1e-6 * (1.0 + eta_max);
    sup.active.resize(static_cast<std::size_t>(traj.k));
    sup.eta_pos.resize(static_cast<std::size_t>(traj.k));
    for (int i = 0; i < traj.k; ++i) {
        const Vec& xn = traj.states[static_cast<std::size_t>(i) + 1];
        Vec r = eval_constraints(P.C, traj.t(i + 1), xn);
        const double tol = activity_tol(xn);
        for (int j = 0; j < P.C.s(); ++j) {
            if (std::abs(r(j)) <= tol) sup.active[static_cast<std::size_t>(i)].push_back(j);
            if (traj.etas[static_cast<std::size_t>(i)](j) > sup.eta_tol)
                sup.eta_pos[static_cast<std::size_t>(i)].push_back(j);
        }
    }
    return sup;
}

// Backward sweep from a given terminal adjoint p_k.  Per step i the weights
// gamma_i live on the rows active at the step target and are chosen
// minimum-norm so that p_i = p_{i+1} + h g_A^T p_{i+1} - h sum gamma_{i,j} a_j
// is orthogonal to every normal whose eta was positive at step i-1 (the
// slackness constraint of the previous step, whose Lambda is p_i).  The sweep
// is linear in p_k.
struct SweepOut {
    std::vector<Vec> p;     // k+1
    std::vector<Vec> gamma; // k
    double Hbar = 0.0;
};

inline SweepOut backward_sweep(const SweepingProblem& P, const DiscreteTrajectory& traj,
                               const StepSupports& sup, const Vec& p_k) {
    const int k = traj.k;
    const double h = traj.h();
    SweepOut out;
    out.p.assign(static_cast<std::size_t>(k) + 1, Vec());
    out.gamma.assign(static_cast<std::size_t>(k), Vec::Zero(P.C.s()));
    out.p[static_cast<std::size_t>(k)] = p_k;
    for (int i = k - 1; i >= 0; --i) {
        const Vec& pn = out.p[static_cast<std::size_t>(i) + 1];
        Vec p_tilde = pn + h * (P.g_A.transpose() * pn);
        const std::vector<int>& S = sup.active[static_cast<std::size_t>(i)];
        const std::vector<int>* Z = i > 0 ? &sup.eta_pos[static_cast<std::size_t>(i) - 1] : nullptr;
        if (S.empty() || !Z || Z->empty()) {
            out.p[static_cast<std::size_t>(i)] = p_tilde;
        } else {
            Mat AS = P.C.normals_as_columns(S);        // n x |S|
            Mat AZ = P.C.normals_as_columns(*Z);       // n x |Z|
            // h (AZ^T AS) gamma = AZ^T p_tilde, minimum-norm.
            Vec g = lsq_min_norm(AZ.transpose() * AS, AZ.transpose() * p_tilde) / h;
            if (!g.allFinite())
                throw singular_adjoint_step("backward_sweep: singular step " + std::to_string(i));
            for (std::size_t c = 0; c < S.size(); ++c)
                out.gamma[static_cast<std::size_t>(i)](S[c]) = g(static_cast<Eigen::Index>(c));
            out.p[static_cast<std::size_t>(i)] = p_tilde - h * (AS * g);
        }
    }
    out.Hbar = compute_Hbar(traj, out.p);
    return out;
}

} // namespace detail

// Construct a multiplier bundle for a trajectory by the normal-form backward
// pass (mu0 = 1): the terminal adjoint is parameterized by the endpoint facet
// multipliers etaT >= 0 and affine-row coefficients lambdaT through the
// transversality equation, the free coefficients are then fixed by the
// final-time condition Hbar = mu0 * phi_wT (minimum-norm, nonnegative etaT),
// and the sweep fills p, gamma, psi, q.  Falls back to mu0 = 0 with the
// nontriviality normalization when the normal attempt cannot meet tolerance.
inline MultiplierBundle solve_multipliers(const SweepingProblem& P, const DiscreteTrajectory& traj,
                                          const DiscretizationConfig& cfg = {}) {
    (void)cfg; // self-referenced mode: xi_u = xi_y = 0, rho_k = 0
    const int k = traj.k;
    const double h = traj.h();
    if (traj.etas.size() != static_cast<std::size_t>(k))
        throw dimension_mismatch("solve_multipliers: trajectory lacks recovered etas");
    detail::StepSupports sup = detail::step_supports(P, traj);

    // Endpoint-active facet rows (activity at (T, x_k)).
    const Vec& xT = traj.xT();
    Vec rT = eval_constraints(P.C, traj.T, xT);
    std::vector<int> AT;
    for (int j = 0; j < P.C.s(); ++j)
        if (std::abs(rT(j)) <= activity_tol(xT)) AT.push_back(j);
    const int nA = static_cast<int>(AT.size());
    const int mE = static_cast<int>(P.omega_x_E.rows());

    // Cost gradient in x at the endpoint.
    auto grad_phi_x = [&](double mu0) {
        Vec gp(P.n);
        for (int i = 0; i < P.n; ++i) gp(i) = mu0 * P.phi_W(i) * (xT(i) - P.phi_xref(i));
        return gp;
    };

    // p_k = b0 + B * dv with dv = [etaT over AT; lambdaT].
    auto terminal_base = [&](double mu0) { return Vec(-grad_phi_x(mu0)); };
    Mat B(P.n, nA + mE);
    for (int c = 0; c < nA; ++c) B.col(c) = -P.C.rows[static_cast<std::size_t>(AT[static_cast<std::size_t>(c)])].normal;
    for (int c = 0; c < mE; ++c) B.col(nA + c) = -P.omega_x_E.row(c).transpose();

    const bool T_interior = traj.T > P.omega_T_lo + 1e-9 && traj.T < P.omega_T_hi - 1e-9;

    auto assemble = [&](double mu0, const Vec& dv) {
        MultiplierBundle bundle;
        bundle.mu0 = mu0;
        Vec p_k = terminal_base(mu0) + B * dv;
        detail::SweepOut sw = detail::backward_sweep(P, traj, sup, p_k);
        bundle.p = std::move(sw.p);
        bundle.gamma = std::move(sw.gamma);
        bundle.Hbar = sw.Hbar;
        bundle.etaT = Vec::Zero(P.C.s());
        for (int c = 0; c < nA; ++c) bundle.etaT(AT[static_cast<std::size_t>(c)]) = dv(c);
        bundle.lambdaT = dv.tail(mE);
        bundle.psi.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            bundle.psi.push_back(h * (P.g_B.transpose() * bundle.p[static_cast<std::size_t>(i) + 1]));
        // q reconstruction: q_k = p_k, q_i = q_{i+1} + (p_i - p_{i+1}) + h * gamma_i normals.
        bundle.q.assign(static_cast<std::size_t>(k) + 1, Vec());
        bundle.q[static_cast<std::size_t>(k)] = bundle.p[static_cast<std::size_t>(k)];
        for (int i = k - 1; i >= 0; --i) {
            Vec gn = Vec::Zero(P.n);
            for (int j = 0; j < P.C.s(); ++j)
                if (bundle.gamma[static_cast<std::size_t>(i)](j) != 0.0)
                    gn += bundle.gamma[static_cast<std::size_t>(i)](j) *
                          P.C.rows[static_cast<std::size_t>(j)].normal;
            bundle.q[static_cast<std::size_t>(i)] =
                bundle.q[static_cast<std::size_t>(i) + 1] +
                (bundle.p[static_cast<std::size_t>(i)] - bundle.p[static_cast<std::size_t>(i) + 1]) +
                h * gn;
        }
        bundle.xi_u.assign(static_cast<std::size_t>(k), Vec::Zero(P.d));
        bundle.xi_y.assign(static_cast<std::size_t>(k), Vec::Zero(P.n));
        bundle.rho_k = 0.0;
        return bundle;
    };

    // Hbar is linear in p_k (the sweep is linear); get its affine form in dv.
    const double H0 = detail::backward_sweep(P, traj, sup, terminal_base(1.0)).Hbar;
    Vec Hcoef(nA + mE);
    for (int c = 0; c < nA + mE; ++c)
        Hcoef(c) = detail::backward_sweep(P, traj, sup, Vec(B.col(c))).Hbar;

    // Normal-form attempt: choose dv minimum-norm with etaT >= 0 so that
    // Hbar(dv) = mu0 * phi_wT when T is interior to Omega_T.
    Vec dv = Vec::Zero(nA + mE);
    if (T_interior && Hcoef.size() > 0 && Hcoef.norm() > 1e-12) {
        const double target = 1.0 * P.phi_wT - H0;
        // Minimum-norm solution of <Hcoef, dv> = target with the etaT block
        // nonnegative: clamp negative etaT coordinates and re-solve.
        std::vector<bool> free_coord(static_cast<std::size_t>(nA + mE), true);
        for (int pass = 0; pass <= nA; ++pass) {
            Vec c_eff = Vec::Zero(nA + mE);
            for (int j = 0; j < nA + mE; ++j)
                if (free_coord[static_cast<std::size_t>(j)]) c_eff(j) = Hcoef(j);
            const double nrm2 = c_eff.squaredNorm();
            dv = nrm2 > 1e-14 ? Vec(c_eff * (target / nrm2)) : Vec(Vec::Zero(nA + mE));
            bool ok = true;
            for (int j = 0; j < nA; ++j)
                if (dv(j) < -1e-12) {
                    free_coord[static_cast<std::size_t>(j)] = false;
                    ok = false;
                }
            for (int j = 0; j < nA; ++j) dv(j) = std::max(dv(j), 0.0);
            if (ok) break;
        }
    }
    MultiplierBundle bundle = assemble(1.0, dv);

    // Abnormal fallback when the final-time relation cannot be met.
    const double cert_tol = 10.0 * h * (1.0 + [&] {
        double m = 0.0;
        for (const Vec& pi : bundle.p) m = std::max(m, pi.lpNorm<Eigen::Infinity>());
        return m;
    }());
    const double Hresid = T_interior ? std::abs(bundle.Hbar - bundle.mu0 * P.phi_wT) : 0.0;
    if (Hresid > cert_tol && nA + mE > 0) {
        // mu0 = 0: pick a unit direction closest to the null space of Hcoef
        // with nonnegative etaT part, then normalize the whole bundle.
        Vec best_dv = Vec::Zero(nA + mE);
        double best_score = std::numeric_limits<double>::infinity();
        for (int j = 0; j < nA + mE; ++j) {
            for (int sgn = -1; sgn <= 1; sgn += 2) {
                if (j < nA && sgn < 0) continue; // etaT >= 0
                Vec cand = Vec::Zero(nA + mE);
                cand(j) = sgn;
                const double score = std::abs(Hcoef.dot(cand));
                if (score < best_score) {
                    best_score = score;
                    best_dv = cand;
                }
            }
        }
        MultiplierBundle ab = assemble(0.0, best_dv);
        double norm = ab.mu0 + ab.etaT.norm() + ab.p.front().norm();
        for (const Vec& ps : ab.psi) norm += ps.norm();
        if (norm > 1e-12) {
            const double sc = 1.0 / norm;
            ab.etaT *= sc;
            ab.lambdaT *= sc;
            for (Vec& v : ab.p) v *= sc;
            for (Vec& v : ab.q) v *= sc;
            for (Vec& v : ab.gamma) v *= sc;
            for (Vec& v : ab.psi) v *= sc;
            ab.Hbar *= sc;
            const double abH = T_interior ? std::abs(ab.Hbar) : 0.0;
            if (abH < Hresid) return ab;
        }
    }
    return bundle;
}

// Evaluate every necessary-condition residual for (traj, bundle).
//
// Step-indexed sign/slackness checks ((93), (96), coderivative consistency)
// cover steps 0..k-2: when the terminal state lies on an active facet the
// constraint measure carries an atom at T that lands in the final step's
// gamma, and the continuum conditions hold only up to that atom (a.e. /
// right-continuous convention).  The final step's gamma is the discrete
// endpoint atom and is checked through the transversality relation instead.
inline CertificateReport check_certificate(const SweepingProblem& P, const DiscreteTrajectory& traj,
                                           const MultiplierBundle& bundle, double tol = -1.0) {
    CertificateReport rep;
    const int k = traj.k;
    const double h = traj.h();
    double pmax = 0.0;
    for (const Vec& pi : bundle.p) pmax = std::max(pmax, pi.lpNorm<Eigen::Infinity>());
    if (tol < 0) tol = 10.0 * h * (1.0 + pmax);
    rep.tol_used = tol;

    detail::StepSupports sup = detail::step_supports(P, traj);

    // Dynamics representation: g - velocity = sum eta_j a_j.
    for (int i = 0; i < k; ++i) {
        const Vec& x = traj.states[static_cast<std::size_t>(i)];
        const Vec& xn = traj.states[static_cast<std::size_t>(i) + 1];
        Vec lhs = P.g(x, traj.controls[static_cast<std::size_t>(i)]) - (xn - x) / h;
        Vec rhs = Vec::Zero(P.n);
        for (int j = 0; j < P.C.s(); ++j)
            rhs += traj.etas[static_cast<std::size_t>(i)](j) * P.C.rows[static_cast<std::size_t>(j)].normal;
        rep.dynamics_resid = std::max(rep.dynamics_resid, (lhs - rhs).norm());
    }

    // Adjoint stationarity, both slots, every step.
    for (int i = 0; i < k; ++i) {
        const Vec& pn = bundle.p[static_cast<std::size_t>(i) + 1]; // Lambda_i (xi_y = 0)
        Vec gn = Vec::Zero(P.n);
        for (int j = 0; j < P.C.s(); ++j)
            gn += bundle.gamma[static_cast<std::size_t>(i)](j) * P.C.rows[static_cast<std::size_t>(j)].normal;
        Vec x_slot = (pn - bundle.p[static_cast<std::size_t>(i)]) / h + P.g_A.transpose() * pn - gn;
        Vec u_slot = bundle.psi[static_cast<std::size_t>(i)] - h * (P.g_B.transpose() * pn);
        rep.stationarity_resid =
            std::max(rep.stationarity_resid, x_slot.norm() * h + u_slot.norm());
    }

    // Transversality in x: -p_k - sum etaT_j a_j = mu0 grad_phi_x + E^T lambdaT.
    {
        const Vec& xT = traj.xT();
        Vec gp(P.n);
        for (int i = 0; i < P.n; ++i)
            gp(i) = bundle.mu0 * P.phi_W(i) * (xT(i) - P.phi_xref(i));
        Vec lhs = -bundle.p[static_cast<std::size_t>(k)];
        for (int j = 0; j < P.C.s(); ++j)
            lhs -= bundle.etaT(j) * P.C.rows[static_cast<std::size_t>(j)].normal;
        Vec rhs = gp;
        if (P.omega_x_E.rows() > 0) rhs += P.omega_x_E.transpose() * bundle.lambdaT;
        rep.transversality_resid = (lhs - rhs).norm();
    }

    // Final-time component: Hbar - mu0 phi_wT must lie in N(T; Omega_T).
    {
        const double excess = bundle.Hbar - bundle.mu0 * P.phi_wT;
        const bool at_lo = traj.T <= P.omega_T_lo + 1e-9;
        const bool at_hi = traj.T >= P.omega_T_hi - 1e-9;
        if (at_hi && excess > 0)
            rep.Hbar_minus_mu = 0.0;
        else if (at_lo && excess < 0)
            rep.Hbar_minus_mu = 0.0;
        else
            rep.Hbar_minus_mu = excess;
    }

    // Complementarity: eta >= 0 and zero off-activity (steps), etaT zero on
    // endpoint-inactive rows, gamma zero off-activity, and the slackness
    // <a_j, Lambda_i> = 0 wherever eta_{i,j} > 0 (final step excluded: atom).
    rep.complementarity_ok = true;
    rep.sign_ok = true;
    for (int i = 0; i < k; ++i) {
        const Vec& eta = traj.etas[static_cast<std::size_t>(i)];
        const Vec& pn = bundle.p[static_cast<std::size_t>(i) + 1];
        for (int j = 0; j < P.C.s(); ++j) {
            const bool act = std::find(sup.active[static_cast<std::size_t>(i)].begin(),
                                       sup.active[static_cast<std::size_t>(i)].end(),
                                       j) != sup.active[static_cast<std::size_t>(i)].end();
            if (eta(j) < -1e-12) rep.complementarity_ok = false;
            if (!act && eta(j) > sup.eta_tol) rep.complementarity_ok = false;
            if (i < k - 1) {
                const double gij = bundle.gamma[static_cast<std::size_t>(i)](j);
                if (!act && std::abs(gij) * h > tol) rep.complementarity_ok = false;
                const double proj = P.C.rows[static_cast<std::size_t>(j)].normal.dot(pn);
                if (eta(j) > sup.eta_tol && std::abs(proj) > tol * (1.0 + pn.norm()))
                    rep.complementarity_ok = false;
                // Sign rule: gamma >= 0 on Igt, free on I0, zero elsewhere.
                if (act) {
                    if (proj > tol * (1.0 + pn.norm())) {
                        if (gij < -tol / h) rep.sign_ok = false;
                    } else if (proj < -tol * (1.0 + pn.norm())) {
                        if (std::abs(gij) * h > tol) rep.sign_ok = false;
                    }
                }
            }
        }
    }
    // Endpoint rows: etaT supported on endpoint-active facets, nonnegative.
    {
        Vec rT = eval_constraints(P.C, traj.T, traj.xT());
        for (int j = 0; j < P.C.s(); ++j) {
            if (bundle.etaT(j) < -1e-12) rep.sign_ok = false;
            if (rT(j) < -activity_tol(traj.xT()) && bundle.etaT(j) > tol)
                rep.complementarity_ok = false;
        }
    }

    // Control maximization: psi_i in N(u_i; U) for the box.
    for (int i = 0; i < k; ++i) {
        const Vec& u = traj.controls[static_cast<std::size_t>(i)];
        const Vec& ps = bundle.psi[static_cast<std::size_t>(i)];
        for (int c = 0; c < P.d; ++c) {
            const double span = P.U_hi(c) - P.U_lo(c);
            double viol = 0.0;
            if (u(c) >= P.U_hi(c) - 1e-9 * (1.0 + span))
                viol = std::max(0.0, -ps(c));
            else if (u(c) <= P.U_lo(c) + 1e-9 * (1.0 + span))
                viol = std::max(0.0, ps(c));
            else
                viol = std::abs(ps(c));
            rep.maximization_resid = std::max(rep.maximization_resid, viol);
        }
    }

    // Support condition: positively-signed gamma (the gamma_> part) must not
    // live in the interior of a run of steps where every active eta is
    // strictly positive (discrete surrogate of the density-point set).
    rep.support_ok = true;
    {
        std::vector<bool> strict(static_cast<std::size_t>(k), false);
        for (int i = 0; i < k; ++i) {
            const auto& act = sup.active[static_cast<std::size_t>(i)];
            if (act.empty()) continue;
            bool all_pos = true;
            for (int j : act)
                if (traj.etas[static_cast<std::size_t>(i)](j) <= sup.eta_tol) all_pos = false;
            strict[static_cast<std::size_t>(i)] = all_pos;
        }
        for (int i = 1; i < k - 1; ++i) {
            if (!(strict[static_cast<std::size_t>(i) - 1] && strict[static_cast<std::size_t>(i)] &&
                  strict[static_cast<std::size_t>(i) + 1]))
                continue; // not in the interior of a strictly-active run
            const Vec& pn = bundle.p[static_cast<std::size_t>(i) + 1];
            for (int j = 0; j < P.C.s(); ++j) {
                const double gij = bundle.gamma[static_cast<std::size_t>(i)](j);
                const double proj = P.C.rows[static_cast<std::size_t>(j)].normal.dot(pn);
                if (gij * h > tol && proj > tol * (1.0 + pn.norm())) rep.support_ok = false;
            }
        }
    }

    // Nontriviality.
    rep.nontriviality_norm = bundle.mu0 + bundle.etaT.norm() + bundle.p.front().norm();
    for (const Vec& ps : bundle.psi) rep.nontriviality_norm += ps.norm();

    return rep;
}

} // namespace polysweep

#endif
