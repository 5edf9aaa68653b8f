#ifndef POLYSWEEP_GEOMETRY_HPP
#define POLYSWEEP_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace polysweep {

// Default activity tolerance: relative to the point magnitude.
inline double activity_tol(const Vec& x) { return 1e-8 * (1.0 + x.norm()); }

// One face of the moving polyhedron: <normal, x> <= offset0 + offset_slope * t.
struct PolyhedronRow {
    Vec normal;          // unit Euclidean norm
    double offset0 = 0.0;
    double offset_slope = 0.0;
};

// Moving convex polyhedron C(t) = { x : <a_j, x> <= c_j(t), j = 1..s } with
// constant unit normals and offsets affine in t.
struct MovingPolyhedron {
    int dim = 0;
    std::vector<PolyhedronRow> rows;

    int s() const { return static_cast<int>(rows.size()); }

    double offset(int j, double t) const {
        return rows[static_cast<std::size_t>(j)].offset0 +
               rows[static_cast<std::size_t>(j)].offset_slope * t;
    }

    // Throws if a normal is not unit length or dimensions disagree.
    void validate() const {
        if (dim <= 0) throw dimension_mismatch("MovingPolyhedron: dim must be positive");
        if (rows.empty()) throw dimension_mismatch("MovingPolyhedron: needs at least one row");
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (rows[j].normal.size() != dim)
                throw dimension_mismatch("MovingPolyhedron: row " + std::to_string(j + 1) +
                                         " normal has wrong dimension");
            if (!rows[j].normal.allFinite())
                throw dimension_mismatch("MovingPolyhedron: row " + std::to_string(j + 1) +
                                         " normal not finite");
            if (std::abs(rows[j].normal.norm() - 1.0) > 1e-12)
                throw dimension_mismatch("MovingPolyhedron: row " + std::to_string(j + 1) +
                                         " normal not unit length");
        }
    }

    // Matrix of the given rows stacked as columns (n x |idx|).
    Mat normals_as_columns(const std::vector<int>& idx) const {
        Mat A(dim, static_cast<Eigen::Index>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c)
            A.col(static_cast<Eigen::Index>(c)) = rows[static_cast<std::size_t>(idx[c])].normal;
        return A;
    }
};

struct ActiveIndexSet {
    std::vector<int> indices; // sorted, 0-based row indices
    double tolerance = 0.0;

    bool contains(int j) const {
        return std::binary_search(indices.begin(), indices.end(), j);
    }
};

// r_j = <a_j, x> - c_j(t); x in C(t) iff max_j r_j <= 0.
inline Vec eval_constraints(const MovingPolyhedron& C, double t, const Vec& x) {
    if (x.size() != C.dim) throw dimension_mismatch("eval_constraints: state dimension mismatch");
    Vec r(C.s());
    for (int j = 0; j < C.s(); ++j)
        r(j) = C.rows[static_cast<std::size_t>(j)].normal.dot(x) - C.offset(j, t);
    return r;
}

// Rows holding with equality within tol; ties at exactly tol count as active.
inline ActiveIndexSet active_set(const MovingPolyhedron& C, double t, const Vec& x, double tol) {
    Vec r = eval_constraints(C, t, x);
    for (int j = 0; j < C.s(); ++j)
        if (r(j) > tol)
            throw infeasible_point("active_set: row " + std::to_string(j + 1) +
                                   " violated by " + std::to_string(r(j)));
    ActiveIndexSet out;
    out.tolerance = tol;
    for (int j = 0; j < C.s(); ++j)
        if (std::abs(r(j)) <= tol) out.indices.push_back(j);
    return out;
}

namespace detail {

// Equality-constrained projection of z onto { A_W x = c_W }; returns the point
// and the multipliers of the selected rows.  Rank-deficient W handled by the
// minimum-norm solve.
struct EqProjection {
    Vec x;
    Vec mult;
};

inline EqProjection project_onto_subset(const MovingPolyhedron& C, double t, const Vec& z,
                                        const std::vector<int>& W) {
    EqProjection out;
    if (W.empty()) {
        out.x = z;
        out.mult = Vec::Zero(0);
        return out;
    }
    Mat A = C.normals_as_columns(W); // n x |W|, columns are normals
    Vec viol(static_cast<Eigen::Index>(W.size()));
    for (std::size_t c = 0; c < W.size(); ++c)
        viol(static_cast<Eigen::Index>(c)) = A.col(static_cast<Eigen::Index>(c)).dot(z) - C.offset(W[c], t);
    // x = z - A mult with A^T A mult = viol  (Gram least-squares).
    out.mult = lsq_min_norm(A.transpose() * A, viol);
    out.x = z - A * out.mult;
    return out;
}

} // namespace detail

// Exhaustive projection oracle: tries every row subset, keeps the feasible
// candidate nearest to z.  Exact for polyhedra; intended for tests and as a
// deterministic fallback at small s.
inline Vec project_enumerate(const MovingPolyhedron& C, double t, const Vec& z,
                             double feas_tol = 1e-9) {
    const int s = C.s();
    if (s > 20) throw empty_set("project_enumerate: too many rows for enumeration");
    double best_d = std::numeric_limits<double>::infinity();
    Vec best;
    const double tol = feas_tol * (1.0 + z.norm());
    for (std::uint32_t mask = 0; mask < (1u << s); ++mask) {
        std::vector<int> W;
        for (int j = 0; j < s; ++j)
            if (mask & (1u << j)) W.push_back(j);
        Vec x = detail::project_onto_subset(C, t, z, W).x;
        Vec r = eval_constraints(C, t, x);
        if (r.maxCoeff() > tol) continue;
        double d = (x - z).norm();
        if (d < best_d - 1e-15) {
            best_d = d;
            best = x;
        }
    }
    if (!best.size()) throw empty_set("project_enumerate: no feasible candidate (empty set?)");
    return best;
}

// Euclidean projection of z onto C(t).  Active-set iteration with Bland-style
// lowest-index add/drop for determinism and anti-cycling; falls back to the
// enumeration oracle if the iteration cap is hit (degenerate geometry).
inline Vec project(const MovingPolyhedron& C, double t, const Vec& z) {
    if (z.size() != C.dim) throw dimension_mismatch("project: point dimension mismatch");
    const int s = C.s();
    const double tol = 1e-11 * (1.0 + z.norm());
    std::vector<int> W;
    const int cap = 4 * s * (s + 2) + 16;
    for (int it = 0; it < cap; ++it) {
        detail::EqProjection eq = detail::project_onto_subset(C, t, z, W);
        // Drop the lowest-index constraint with a negative multiplier.
        int drop = -1;
        for (std::size_t c = 0; c < W.size(); ++c)
            if (eq.mult(static_cast<Eigen::Index>(c)) < -tol) { drop = static_cast<int>(c); break; }
        if (drop >= 0) {
            W.erase(W.begin() + drop);
            continue;
        }
        // Add the lowest-index violated constraint.
        Vec r = eval_constraints(C, t, eq.x);
        int add = -1;
        for (int j = 0; j < s; ++j) {
            if (r(j) > tol && std::find(W.begin(), W.end(), j) == W.end()) { add = j; break; }
        }
        if (add < 0) {
            // Dual-feasible; accept only if primal-feasible too.  A violated
            // row already in W means the working-set equalities are
            // inconsistent (e.g. parallel faces) — defer to the enumeration.
            if (r.maxCoeff() <= 1e-9 * (1.0 + z.norm())) return eq.x;
            break;
        }
        W.push_back(add);
        std::sort(W.begin(), W.end());
    }
    // Degenerate instance: fall back to the exact enumeration.
    return project_enumerate(C, t, z);
}

// Coefficients lambda >= 0 on active rows with sum lambda_j a_j ~ w
// (Motzkin decomposition of a normal-cone element); residual certifies
// membership of w in N(x; C(t)).
struct NormalDecomposition {
    Vec lambda;      // length s, zero off the active set
    double residual; // min over lambda >= 0 of ||sum lambda_j a_j - w||
};

inline NormalDecomposition normal_decompose(const MovingPolyhedron& C, double t, const Vec& x,
                                            const Vec& w, double tol = -1.0) {
    if (tol < 0) tol = activity_tol(x);
    ActiveIndexSet act = active_set(C, t, x, tol); // throws infeasible_point if outside
    NormalDecomposition out;
    out.lambda = Vec::Zero(C.s());
    if (act.indices.empty()) {
        out.residual = w.norm();
        return out;
    }
    Mat A = C.normals_as_columns(act.indices);
    Vec lam = nnls(A, w);
    for (std::size_t c = 0; c < act.indices.size(); ++c)
        out.lambda(act.indices[c]) = lam(static_cast<Eigen::Index>(c));
    out.residual = (A * lam - w).norm();
    return out;
}

// Projection of v onto the tangent cone T(x; C(t)) via the Moreau
// decomposition: subtract the normal-cone projection of v.
inline Vec tangent_project(const MovingPolyhedron& C, double t, const Vec& x, const Vec& v,
                           double tol = -1.0) {
    if (tol < 0) tol = activity_tol(x);
    ActiveIndexSet act = active_set(C, t, x, tol);
    if (act.indices.empty()) return v;
    Mat A = C.normals_as_columns(act.indices);
    Vec lam = nnls(A, v);
    return v - A * lam;
}

// PLICQ: no nonzero nonnegative combination of active normals vanishes.
inline bool check_plicq(const MovingPolyhedron& C, double t, const Vec& x, double tol = -1.0) {
    if (tol < 0) tol = activity_tol(x);
    ActiveIndexSet act = active_set(C, t, x, tol);
    if (act.indices.empty()) return true;
    // Minimize ||A lambda|| over lambda >= 0 with sum lambda = 1 via an
    // augmented NNLS; near-zero optimum means a vanishing combination exists.
    Mat A = C.normals_as_columns(act.indices);
    Mat Aug(A.rows() + 1, A.cols());
    Aug.topRows(A.rows()) = A;
    Aug.bottomRows(1).setOnes();
    Vec b = Vec::Zero(A.rows() + 1);
    b(A.rows()) = 1.0;
    Vec lam = nnls(Aug, b);
    if ((Aug.bottomRows(1) * lam)(0) < 0.5) return true; // could not even reach the simplex
    double combo = (A * lam).norm() / std::max(1.0, lam.sum());
    return combo > 1e-8;
}

// LICQ: active normals linearly independent.
inline bool check_licq(const MovingPolyhedron& C, double t, const Vec& x, double tol = -1.0) {
    if (tol < 0) tol = activity_tol(x);
    ActiveIndexSet act = active_set(C, t, x, tol);
    if (act.indices.empty()) return true;
    Mat A = C.normals_as_columns(act.indices);
    return numeric_rank(A) == static_cast<int>(act.indices.size());
}

// A strictly interior point of C(t) (uniform Slater witness), or nullopt if
// the max margin is <= 0.  Strategy: a margin-1 least-squares probe first,
// then exact max-margin search over active row subsets of the lifted LP
// max delta s.t. <a_j, x> + delta <= c_j(t).
struct SlaterPoint {
    Vec x;
    double margin;
};

inline std::optional<SlaterPoint> slater_point(const MovingPolyhedron& C, double t) {
    const int s = C.s();
    const int n = C.dim;
    Mat A(s, n);
    Vec c(s);
    for (int j = 0; j < s; ++j) {
        A.row(j) = C.rows[static_cast<std::size_t>(j)].normal.transpose();
        c(j) = C.offset(j, t);
    }
    auto margin_of = [&](const Vec& x) { return (c - A * x).minCoeff(); };

    std::optional<SlaterPoint> best;
    auto consider = [&](const Vec& x) {
        double m = margin_of(x);
        if (m > 0 && (!best || m > best->margin + 1e-14)) best = SlaterPoint{x, m};
    };

    // Probe: aim all rows at margin 1 in least squares.
    consider(lsq_min_norm(A, c - Vec::Ones(s)));

    // Exact candidates: vertices of the lifted max-margin LP, enumerated over
    // row subsets (s is small for all supported inputs).
    if (s <= 20) {
        Mat Abar(s, n + 1);
        Abar.leftCols(n) = A;
        Abar.rightCols(1).setOnes();
        for (std::uint32_t mask = 1; mask < (1u << s); ++mask) {
            std::vector<int> W;
            for (int j = 0; j < s; ++j)
                if (mask & (1u << j)) W.push_back(j);
            if (static_cast<int>(W.size()) > n + 1) continue;
            Mat As(static_cast<Eigen::Index>(W.size()), n + 1);
            Vec cs(static_cast<Eigen::Index>(W.size()));
            for (std::size_t r = 0; r < W.size(); ++r) {
                As.row(static_cast<Eigen::Index>(r)) = Abar.row(W[r]);
                cs(static_cast<Eigen::Index>(r)) = c(W[r]);
            }
            Vec y = lsq_min_norm(As, cs);
            if ((As * y - cs).norm() > 1e-9 * (1.0 + cs.norm())) continue;
            consider(y.head(n));
        }
        // Unbounded margin: follow a strict recession direction if one exists.
        Vec dx = lsq_min_norm(A, -Vec::Ones(s));
        if (((-Vec::Ones(s)) - A * dx).norm() <= 1e-9) {
            Vec base = best ? best->x : lsq_min_norm(A, c);
            consider(base + dx * (1.0 + std::abs(margin_of(base))));
        }
    }
    return best;
}

} // namespace polysweep

#endif
