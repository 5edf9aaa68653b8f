#ifndef POLYSWEEP_LINALG_HPP
#define POLYSWEEP_LINALG_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace polysweep {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Minimum-norm least-squares solve of A x = b (rank-revealing).
inline Vec lsq_min_norm(const Mat& A, const Vec& b) {
    if (A.rows() == 0 || A.cols() == 0) return Vec::Zero(A.cols());
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(A);
    return cod.solve(b);
}

inline int numeric_rank(const Mat& A, double tol = 1e-10) {
    if (A.rows() == 0 || A.cols() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(A);
    const auto& s = svd.singularValues();
    const double thresh = tol * std::max(1.0, s.size() ? s(0) : 0.0);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > thresh) ++r;
    return r;
}

// Lawson-Hanson nonnegative least squares: minimize ||A x - b|| s.t. x >= 0.
// Deterministic (lowest-index tie-breaks), suitable for the small systems
// that arise from polyhedral faces.  Returns x; residual available from
// (A x - b).norm() at the caller.
inline Vec nnls(const Mat& A, const Vec& b, double tol = 1e-12, int max_iter = 0) {
    const Eigen::Index n = A.cols();
    Vec x = Vec::Zero(n);
    if (n == 0) return x;
    if (max_iter <= 0) max_iter = 3 * static_cast<int>(n) + 30;

    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    Vec w = A.transpose() * (b - A * x);
    const double wtol = tol * std::max(1.0, b.norm()) * std::max(1.0, A.norm());

    for (int outer = 0; outer < max_iter; ++outer) {
        // Select the most violated dual coordinate among the active (zero) set.
        int best = -1;
        double best_w = wtol;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
                best_w = w(j);
                best = static_cast<int>(j);
            }
        }
        if (best < 0) break; // KKT satisfied
        passive[static_cast<std::size_t>(best)] = true;

        for (int inner = 0; inner < max_iter; ++inner) {
            // Unconstrained solve on the passive set.
            std::vector<int> idx;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)]) idx.push_back(static_cast<int>(j));
            Mat Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
            for (std::size_t c = 0; c < idx.size(); ++c) Ap.col(static_cast<Eigen::Index>(c)) = A.col(idx[c]);
            Vec z = lsq_min_norm(Ap, b);

            bool all_pos = true;
            for (std::size_t c = 0; c < idx.size(); ++c)
                if (z(static_cast<Eigen::Index>(c)) <= tol) { all_pos = false; break; }
            if (all_pos) {
                x.setZero();
                for (std::size_t c = 0; c < idx.size(); ++c) x(idx[c]) = z(static_cast<Eigen::Index>(c));
                break;
            }
            // Step back to the boundary; drop the blocking coordinate(s).
            double alpha = 1.0;
            for (std::size_t c = 0; c < idx.size(); ++c) {
                const double zc = z(static_cast<Eigen::Index>(c));
                const double xc = x(idx[c]);
                if (zc <= tol && xc - zc > tol) alpha = std::min(alpha, xc / (xc - zc));
            }
            for (std::size_t c = 0; c < idx.size(); ++c)
                x(idx[c]) += alpha * (z(static_cast<Eigen::Index>(c)) - x(idx[c]));
            for (std::size_t c = 0; c < idx.size(); ++c)
                if (x(idx[c]) <= tol) { passive[static_cast<std::size_t>(idx[c])] = false; x(idx[c]) = 0.0; }
        }
        w = A.transpose() * (b - A * x);
    }
    return x;
}

// Distance from w to span{S columns} + cone{K columns}.  Used by the
// coderivative membership test: the span part absorbs the orthogonal
// projection, the remainder is a plain cone-projection NNLS.
inline double dist_span_plus_cone(const Vec& w, const Mat& S, const Mat& K) {
    Vec r = w;
    if (S.cols() > 0) {
        // Project w onto span(S)^perp.
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(S);
        r = w - S * cod.solve(w);
    }
    if (K.cols() == 0) return r.norm();
    Mat Kp = K;
    if (S.cols() > 0) {
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(S);
        Kp = K - S * cod.solve(K);
    }
    Vec lam = nnls(Kp, r);
    return (Kp * lam - r).norm();
}

} // namespace polysweep

#endif
