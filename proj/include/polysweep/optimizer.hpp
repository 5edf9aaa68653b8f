#ifndef POLYSWEEP_OPTIMIZER_HPP
#define POLYSWEEP_OPTIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "problem.hpp"

namespace polysweep {

struct OptimizerConfig {
    int segments = 1;        // m
    int k = 1000;            // integrator steps
    int coarse_grid = 3;     // control-level grid points in the multi-start
    int polish_iters = 400;  // pattern-search iteration cap per stage
    double penalty_weight = 50.0; // initial endpoint penalty weight
    int max_doublings = 8;   // outer multiplier doublings
    double endpoint_tol = 1e-3; // acceptable terminal equality violation
    std::uint64_t seed = 1;  // for deterministic sampling when the grid is too big
    double T_lo = -1.0, T_hi = -1.0; // search bracket; defaults to Omega_T
};

struct OptimizerResult {
    ControlLaw law;
    double T = 0.0;
    double J = 0.0;       // Mayer cost of the returned law
    double penalty = 0.0; // terminal equality violation ||E x(T) - e||
    std::vector<std::pair<std::vector<double>, double>> history; // (decision, objective)
    // Echoed configuration so refine() can warm-start consistently.
    int segments = 1;
    int k = 0;
    double final_weight = 0.0;
    double base_weight = 50.0; // configured starting penalty weight
    double endpoint_tol = 1e-3;
};

namespace detail {

// Decision vector layout: m-1 interior switching fractions of T, then m*d
// control levels (segment-major), then T.
struct Decision {
    std::vector<double> v;
};

inline int decision_dim(int m, int d) { return (m - 1) + m * d + 1; }

inline ControlLaw decision_to_law(const SweepingProblem& P, int m, const std::vector<double>& v,
                                  double T_lo, double T_hi) {
    const int d = P.d;
    std::vector<double> f(v.begin(), v.begin() + (m - 1));
    std::sort(f.begin(), f.end());
    const double gap = 1e-6;
    double T = std::clamp(v[static_cast<std::size_t>(m - 1 + m * d)], T_lo, T_hi);
    ControlLaw law;
    law.breakpoints.push_back(0.0);
    double prev = 0.0;
    for (int j = 0; j < m - 1; ++j) {
        double fj = std::clamp(f[static_cast<std::size_t>(j)], gap, 1.0 - gap);
        fj = std::max(fj, prev + gap);
        prev = fj;
        law.breakpoints.push_back(fj * T);
    }
    law.breakpoints.push_back(T);
    for (int j = 0; j < m; ++j) {
        Vec u(d);
        for (int c = 0; c < d; ++c)
            u(c) = std::clamp(v[static_cast<std::size_t>(m - 1 + j * d + c)],
                              P.U_lo(c), P.U_hi(c));
        law.levels.push_back(u);
    }
    return law;
}

struct Objective {
    const SweepingProblem& P;
    int m;
    int k;
    double weight;
    double T_lo, T_hi;

    struct Eval {
        double obj;
        double mayer;
        double viol;
    };

    Eval operator()(const std::vector<double>& v) const {
        ControlLaw law = decision_to_law(P, m, v, T_lo, T_hi);
        DiscreteTrajectory traj = integrate(P, law, k, /*with_etas=*/false);
        Eval e;
        e.mayer = mayer_cost(P, traj);
        e.viol = 0.0;
        if (P.omega_x_E.rows() > 0)
            e.viol = (P.omega_x_E * traj.xT() - P.omega_x_e).norm();
        e.obj = e.mayer + weight * e.viol * e.viol;
        return e;
    }
};

inline bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Compass (coordinate pattern) search with shrinking steps.  Evaluates all
// 2N axial neighbors, accepts the best strict improvement with a
// lexicographic tie-break, halves the pattern when stuck.
inline void compass_polish(const Objective& f, std::vector<double>& x, double& fx,
                           std::vector<double> steps, int iter_cap,
                           std::vector<std::pair<std::vector<double>, double>>* history) {
    const std::size_t N = x.size();
    const double step_floor = 1e-6;
    for (int it = 0; it < iter_cap; ++it) {
        std::vector<double> best = x;
        double best_f = fx;
        bool improved = false;
        for (std::size_t i = 0; i < N; ++i) {
            for (int sgn = -1; sgn <= 1; sgn += 2) {
                std::vector<double> cand = x;
                cand[i] += sgn * steps[i];
                const double fc = f(cand).obj;
                if (fc < best_f - 1e-14 ||
                    (std::abs(fc - best_f) <= 1e-14 && improved && lex_less(cand, best))) {
                    best = cand;
                    best_f = fc;
                    improved = true;
                }
            }
        }
        if (improved) {
            x = best;
            fx = best_f;
            if (history) history->emplace_back(x, fx);
        } else {
            double mx = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                steps[i] *= 0.5;
                mx = std::max(mx, steps[i]);
            }
            if (mx < step_floor) break;
        }
    }
}

} // namespace detail

inline OptimizerResult optimize(const SweepingProblem& P, const OptimizerConfig& cfg) {
    P.validate();
    if (cfg.segments < 1) throw dimension_mismatch("optimize: segments must be >= 1");
    const int m = cfg.segments;
    const int d = P.d;
    const double T_lo = cfg.T_lo > 0 ? cfg.T_lo : std::max(P.omega_T_lo, 1e-6);
    const double T_hi = cfg.T_hi > 0 ? cfg.T_hi : P.omega_T_hi;
    if (!(T_lo < T_hi)) throw dimension_mismatch("optimize: empty time bracket");
    const int N = detail::decision_dim(m, d);

    // Per-variable coarse grids.  Switching fractions and the horizon get
    // dense grids: optimal switch/horizon pairs often live in thin feasible
    // slivers that a handful of grid points straddles entirely.  Control
    // levels mostly sit on box faces at optima, so a sparse grid suffices.
    const int G = std::max(2, cfg.coarse_grid);
    const int GF = 9;  // fractions 0.1 .. 0.9
    const int GT = std::max(15, G);
    std::vector<std::vector<double>> grids(static_cast<std::size_t>(N));
    for (int j = 0; j < m - 1; ++j)
        for (int g = 1; g <= GF; ++g)
            grids[static_cast<std::size_t>(j)].push_back(g / (GF + 1.0));
    for (int j = 0; j < m; ++j)
        for (int c = 0; c < d; ++c)
            for (int g = 0; g < G; ++g)
                grids[static_cast<std::size_t>(m - 1 + j * d + c)].push_back(
                    P.U_lo(c) + (P.U_hi(c) - P.U_lo(c)) * g / (G - 1.0));
    for (int g = 0; g < GT; ++g)
        grids[static_cast<std::size_t>(N - 1)].push_back(T_lo + (T_hi - T_lo) * g / (GT - 1.0));

    double total = 1.0;
    for (const auto& gr : grids) total *= static_cast<double>(gr.size());

    // The multi-start scan and the per-candidate polish run on reduced
    // meshes; only the final continuation pays for the full one.
    const int k_scan = std::min(cfg.k, 250);
    const int k_polish = std::min(cfg.k, 500);
    detail::Objective f{P, m, k_scan, cfg.penalty_weight, T_lo, T_hi};

    // Multi-start: full factorial when affordable, otherwise a seeded sample.
    // Keep the few best starts; distinct basins often rank within a hair of
    // each other on the coarse grid.
    const std::size_t n_starts = 6;
    std::vector<std::pair<double, std::vector<double>>> starts;
    const double budget = 40000.0;
    auto consider = [&](const std::vector<double>& v) {
        const double fv = f(v).obj;
        if (starts.size() == n_starts && fv >= starts.back().first) return;
        starts.emplace_back(fv, v);
        std::sort(starts.begin(), starts.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return detail::lex_less(a.second, b.second);
        });
        if (starts.size() > n_starts) starts.pop_back();
    };
    if (total <= budget) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(N), 0);
        std::vector<double> v(static_cast<std::size_t>(N));
        while (true) {
            for (int j = 0; j < N; ++j)
                v[static_cast<std::size_t>(j)] = grids[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
            consider(v);
            int j = N - 1;
            while (j >= 0) {
                if (++idx[static_cast<std::size_t>(j)] < grids[static_cast<std::size_t>(j)].size()) break;
                idx[static_cast<std::size_t>(j)] = 0;
                --j;
            }
            if (j < 0) break;
        }
    } else {
        std::mt19937_64 rng(cfg.seed);
        std::vector<double> v(static_cast<std::size_t>(N));
        for (int trial = 0; trial < static_cast<int>(budget); ++trial) {
            for (int j = 0; j < N; ++j) {
                const auto& gr = grids[static_cast<std::size_t>(j)];
                v[static_cast<std::size_t>(j)] = gr[rng() % gr.size()];
            }
            consider(v);
        }
    }

    // Initial pattern sizes scaled to each variable's range.
    std::vector<double> steps0(static_cast<std::size_t>(N));
    for (int j = 0; j < m - 1; ++j) steps0[static_cast<std::size_t>(j)] = 0.25;
    for (int j = 0; j < m; ++j)
        for (int c = 0; c < d; ++c)
            steps0[static_cast<std::size_t>(m - 1 + j * d + c)] = 0.25 * (P.U_hi(c) - P.U_lo(c));
    steps0[static_cast<std::size_t>(N - 1)] = 0.25 * (T_hi - T_lo);

    // Polish each start on the reduced mesh; rank the polished points on the
    // full mesh so basins separated by penalty walls all get a fair look.
    detail::Objective f_mid{P, m, k_polish, cfg.penalty_weight, T_lo, T_hi};
    detail::Objective f_full{P, m, cfg.k, cfg.penalty_weight, T_lo, T_hi};
    std::vector<double> best;
    double best_f = std::numeric_limits<double>::infinity();
    for (const auto& [f0, v0] : starts) {
        std::vector<double> xc = v0;
        double fxc = f_mid(xc).obj;
        detail::compass_polish(f_mid, xc, fxc, steps0, cfg.polish_iters, nullptr);
        const double score = f_full(xc).obj;
        if (score < best_f - 1e-14 ||
            (std::abs(score - best_f) <= 1e-14 && !best.empty() && detail::lex_less(xc, best))) {
            best_f = score;
            best = xc;
        }
    }

    // Outer penalty continuation with multiplier doubling; history records the
    // final stage only so its objective values are monotone after the
    // multi-start selection point.
    OptimizerResult res;
    double weight = cfg.penalty_weight;
    std::vector<double> x = best;
    for (int stage = 0; stage <= cfg.max_doublings; ++stage) {
        detail::Objective fs{P, m, cfg.k, weight, T_lo, T_hi};
        double fx = fs(x).obj;
        const bool last = stage == cfg.max_doublings;
        std::vector<std::pair<std::vector<double>, double>> hist;
        hist.emplace_back(x, fx);
        detail::compass_polish(fs, x, fx, steps0, cfg.polish_iters, &hist);
        const auto ev = fs(x);
        if (last || ev.viol <= 0.25 * cfg.endpoint_tol) {
            res.history = std::move(hist);
            res.final_weight = weight;
            break;
        }
        weight *= 2.0;
    }

    ControlLaw law = detail::decision_to_law(P, m, x, T_lo, T_hi);
    DiscreteTrajectory traj = integrate(P, law, cfg.k, /*with_etas=*/false);
    res.law = law;
    res.T = law.T();
    res.J = mayer_cost(P, traj);
    res.penalty = P.omega_x_E.rows() > 0 ? (P.omega_x_E * traj.xT() - P.omega_x_e).norm() : 0.0;
    res.segments = m;
    res.k = cfg.k;
    res.base_weight = cfg.penalty_weight;
    res.endpoint_tol = cfg.endpoint_tol;
    if (res.final_weight == 0.0) res.final_weight = weight;
    if (res.penalty > cfg.endpoint_tol)
        throw no_feasible_point("optimize: best endpoint violation " + std::to_string(res.penalty) +
                                " exceeds tolerance " + std::to_string(cfg.endpoint_tol));
    return res;
}

// Warm-started re-polish at a finer mesh.
inline OptimizerResult refine(const SweepingProblem& P, const OptimizerResult& result, int k2) {
    if (k2 < result.k) throw dimension_mismatch("refine: k2 must be >= result's k");
    if (k2 == result.k) return result;
    const int m = result.segments;
    const int d = P.d;
    const double T_lo = std::max(P.omega_T_lo, 1e-6);
    const double T_hi = P.omega_T_hi;
    // Rebuild the decision vector from the returned law.
    std::vector<double> x;
    for (int j = 1; j < m; ++j)
        x.push_back(result.law.breakpoints[static_cast<std::size_t>(j)] / result.T);
    for (int j = 0; j < m; ++j)
        for (int c = 0; c < d; ++c)
            x.push_back(result.law.levels[static_cast<std::size_t>(j)](c));
    x.push_back(result.T);

    // Re-polish with its own penalty continuation, restarting from the base
    // weight: gentle walls first let the pattern slide along curved feasible
    // valleys that axis moves cannot follow once the walls are steep, and the
    // later stages restore endpoint feasibility.
    OptimizerResult out = result;
    double weight = result.base_weight;
    for (int stage = 0; stage < 6; ++stage) {
        detail::Objective f{P, m, k2, weight, T_lo, T_hi};
        double fx = f(x).obj;
        std::vector<double> steps(x.size(), 0.01);
        steps.back() = 0.01 * (T_hi - T_lo);
        std::vector<std::pair<std::vector<double>, double>> hist;
        hist.emplace_back(x, fx);
        detail::compass_polish(f, x, fx, steps, 300, &hist);
        out.history = std::move(hist);
        out.final_weight = weight;
        if (f(x).viol <= 0.25 * result.endpoint_tol) break;
        weight *= 4.0;
    }

    ControlLaw law = detail::decision_to_law(P, m, x, T_lo, T_hi);
    DiscreteTrajectory traj = integrate(P, law, k2, /*with_etas=*/false);
    out.law = law;
    out.T = law.T();
    out.J = mayer_cost(P, traj);
    out.penalty = P.omega_x_E.rows() > 0 ? (P.omega_x_E * traj.xT() - P.omega_x_e).norm() : 0.0;
    out.k = k2;
    return out;
}

} // namespace polysweep

#endif
