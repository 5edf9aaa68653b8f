#ifndef POLYSWEEP_HALFSPACE_BENCHMARK_HPP
#define POLYSWEEP_HALFSPACE_BENCHMARK_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sweeping.hpp"

namespace polysweep {

// Benchmark family with closed-form optima: a single halfspace
// <(1,1)/sqrt(2), x> <= (1 - t)/sqrt(2) sweeping the plane, dynamics
// xdot = (0, u) with u in [-2, 2], start at the origin, terminal constraint
// x2(T) = 1 with free T, and cost T + 1/2 (x1(T) - alpha)^2.
//
// The facet is reached at t = 1/(u+1) when pushing with constant u > 0; on
// the facet the swept velocity is (-(1+u)/2, (u-1)/2) with normal-cone
// multiplier (u+1)/sqrt(2), and the state leaves the facet again once u
// drops below -1.
inline SweepingProblem make_halfspace_benchmark(double alpha) {
    const double r2 = std::sqrt(2.0);
    SweepingProblem P;
    P.n = 2;
    P.d = 1;
    P.C.dim = 2;
    PolyhedronRow row;
    row.normal = Vec(2);
    row.normal << 1.0 / r2, 1.0 / r2;
    row.offset0 = 1.0 / r2;
    row.offset_slope = -1.0 / r2;
    P.C.rows.push_back(row);
    P.g_A = Mat::Zero(2, 2);
    P.g_B = Mat::Zero(2, 1);
    P.g_B(1, 0) = 1.0;
    P.g_c = Vec::Zero(2);
    P.U_lo = Vec::Constant(1, -2.0);
    P.U_hi = Vec::Constant(1, 2.0);
    P.x0 = Vec::Zero(2);
    P.phi_wT = 1.0;
    P.phi_W = Vec(2);
    P.phi_W << 1.0, 0.0;
    P.phi_xref = Vec(2);
    P.phi_xref << alpha, 0.0;
    P.omega_x_E = Mat(1, 2);
    P.omega_x_E << 0.0, 1.0;
    P.omega_x_e = Vec::Constant(1, 1.0);
    P.omega_T_lo = 0.2;
    P.omega_T_hi = 3.0;
    P.lipschitz_cap = 4.0;
    return P;
}

// Closed-form candidate strategies of the benchmark, each feasible
// (x2(T) = 1 exactly) on its validity range in alpha.
struct BenchmarkStrategy {
    std::string name;
    ControlLaw law;
    double closed_form_cost = 0.0;
    double T = 0.0;
};

namespace detail {
inline Vec scalar_control(double u) { return Vec::Constant(1, u); }
}

// "push": constant maximum push u = 2 all the way; reaches the facet at
// t = 1/3 and rides it until x2(T) = 1 at T = 1.  Always valid.
inline BenchmarkStrategy strategy_push(double alpha) {
    BenchmarkStrategy s;
    s.name = "push";
    s.T = 1.0;
    s.law.breakpoints = {0.0, s.T};
    s.law.levels = {detail::scalar_control(2.0)};
    s.closed_form_cost = 1.0 + 0.5 * (-1.0 - alpha) * (-1.0 - alpha);
    return s;
}

// "hold": milder initial push u1 = 3/T - 1 timed so that the facet is hit at
// T/3, then full push u = 2 riding the facet until x2(T) = 1 at T = -alpha - 3/2.
// Valid for alpha <= -5/2 (coincides with "push" at alpha = -5/2).
inline std::optional<BenchmarkStrategy> strategy_hold(double alpha) {
    const double T = -alpha - 1.5;
    if (T < 1.0 - 1e-12 || T > 3.0) return std::nullopt;
    const double u1 = 3.0 / T - 1.0;
    BenchmarkStrategy s;
    s.name = "hold";
    s.T = T;
    if (std::abs(u1 - 2.0) < 1e-12) {
        s.law.breakpoints = {0.0, T};
        s.law.levels = {detail::scalar_control(2.0)};
    } else {
        s.law.breakpoints = {0.0, T / 3.0, T};
        s.law.levels = {detail::scalar_control(u1), detail::scalar_control(2.0)};
    }
    s.closed_form_cost = -alpha - 0.375;
    return s;
}

// "brake": full push u = 2 until tau = -1/3 - 2 alpha/3, then u = -1, which
// slides along the facet (x1 frozen) until x2(T) = 1 at T = (3 tau - 1)/2.
// Valid for alpha < -2.
inline std::optional<BenchmarkStrategy> strategy_brake(double alpha) {
    const double tau = -1.0 / 3.0 - 2.0 * alpha / 3.0;
    if (tau <= 1.0 + 1e-12) return std::nullopt;
    BenchmarkStrategy s;
    s.name = "brake";
    s.T = 0.5 * (3.0 * tau - 1.0);
    s.law.breakpoints = {0.0, tau, s.T};
    s.law.levels = {detail::scalar_control(2.0), detail::scalar_control(-1.0)};
    s.closed_form_cost = -0.5 - alpha;
    return s;
}

// "release": full push u = 2 until tau = -2/9 - 2 alpha/3, then full reverse
// u = -2, which detaches from the facet and descends to x2(T) = 1 at
// T = (5 tau - 1)/4.  Valid for alpha < -11/6 (tau > 1).
inline std::optional<BenchmarkStrategy> strategy_release(double alpha) {
    const double tau = -2.0 / 9.0 - 2.0 * alpha / 3.0;
    if (tau <= 1.0 + 1e-12) return std::nullopt;
    BenchmarkStrategy s;
    s.name = "release";
    s.T = 0.25 * (5.0 * tau - 1.0);
    s.law.breakpoints = {0.0, tau, s.T};
    s.law.levels = {detail::scalar_control(2.0), detail::scalar_control(-2.0)};
    s.closed_form_cost = -13.0 / 72.0 - 5.0 * alpha / 6.0;
    return s;
}

inline std::vector<BenchmarkStrategy> benchmark_strategies(double alpha) {
    std::vector<BenchmarkStrategy> out;
    out.push_back(strategy_push(alpha));
    if (auto s = strategy_hold(alpha)) out.push_back(*s);
    if (auto s = strategy_brake(alpha)) out.push_back(*s);
    if (auto s = strategy_release(alpha)) out.push_back(*s);
    return out;
}

} // namespace polysweep

#endif
