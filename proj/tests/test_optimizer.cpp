#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "polysweep/halfspace_benchmark.hpp"
#include "polysweep/optimizer.hpp"

using namespace polysweep;

namespace {

// Free-time minimization with no endpoint constraint over a static box:
// the optimum is the shortest admissible horizon.
SweepingProblem time_only_problem() {
    SweepingProblem P;
    P.n = 2;
    P.d = 1;
    P.C.dim = 2;
    PolyhedronRow r1, r2;
    r1.normal = (Vec(2) << 1.0, 0.0).finished();
    r1.offset0 = 1.0;
    r2.normal = (Vec(2) << 0.0, 1.0).finished();
    r2.offset0 = 1.0;
    P.C.rows = {r1, r2};
    P.g_A = Mat::Zero(2, 2);
    P.g_B = Mat::Zero(2, 1);
    P.g_c = Vec::Zero(2);
    P.U_lo = Vec::Constant(1, -1.0);
    P.U_hi = Vec::Constant(1, 1.0);
    P.x0 = Vec::Zero(2);
    P.phi_wT = 1.0;
    P.phi_W = Vec::Zero(2);
    P.phi_xref = Vec::Zero(2);
    P.omega_x_E = Mat(0, 2);
    P.omega_x_e = Vec(0);
    P.omega_T_lo = 0.2;
    P.omega_T_hi = 3.0;
    return P;
}

} // namespace

TEST_CASE("single-segment benchmark optimum: u = 3/2, T = 2, cost 5/2") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    OptimizerConfig cfg;
    cfg.segments = 1;
    cfg.k = 1000;
    OptimizerResult res = optimize(P, cfg);
    CHECK(res.J == Catch::Approx(2.5).margin(0.02));
    CHECK(res.T == Catch::Approx(2.0).margin(0.05));
    CHECK(res.law.levels[0](0) == Catch::Approx(1.5).margin(0.05));
    CHECK(res.penalty <= cfg.endpoint_tol);
    // The constant maximal push is feasible too but strictly worse.
    DiscreteTrajectory push = integrate(P, strategy_push(-3.0).law, 1000);
    CHECK(mayer_cost(P, push) == Catch::Approx(3.0).margin(1e-10));
    CHECK(res.J < mayer_cost(P, push) - 0.4);
}

TEST_CASE("pure time minimization finds the lower horizon bound") {
    SweepingProblem P = time_only_problem();
    OptimizerConfig cfg;
    cfg.segments = 1;
    cfg.k = 200;
    OptimizerResult res = optimize(P, cfg);
    CHECK(res.T == Catch::Approx(0.2).margin(1e-4));
    CHECK(res.J == Catch::Approx(0.2).margin(1e-4));
    CHECK(res.penalty == 0.0);
}

TEST_CASE("identical configurations give bit-identical results") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    OptimizerConfig cfg;
    cfg.segments = 1;
    cfg.k = 400;
    cfg.seed = 42;
    OptimizerResult a = optimize(P, cfg);
    OptimizerResult b = optimize(P, cfg);
    CHECK(a.J == b.J);
    CHECK(a.T == b.T);
    REQUIRE(a.law.levels.size() == b.law.levels.size());
    for (std::size_t j = 0; j < a.law.levels.size(); ++j)
        CHECK((a.law.levels[j] - b.law.levels[j]).norm() == 0.0);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i)
        CHECK(a.history[i].second == b.history[i].second);
}

TEST_CASE("final-stage search history is monotone non-increasing") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    OptimizerConfig cfg;
    cfg.segments = 2;
    cfg.k = 500;
    OptimizerResult res = optimize(P, cfg);
    REQUIRE(res.history.size() >= 2);
    for (std::size_t i = 1; i < res.history.size(); ++i)
        CHECK(res.history[i].second <= res.history[i - 1].second + 1e-12);
}

TEST_CASE("reported cost and violation match a re-simulation of the law") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    OptimizerConfig cfg;
    cfg.segments = 1;
    cfg.k = 400;
    OptimizerResult res = optimize(P, cfg);
    DiscreteTrajectory traj = integrate(P, res.law, res.k);
    CHECK(res.J == Catch::Approx(mayer_cost(P, traj)).margin(1e-12));
    CHECK(res.penalty ==
          Catch::Approx((P.omega_x_E * traj.xT() - P.omega_x_e).norm()).margin(1e-12));
}

TEST_CASE("refine at the same mesh is the identity; a finer mesh preserves the cost") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    OptimizerConfig cfg;
    cfg.segments = 2;
    cfg.k = 1000;
    OptimizerResult res = optimize(P, cfg);
    CHECK(res.J == Catch::Approx(167.0 / 72.0).margin(0.03));

    OptimizerResult same = refine(P, res, res.k);
    CHECK(same.J == res.J);
    CHECK(same.T == res.T);

    OptimizerResult fine = refine(P, res, 2000);
    CHECK(fine.k == 2000);
    CHECK(std::abs(fine.J - res.J) <= 5e-3);
    CHECK(fine.penalty <= res.endpoint_tol);

    CHECK_THROWS_AS(refine(P, res, 500), dimension_mismatch);
}

TEST_CASE("unreachable endpoint target raises no_feasible_point") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    P.omega_x_e = Vec::Constant(1, 10.0); // x2(T) = 10 is unreachable with |u| <= 2, T <= 3
    OptimizerConfig cfg;
    cfg.segments = 1;
    cfg.k = 200;
    cfg.max_doublings = 3;
    CHECK_THROWS_AS(optimize(P, cfg), no_feasible_point);
}

TEST_CASE("invalid configurations are rejected") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    OptimizerConfig cfg;
    cfg.segments = 0;
    CHECK_THROWS_AS(optimize(P, cfg), dimension_mismatch);
    cfg.segments = 1;
    cfg.T_lo = 2.0;
    cfg.T_hi = 1.0;
    CHECK_THROWS_AS(optimize(P, cfg), dimension_mismatch);
}
