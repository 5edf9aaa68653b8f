#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "polysweep/certificates.hpp"
#include "polysweep/halfspace_benchmark.hpp"

using namespace polysweep;

namespace {

const double R2 = std::sqrt(2.0);

ControlLaw constant_law(double u, double T) {
    ControlLaw law;
    law.breakpoints = {0.0, T};
    law.levels = {Vec::Constant(1, u)};
    return law;
}

} // namespace

TEST_CASE("index sets split active normals by their pairing with y") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    Vec facet = (Vec(2) << 0.0, 1.0).finished(); // on the facet at t = 0

    Vec tangent = (Vec(2) << -1.0, 1.0).finished();
    IndexSets is = index_sets(P.C, 0.0, facet, tangent);
    CHECK(is.I0 == std::vector<int>{0});
    CHECK(is.Igt.empty());

    IndexSets ig = index_sets(P.C, 0.0, facet, Vec(P.C.rows[0].normal));
    CHECK(ig.I0.empty());
    CHECK(ig.Igt == std::vector<int>{0});

    IndexSets in = index_sets(P.C, 0.0, Vec(Vec::Zero(2)), tangent);
    CHECK(in.I0.empty());
    CHECK(in.Igt.empty());
}

TEST_CASE("coderivative membership residuals") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    Vec facet = (Vec(2) << 0.0, 1.0).finished();
    Vec u = Vec::Constant(1, 2.0);
    Vec w = Vec::Zero(2);
    const Vec a = P.C.rows[0].normal;

    // Interior point: empty index sets, the residual is just the norm of z.
    Vec z_x = (Vec(2) << 0.6, -0.8).finished();
    CoderivativeCheck c0 = coderivative_membership(P, 0.0, Vec(Vec::Zero(2)), u, w,
                                                   Vec(Vec::Zero(2)), z_x, Vec(Vec::Zero(1)));
    CHECK(c0.residual == Catch::Approx(1.0).margin(1e-12));

    // On the facet with y = 0 the active row joins I0, so only the part of
    // z_x orthogonal to the normal contributes.
    CoderivativeCheck cf =
        coderivative_membership(P, 0.0, facet, u, w, Vec(Vec::Zero(2)), z_x, Vec(Vec::Zero(1)));
    CHECK(cf.residual == Catch::Approx(std::sqrt(1.0 - 0.02)).margin(1e-10));

    // y tangent to the facet: z_x anywhere in span{a} is admissible.
    Vec yt = (Vec(2) << -1.0, 1.0).finished();
    CoderivativeCheck cs = coderivative_membership(P, 0.0, facet, u, w, yt, Vec(-2.5 * a),
                                                   Vec(-(P.g_B.transpose() * yt)));
    CHECK(cs.residual == Catch::Approx(0.0).margin(1e-10));

    // y along the normal: only cone{a} is admissible, so -c a has residual c.
    CoderivativeCheck cc = coderivative_membership(P, 0.0, facet, u, w, Vec(a), Vec(-1.5 * a),
                                                   Vec(-(P.g_B.transpose() * a)));
    CHECK(cc.residual == Catch::Approx(1.5).margin(1e-10));
    CHECK(coderivative_membership(P, 0.0, facet, u, w, Vec(a), Vec(1.5 * a),
                                  Vec(-(P.g_B.transpose() * a)))
              .residual == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("averaged Hamiltonian of simple adjoints") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    DiscreteTrajectory free_phase = integrate(P, constant_law(1.0, 0.5), 100);

    std::vector<Vec> zeros(free_phase.states.size(), Vec::Zero(2));
    CHECK(compute_Hbar(free_phase, zeros) == 0.0);

    // Constant adjoint, straight-line trajectory: Hbar = <p, v> with v = (0, 1).
    Vec p = (Vec(2) << 0.7, -0.3).finished();
    std::vector<Vec> cp(free_phase.states.size(), p);
    CHECK(compute_Hbar(free_phase, cp) == Catch::Approx(-0.3).margin(1e-10));

    // Braking strategy: p = (-1, 0) pairs to 1 on both the pushed arc
    // (velocity (-3/2, 1/2) scaled by 2/3 of the horizon) and the slide.
    auto brake = strategy_brake(-3.0);
    REQUIRE(brake.has_value());
    DiscreteTrajectory btraj = integrate(P, brake->law, 2000);
    std::vector<Vec> pb(btraj.states.size(), (Vec(2) << -1.0, 0.0).finished());
    CHECK(compute_Hbar(btraj, pb) == Catch::Approx(1.0).margin(10.0 * btraj.h()));
}

TEST_CASE("multiplier bundle of the maximal-push trajectory certifies") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    DiscreteTrajectory traj = integrate(P, strategy_push(-3.0).law, 2000);
    MultiplierBundle bundle = solve_multipliers(P, traj);
    const double h = traj.h();

    CHECK(bundle.mu0 == 1.0);
    // Terminal adjoint from transversality: p_k = (-(x1+3), 0) - lambdaT e2
    // with lambdaT fixed by Hbar = 1; closed form (-2, -1).
    CHECK(bundle.p.back()(0) == Catch::Approx(-2.0).margin(0.05));
    CHECK(bundle.p.back()(1) == Catch::Approx(-1.0).margin(0.05));
    CHECK(bundle.Hbar == Catch::Approx(P.phi_wT).margin(10.0 * h));

    CertificateReport rep = check_certificate(P, traj, bundle);
    CHECK(rep.passed());
    CHECK(rep.stationarity_resid <= rep.tol_used);
    CHECK(rep.dynamics_resid <= 1e-9);
    CHECK(rep.transversality_resid <= 1e-9);
    CHECK(rep.maximization_resid <= rep.tol_used);
    CHECK(rep.nontriviality_norm > 1.0);
}

TEST_CASE("interior trajectories get measure-free multipliers") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    // Contact would start at t = 2/3; stop before it.
    DiscreteTrajectory traj = integrate(P, constant_law(0.5, 0.5), 400);
    MultiplierBundle bundle = solve_multipliers(P, traj);
    for (const Vec& g : bundle.gamma) CHECK(g.norm() == 0.0);
    // With zero state coupling the adjoint is constant off the facet.
    for (const Vec& p : bundle.p) CHECK((p - bundle.p.back()).norm() < 1e-12);
}

TEST_CASE("the trivial bundle fails nontriviality") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    DiscreteTrajectory traj = integrate(P, strategy_push(-3.0).law, 500);
    MultiplierBundle zero;
    zero.mu0 = 0.0;
    zero.p.assign(traj.states.size(), Vec::Zero(2));
    zero.q.assign(traj.states.size(), Vec::Zero(2));
    zero.gamma.assign(static_cast<std::size_t>(traj.k), Vec::Zero(1));
    zero.psi.assign(static_cast<std::size_t>(traj.k), Vec::Zero(1));
    zero.etaT = Vec::Zero(1);
    zero.lambdaT = Vec::Zero(1);
    CertificateReport rep = check_certificate(P, traj, zero);
    CHECK(rep.nontriviality_norm <= rep.tol_used);
    CHECK_FALSE(rep.passed());
}

TEST_CASE("a wrong-signed control multiplier is caught") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    DiscreteTrajectory traj = integrate(P, strategy_push(-3.0).law, 500);
    MultiplierBundle bundle = solve_multipliers(P, traj);
    REQUIRE(check_certificate(P, traj, bundle).passed());
    // u_0 = 2 sits on the upper face, where psi must be nonnegative.
    bundle.psi[0] = Vec::Constant(1, -1.0);
    CertificateReport rep = check_certificate(P, traj, bundle);
    CHECK(rep.maximization_resid >= 1.0);
    CHECK_FALSE(rep.passed());
}

TEST_CASE("q telescopes the adjoint jumps and the constraint measure") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    DiscreteTrajectory traj = integrate(P, strategy_push(-3.0).law, 800);
    MultiplierBundle bundle = solve_multipliers(P, traj);
    const double h = traj.h();
    Vec acc = Vec::Zero(2);
    for (int i = 0; i < traj.k; ++i)
        for (int j = 0; j < P.C.s(); ++j)
            acc += bundle.gamma[static_cast<std::size_t>(i)](j) * P.C.rows[static_cast<std::size_t>(j)].normal;
    CHECK((bundle.q.front() - (bundle.p.front() + h * acc)).norm() < 1e-10);
    CHECK((bundle.q.back() - bundle.p.back()).norm() == 0.0);
}

TEST_CASE("slackness and box conditions of the certified bundle hold pointwise") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    DiscreteTrajectory traj = integrate(P, strategy_push(-3.0).law, 2000);
    MultiplierBundle bundle = solve_multipliers(P, traj);
    CertificateReport rep = check_certificate(P, traj, bundle);
    REQUIRE(rep.passed());
    for (int i = 0; i + 1 < traj.k; ++i) {
        const Vec& pn = bundle.p[static_cast<std::size_t>(i) + 1];
        // Wherever the facet multiplier is strictly positive the adjoint is
        // orthogonal to the facet normal.
        if (traj.etas[static_cast<std::size_t>(i)](0) > 1e-3)
            CHECK(std::abs(P.C.rows[0].normal.dot(pn)) <= rep.tol_used * (1.0 + pn.norm()));
        // u_i = 2 is the upper box face: psi may not point downward.
        CHECK(bundle.psi[static_cast<std::size_t>(i)](0) >= -rep.tol_used);
    }
}

TEST_CASE("adjoint increments satisfy the coderivative upper estimate") {
    SweepingProblem P = make_halfspace_benchmark(-3.0);
    DiscreteTrajectory traj = integrate(P, strategy_push(-3.0).law, 1000);
    MultiplierBundle bundle = solve_multipliers(P, traj);
    CertificateReport rep = check_certificate(P, traj, bundle);
    REQUIRE(rep.passed());
    // With no state coupling, step i asks gamma-weighted normals (the x-slot
    // increment) to lie in the estimate at y = p_{i+1}; the final step holds
    // the endpoint atom and is excluded.
    for (int i = 0; i + 1 < traj.k; ++i) {
        const Vec& pn = bundle.p[static_cast<std::size_t>(i) + 1];
        Vec z_x = Vec::Zero(2);
        for (int j = 0; j < P.C.s(); ++j)
            z_x += bundle.gamma[static_cast<std::size_t>(i)](j) * P.C.rows[static_cast<std::size_t>(j)].normal;
        Vec z_u = -(P.g_B.transpose() * pn);
        CoderivativeCheck cd = coderivative_membership(
            P, traj.t(i + 1), traj.states[static_cast<std::size_t>(i) + 1],
            traj.controls[static_cast<std::size_t>(i)], Vec(Vec::Zero(2)), pn, z_x, z_u,
            /*check_domain=*/false, rep.tol_used);
        CHECK(cd.residual <= rep.tol_used);
    }
}
