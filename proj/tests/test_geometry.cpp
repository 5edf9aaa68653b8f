#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "polysweep/geometry.hpp"

using namespace polysweep;

namespace {

const double R2 = std::sqrt(2.0);

// Single moving halfspace <(1,1)/sqrt(2), x> <= (1 - t)/sqrt(2).
MovingPolyhedron sweeping_halfspace() {
    MovingPolyhedron C;
    C.dim = 2;
    PolyhedronRow row;
    row.normal = (Vec(2) << 1.0 / R2, 1.0 / R2).finished();
    row.offset0 = 1.0 / R2;
    row.offset_slope = -1.0 / R2;
    C.rows.push_back(row);
    return C;
}

MovingPolyhedron unit_square_corner() {
    MovingPolyhedron C;
    C.dim = 2;
    PolyhedronRow r1, r2;
    r1.normal = (Vec(2) << 1.0, 0.0).finished();
    r1.offset0 = 1.0;
    r2.normal = (Vec(2) << 0.0, 1.0).finished();
    r2.offset0 = 1.0;
    C.rows = {r1, r2};
    return C;
}

// Random nonempty polyhedron with a known interior point.
MovingPolyhedron random_polyhedron(std::mt19937_64& rng, int n, int s, Vec* interior = nullptr) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Vec x0(n);
    for (int i = 0; i < n; ++i) x0(i) = gauss(rng);
    MovingPolyhedron C;
    C.dim = n;
    for (int j = 0; j < s; ++j) {
        PolyhedronRow row;
        row.normal = Vec(n);
        do {
            for (int i = 0; i < n; ++i) row.normal(i) = gauss(rng);
        } while (row.normal.norm() < 1e-3);
        row.normal.normalize();
        row.offset0 = row.normal.dot(x0) + unif(rng);
        row.offset_slope = 0.0;
        C.rows.push_back(row);
    }
    if (interior) *interior = x0;
    return C;
}

} // namespace

TEST_CASE("constraint residuals of the sweeping halfspace") {
    MovingPolyhedron C = sweeping_halfspace();
    Vec origin = Vec::Zero(2);
    CHECK(eval_constraints(C, 0.0, origin)(0) == Catch::Approx(-1.0 / R2).margin(1e-14));
    Vec boundary = (Vec(2) << 0.0, 1.0).finished();
    CHECK(eval_constraints(C, 0.0, boundary)(0) == Catch::Approx(0.0).margin(1e-14));
    CHECK_THROWS_AS(eval_constraints(C, 0.0, Vec::Zero(3)), dimension_mismatch);
}

TEST_CASE("halfspace residual is linear along the normal") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        MovingPolyhedron C = sweeping_halfspace();
        Vec x(2);
        x << gauss(rng), gauss(rng);
        const double t = 0.3;
        const double r = eval_constraints(C, t, x).maxCoeff();
        const double step = r + 1.0;
        Vec xp = x - step * C.rows[0].normal;
        CHECK(eval_constraints(C, t, xp)(0) == Catch::Approx(r - step).margin(1e-12));
    }
}

TEST_CASE("active sets") {
    MovingPolyhedron C = sweeping_halfspace();
    Vec boundary = (Vec(2) << 0.0, 1.0).finished();
    CHECK(active_set(C, 0.0, boundary, 1e-9).indices == std::vector<int>{0});
    CHECK(active_set(C, 0.0, Vec::Zero(2), 1e-9).indices.empty());

    MovingPolyhedron sq = unit_square_corner();
    Vec corner = (Vec(2) << 1.0, 1.0).finished();
    CHECK(active_set(sq, 0.0, corner, 1e-9).indices == std::vector<int>{0, 1});

    Vec outside = (Vec(2) << 2.0, 0.0).finished();
    CHECK_THROWS_AS(active_set(C, 0.0, outside, 1e-9), infeasible_point);
}

TEST_CASE("projection onto a single halfspace") {
    MovingPolyhedron C = sweeping_halfspace();
    Vec z = (Vec(2) << 0.0, 2.0).finished();
    Vec x = project(C, 0.0, z);
    CHECK(x(0) == Catch::Approx(-0.5).margin(1e-12));
    CHECK(x(1) == Catch::Approx(1.5).margin(1e-12));

    Vec inside = (Vec(2) << 0.1, 0.2).finished();
    CHECK((project(C, 0.0, inside) - inside).norm() < 1e-12);
}

TEST_CASE("projection properties: idempotence, nonexpansiveness, oracle agreement") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 2.0);
    std::uniform_int_distribution<int> ndist(1, 3), sdist(1, 4);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = ndist(rng), s = sdist(rng);
        MovingPolyhedron C = random_polyhedron(rng, n, s);
        Vec z1(n), z2(n);
        for (int i = 0; i < n; ++i) {
            z1(i) = gauss(rng);
            z2(i) = gauss(rng);
        }
        Vec p1 = project(C, 0.0, z1);
        Vec p2 = project(C, 0.0, z2);
        CHECK((project(C, 0.0, p1) - p1).norm() < 1e-10);
        CHECK((p1 - p2).norm() <= (z1 - z2).norm() + 1e-10);
        CHECK((p1 - project_enumerate(C, 0.0, z1)).norm() < 1e-9);
        // Variational characterization: z - p in the normal cone at p.
        CHECK(normal_decompose(C, 0.0, p1, z1 - p1, 1e-7 * (1.0 + p1.norm())).residual <
              1e-6 * (1.0 + z1.norm()));
    }
}

TEST_CASE("tangent cone projection on the facet") {
    MovingPolyhedron C = sweeping_halfspace();
    Vec x = (Vec(2) << 0.0, 1.0).finished();
    Vec v = (Vec(2) << 0.5, 2.5).finished(); // g + time drift with u = 2
    Vec w = tangent_project(C, 0.0, x, v);
    CHECK(w(0) == Catch::Approx(-1.0).margin(1e-12));
    CHECK(w(1) == Catch::Approx(1.0).margin(1e-12));

    Vec tang = (Vec(2) << -1.0, 1.0).finished();
    CHECK((tangent_project(C, 0.0, x, tang) - tang).norm() < 1e-12);
    CHECK(tangent_project(C, 0.0, x, Vec(C.rows[0].normal)).norm() < 1e-12);
}

TEST_CASE("Moreau decomposition of a velocity at the boundary") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MovingPolyhedron C = sweeping_halfspace();
    Vec x = (Vec(2) << 0.0, 1.0).finished();
    for (int trial = 0; trial < 50; ++trial) {
        Vec v(2);
        v << gauss(rng), gauss(rng);
        Vec w = tangent_project(C, 0.0, x, v);
        Vec normal_part = v - w;
        CHECK(std::abs(w.dot(normal_part)) < 1e-10);
        CHECK(normal_decompose(C, 0.0, x, normal_part).residual < 1e-10);
    }
}

TEST_CASE("normal-cone decomposition on the benchmark facet") {
    MovingPolyhedron C = sweeping_halfspace();
    // On the contact arc with u = 2 the normal part of g - xdot is
    // ((u+1)/2, (u+1)/2) with coefficient (u+1)/sqrt(2) = 3/sqrt(2).
    Vec x = (Vec(2) << 0.0, 1.0).finished();
    Vec w = (Vec(2) << 1.5, 1.5).finished();
    NormalDecomposition nd = normal_decompose(C, 0.0, x, w);
    CHECK(nd.lambda(0) == Catch::Approx(3.0 / R2).margin(1e-10));
    CHECK(nd.residual < 1e-12);

    NormalDecomposition zero = normal_decompose(C, 0.0, x, Vec::Zero(2));
    CHECK(zero.lambda.norm() == 0.0);
    CHECK(zero.residual == 0.0);

    Vec interior = Vec::Zero(2);
    Vec wi = (Vec(2) << 0.3, -0.4).finished();
    NormalDecomposition ni = normal_decompose(C, 0.0, interior, wi);
    CHECK(ni.lambda.norm() == 0.0);
    CHECK(ni.residual == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("normal cone polarity") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MovingPolyhedron C = sweeping_halfspace();
    Vec x = (Vec(2) << 0.25, 0.75).finished(); // on the facet at t = 0
    Vec w = unif(rng) * C.rows[0].normal;
    REQUIRE(normal_decompose(C, 0.0, x, w).residual < 1e-9);
    for (int trial = 0; trial < 1000; ++trial) {
        Vec y(2);
        y << gauss(rng), gauss(rng);
        y = project(C, 0.0, y);
        CHECK(w.dot(y - x) <= 1e-8);
    }
}

TEST_CASE("constraint qualification checks") {
    MovingPolyhedron C = sweeping_halfspace();
    Vec boundary = (Vec(2) << 0.0, 1.0).finished();
    CHECK(check_plicq(C, 0.0, boundary));
    CHECK(check_licq(C, 0.0, boundary));

    MovingPolyhedron slab;
    slab.dim = 2;
    PolyhedronRow r1, r2;
    r1.normal = (Vec(2) << 1.0, 0.0).finished();
    r1.offset0 = 0.0;
    r2.normal = (Vec(2) << -1.0, 0.0).finished();
    r2.offset0 = 0.0;
    slab.rows = {r1, r2};
    Vec origin = Vec::Zero(2);
    CHECK_FALSE(check_plicq(slab, 0.0, origin));
    CHECK_FALSE(check_licq(slab, 0.0, origin));

    MovingPolyhedron sq = unit_square_corner();
    Vec corner = (Vec(2) << 1.0, 1.0).finished();
    CHECK(check_plicq(sq, 0.0, corner));
    CHECK(check_licq(sq, 0.0, corner));
}

TEST_CASE("strict interior points") {
    MovingPolyhedron C = sweeping_halfspace();
    auto sp = slater_point(C, 0.0);
    REQUIRE(sp.has_value());
    CHECK(sp->margin > 0.0);
    CHECK(eval_constraints(C, 0.0, sp->x).maxCoeff() < 0.0);
    // The origin already has margin 1/sqrt(2); the max-margin point beats it.
    CHECK(sp->margin >= 1.0 / R2 - 1e-9);

    MovingPolyhedron slab;
    slab.dim = 2;
    PolyhedronRow r1, r2;
    r1.normal = (Vec(2) << 1.0, 0.0).finished();
    r1.offset0 = 0.0;
    r2.normal = (Vec(2) << -1.0, 0.0).finished();
    r2.offset0 = 0.0;
    slab.rows = {r1, r2};
    CHECK_FALSE(slater_point(slab, 0.0).has_value());
}

TEST_CASE("polyhedron validation") {
    MovingPolyhedron C = sweeping_halfspace();
    CHECK_NOTHROW(C.validate());
    C.rows[0].normal *= 2.0;
    CHECK_THROWS_AS(C.validate(), dimension_mismatch);
    MovingPolyhedron empty;
    empty.dim = 2;
    CHECK_THROWS_AS(empty.validate(), dimension_mismatch);
}
