#include "oracles.hpp"

#include "twinlattice/wells.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace twinlat;

TEST_CASE("wells: invariants at a = sqrt 2") {
    const WellPair w = build_wells(std::sqrt(2.0));
    CHECK(std::abs(w.a * w.b - 1.0) <= 1e-14);
    CHECK(std::abs(w.U0.determinant() - 1.0) <= 1e-14);
    CHECK(std::abs(w.U1.determinant() - 1.0) <= 1e-14);
    CHECK(std::abs((w.U0 - w.Q * w.U1).determinant()) <= 1e-12);
    CHECK(std::abs((w.U0 - w.Qtilde * w.U1).determinant()) <= 1e-12);
    CHECK(w.tau == Vec2(-w.a, w.b));
    CHECK((w.Q - w.Qtilde).norm() > 1e-3);
    for (const Mat2* R : {&w.Q, &w.Qtilde}) {
        CHECK(std::abs(R->determinant() - 1.0) <= 1e-12);
        CHECK((R->transpose() * *R - Mat2::Identity()).norm() <= 1e-12);
    }
}

TEST_CASE("wells: rank-one factorizations") {
    for (double a : {std::sqrt(2.0), 0.7, 1.3, 3.0}) {
        const WellPair w = build_wells(a);
        const Mat2 D = w.U0 - w.Q * w.U1;
        const Mat2 Dt = w.U0 - w.Qtilde * w.U1;
        // project onto the predicted direction and compare the full matrix
        Mat2 P = Vec2(w.a, -w.b) * Vec2(1, 1).transpose() / std::sqrt(2.0);
        Mat2 Pt = Vec2(w.a, w.b) * Vec2(1, -1).transpose() / std::sqrt(2.0);
        const double k = (D.array() * P.array()).sum() / P.squaredNorm();
        const double kt = (Dt.array() * Pt.array()).sum() / Pt.squaredNorm();
        CHECK((D - k * P).norm() <= 1e-12);
        CHECK((Dt - kt * Pt).norm() <= 1e-12);
        CHECK(std::abs(k) > 1e-6);
    }
}

TEST_CASE("wells: rotation angle matches the angle scan") {
    const WellPair w = build_wells(std::sqrt(2.0));
    const oracle::AngleGrid grid(1000000);
    const std::vector<double> roots = oracle::scan_rank_one_angles(w.U0, w.U1, grid);
    REQUIRE(roots.size() == 2);
    // sin(gamma) of the two roots; Q is the one with normal (1,1)
    double best = 1e9;
    for (double t : roots) best = std::min(best, std::abs(std::sin(t) - std::sin(w.gamma)) + std::abs(std::cos(t) - std::cos(w.gamma)));
    CHECK(best <= 1e-5);  // grid spacing is 6.3e-6
    CHECK(std::abs(std::sin(w.gamma) - 0.6) <= 1e-9);
    CHECK((w.Q - rotation(w.gamma)).norm() <= 1e-14);
}

TEST_CASE("wells: invalid parameters") {
    CHECK_THROWS_AS(build_wells(0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_wells(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_wells(1.0), std::invalid_argument);
    const WellPair w = build_wells(std::sqrt(2.0));
    CHECK_THROWS_AS(boundary_gradient(w, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(boundary_gradient(w, 1.5), std::invalid_argument);
}

TEST_CASE("wells: boundary gradient") {
    const WellPair w = build_wells(std::sqrt(2.0));
    CHECK(boundary_gradient(w, 0.0).F == w.U0);
    CHECK(boundary_gradient(w, 1.0).F == w.QU1());
    for (double l : {0.0, 0.25, 0.5, 0.9, 1.0}) {
        const BoundaryGradient g = boundary_gradient(w, l);
        CHECK((g.F - ((1 - l) * w.U0 + l * w.QU1())).norm() <= 1e-14);
        CHECK((g.F * Vec2(1, -1) - Vec2(w.a, -w.b)).norm() <= 1e-12);
        CHECK((g.F * Vec2(1, -1) + w.tau).norm() <= 1e-12);
    }
    const BoundaryGradient h = boundary_gradient(w, 0.5);
    CHECK((h.F * Vec2(1, -1) - Vec2(std::sqrt(2.0), -1.0 / std::sqrt(2.0))).norm() <= 1e-12);
}

TEST_CASE("wells: distance examples") {
    const WellPair w = build_wells(std::sqrt(2.0));
    CHECK(dist_to_well(w.U0, w.U0).distance <= 1e-12);
    CHECK(dist_to_well(rotation(0.3) * w.U1, w.U1).distance <= 1e-12);
    CHECK(std::abs(dist_to_well(rotation(0.3) * w.U1, w.U1).angle - 0.3) <= 1e-12);
    const oracle::AngleGrid grid(1000000);
    const double scanned = oracle::scan_distance(Mat2::Identity(), w.U0, grid).value;
    CHECK(std::abs(scanned - 0.5073) <= 5e-5);
    CHECK(std::abs(dist_to_well(Mat2::Identity(), w.U0).distance - scanned) <= 1e-9);
}

TEST_CASE("wells: closed form agrees with the angle scan on random matrices") {
    const WellPair w = build_wells(std::sqrt(2.0));
    const oracle::AngleGrid grid(1000000);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    int tested = 0;
    double worst = 0.0;
    while (tested < 1000) {
        Mat2 M;
        M << U(rng), U(rng), U(rng), U(rng);
        if (M.determinant() <= 0.0) continue;
        const Mat2& W = tested % 2 ? w.U0 : w.U1;
        worst = std::max(worst, std::abs(dist_to_well(M, W).distance - oracle::scan_distance(M, W, grid).value));
        ++tested;
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("wells: left rotation invariance") {
    const WellPair w = build_wells(std::sqrt(2.0));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int k = 0; k < 1000; ++k) {
        Mat2 M;
        M << U(rng), U(rng), U(rng), U(rng);
        const Mat2 R = rotation(3.0 * U(rng));
        CHECK(std::abs(dist_to_well(R * M, w.U0).distance - dist_to_well(M, w.U0).distance) <= 1e-12);
    }
}
