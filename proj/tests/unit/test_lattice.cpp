#include "oracles.hpp"

#include "twinlattice/chain_io.hpp"
#include "twinlattice/lattice.hpp"
#include "twinlattice/minimize.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace twinlat;

namespace {

const WellPair W = build_wells(std::sqrt(2.0));

}  // namespace

TEST_CASE("lattice: geometry") {
    const LatticeGeometry g = LatticeGeometry::standard(10);
    CHECK(g.lambda_n() == doctest::Approx(0.1));
    CHECK(g.columns() == 21);
    CHECK(g.rows() == 21);
    CHECK_FALSE(g.rescaled);
    const LatticeGeometry s = LatticeGeometry::strip(5, -7, 3);
    CHECK(s.lambda_n() == 1.0);
    CHECK(s.rescaled);
    CHECK(s.columns() == 11);
    CHECK(s.rows() == 11);
}

TEST_CASE("lattice: clamps hold boundary values and reject writes") {
    const BoundaryGradient bg = boundary_gradient(W, 0.3);
    ChainState c(LatticeGeometry::standard(6), W, BoundaryData::affine(bg));
    for (int i = c.first_stored(); i <= c.last_stored(); ++i) {
        if (c.is_free(i)) continue;
        CHECK((c.u(i) - bg.F * Vec2(i / 6.0, 0.0)).norm() <= 1e-15);
        CHECK(c.theta(i) == 0.0);
    }
    CHECK_THROWS(c.set_u(6, Vec2(0, 0)));
    CHECK_THROWS(c.set_theta(-6, 0.1));
    CHECK(std::abs(c.tau(3).norm() - W.tau.norm()) <= 1e-15);
}

TEST_CASE("lattice: uniform chain reconstructs the affine map U0") {
    const ChainState c = affine_chain(LatticeGeometry::standard(7), W, W.U0);
    const LatticeField f = reconstruct(c);
    const double s = 1.0 / 7;
    for (int i = -7; i <= 7; ++i) {
        for (int j = -7; j <= 7; ++j) {
            CHECK((f.at(i - j, j) - W.U0 * Vec2((i - j) * s, j * s)).norm() <= 1e-14);
        }
    }
    for (int p = -7; p < 7; ++p) {
        for (int q = -7; q < 7; ++q) {
            if (!f.contains(p + 1, q) || !f.contains(p, q + 1) || !f.contains(p, q)) continue;
            CHECK((f.plus_gradient(p, q) - W.U0).norm() <= 1e-12);
        }
    }
    CHECK(check_admissible(f).empty());
}

TEST_CASE("lattice: pairwise constraint and shear identity on random chains") {
    std::mt19937_64 rng(3);
    const ChainState c = oracle::random_chain(8, W, 0.4, rng);
    const LatticeField f = reconstruct(c);
    const double s = 1.0 / 8;
    double worst = 0.0;
    for (int i = -8; i <= 8; ++i) {
        for (int j = -8; j <= 8; ++j) {
            // reconstruction identity
            worst = std::max(worst, (f.at(i - j, j) - (c.u(i) + j * s * c.tau(i))).norm());
            // u^{p+1,q} - u^{p,q+1} = -lambda tau^{p+q+1}
            const int p = i - j;
            if (f.contains(p + 1, j) && f.contains(p, j + 1)) {
                worst = std::max(worst, (f.at(p + 1, j) - f.at(p, j + 1) + s * c.tau(p + j + 1)).norm());
            }
        }
    }
    CHECK(worst <= 1e-13);
}

TEST_CASE("lattice: plus-triangle gradients see the chain direction") {
    std::mt19937_64 rng(5);
    const ChainState c = oracle::random_chain(6, W, 0.7, rng);
    const LatticeField f = reconstruct(c);
    for (int p = -5; p < 5; ++p) {
        for (int q = -5; q < 5; ++q) {
            if (!f.contains(p, q) || !f.contains(p + 1, q) || !f.contains(p, q + 1)) continue;
            const Mat2& G = f.plus_gradient(p, q);
            // G maps (-1,1) onto (u^{p,q+1} - u^{p+1,q}) / lambda = tau^{p+q+1}
            CHECK((G * Vec2(-1, 1) - c.tau(p + q + 1)).norm() <= 1e-12);
            // stored gradient reproduces its three vertices
            CHECK((G * Vec2(1.0 / 6, 0) - (f.at(p + 1, q) - f.at(p, q))).norm() <= 1e-13);
            CHECK((G * Vec2(0, 1.0 / 6) - (f.at(p, q + 1) - f.at(p, q))).norm() <= 1e-13);
        }
    }
}

TEST_CASE("lattice: extract is the inverse of reconstruct") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 5; ++k) {
        const ChainState c = oracle::random_chain(5 + k, W, 0.2 * k, rng);
        const ChainState back = extract_chain(reconstruct(c), c.boundary());
        for (int i = -5 - k; i <= 5 + k; ++i) {
            CHECK((back.u(i) - c.u(i)).norm() <= 1e-13);
            CHECK(std::abs(back.theta(i) - c.theta(i)) <= 1e-12);
        }
    }
}

TEST_CASE("lattice: twin field and admissibility") {
    const ChainState t = twin_chain(10, W, 0);
    const LatticeField f = reconstruct(t);
    CHECK(check_admissible(f).empty());
    CHECK(count_violations(t) == 0);
    for (int q = -4; q < 4; ++q) {
        // cells on diagonals -8..-2 are left of the interface, 2..8 right of it
        CHECK((f.plus_gradient(-5 - q, q) - W.U0).norm() <= 1e-12);
        CHECK((f.plus_gradient(5 - q, q) - W.QU1()).norm() <= 1e-12);
    }
}

TEST_CASE("lattice: a folded atom is reported") {
    ChainState c = affine_chain(LatticeGeometry::standard(8), W, W.U0);
    // push u^0 far past both horizontal neighbours
    c.set_u(0, c.u(0) + Vec2(0.5, 0.0));
    const std::vector<AdmissibilityViolation> v = check_admissible(reconstruct(c));
    CHECK_FALSE(v.empty());
    for (const AdmissibilityViolation& x : v) CHECK(x.det < -1e-12);
    CHECK(count_violations(c) == v.size());
}

TEST_CASE("io: chain snapshot round-trips bit for bit") {
    std::mt19937_64 rng(13);
    ChainState c = oracle::random_chain(9, W, 0.35, rng);
    std::stringstream ss;
    write_chain(ss, c, {{"config.note", "round trip"}});
    const ChainState back = read_chain(ss);
    CHECK(back == c);
    CHECK(back.geometry() == c.geometry());
    for (int i = back.first_stored(); i <= back.last_stored(); ++i) {
        CHECK(back.u(i).x() == c.u(i).x());
        CHECK(back.u(i).y() == c.u(i).y());
        CHECK(back.theta(i) == c.theta(i));
    }

    const ChainState t = twin_chain(12, W, 3);
    std::stringstream st;
    write_chain(st, t);
    CHECK(read_chain(st) == t);
}

TEST_CASE("io: corrupted snapshots are rejected") {
    const ChainState t = twin_chain(4, W, 0);
    std::stringstream ss;
    write_chain(ss, t);
    std::string text = ss.str();
    // break the clamp record of the last column
    const std::size_t pos = text.rfind("\n4,");
    REQUIRE(pos != std::string::npos);
    text.replace(pos + 3, 1, "9");
    std::stringstream bad(text);
    CHECK_THROWS(read_chain(bad));
    std::stringstream empty("");
    CHECK_THROWS(read_chain(empty));
}
