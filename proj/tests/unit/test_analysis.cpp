#include "oracles.hpp"

#include "twinlattice/analysis.hpp"
#include "twinlattice/energy.hpp"
#include "twinlattice/minimize.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace twinlat;

namespace {

const WellPair W = build_wells(std::sqrt(2.0));

// zero-energy laminate: column blocks alternate between U0 and QU1 according to `pattern`
ChainState laminate(int n, const std::vector<int>& pattern) {
    const int k = static_cast<int>(pattern.size());
    const double s = 1.0 / n;
    const int cols = 2 * n;
    auto well_at = [&](int i) {
        const int b = std::min(k - 1, (i + n) * k / cols);
        return pattern[static_cast<std::size_t>(b)] == 0 ? W.U0 : W.QU1();
    };
    std::vector<Vec2> u(static_cast<std::size_t>(2 * n + 1));
    u[0] = W.U0 * Vec2(-1, 0);
    for (int i = -n + 1; i <= n; ++i) {
        const Mat2 G = well_at(i - 1);
        u[static_cast<std::size_t>(i + n)] = u[static_cast<std::size_t>(i + n - 1)] + G * Vec2(s, 0);
    }
    const ClampMap left{well_at(-n), u[0] - well_at(-n) * Vec2(-1, 0)};
    const ClampMap right{well_at(n - 1), u.back() - well_at(n - 1) * Vec2(1, 0)};
    ChainState c(LatticeGeometry::standard(n), W, BoundaryData::custom(left, right));
    for (int i = -n + 1; i < n; ++i) c.set_u(i, u[static_cast<std::size_t>(i + n)]);
    return c;
}

// column i lies within one atom of a block boundary where the well changes
bool cls_near_change(const std::vector<int>& pattern, int n, int i) {
    const int k = static_cast<int>(pattern.size());
    for (int b = 1; b < k; ++b) {
        if (pattern[static_cast<std::size_t>(b)] == pattern[static_cast<std::size_t>(b - 1)]) continue;
        // first bond of block b starts at column -n + ceil(b * 2n / k)
        const int edge = -n + (b * 2 * n + k - 1) / k;
        if (std::abs(i - edge) <= 1) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("analysis: twin classification") {
    const ChainState t = twin_chain(20, W, 0);
    const WellClassification cls = classify(reconstruct(t), W);
    for (int j = -20; j <= 20; ++j) {
        for (int i = -20; i <= 20; ++i) {
            const CellClass& c = cls.at(i, j);
            CHECK(c.distance <= c.other_distance + 1e-12);
            if (i < -1) CHECK(c.well_id == 0);
            if (i > 1) CHECK(c.well_id == 1);
            if (std::abs(i) > 1) CHECK(c.distance <= 1e-12);
        }
    }
    const InterfaceReport r = interface_positions(cls, 0.05);
    REQUIRE(r.interfaces.size() == 1);
    CHECK(std::abs(r.interfaces[0].x_s) <= 1e-15);
    CHECK(r.interfaces[0].left_well == 0);
    CHECK(r.interfaces[0].right_well == 1);
}

TEST_CASE("analysis: uniform state has no interfaces") {
    const ChainState c = affine_chain(LatticeGeometry::standard(10), W, W.U0);
    const InterfaceReport r = interface_positions(classify(reconstruct(c), W), 0.05);
    CHECK(r.interfaces.empty());
    CHECK(r.runs == 1);
    CHECK(r.layer_count() == 0);
}

TEST_CASE("analysis: midpoint gradient is a tie") {
    const Mat2 mid = 0.5 * (W.U0 + W.QU1());
    const double d0 = dist_to_well(mid, W.U0).distance;
    const double d1 = dist_to_well(mid, W.U1).distance;
    CHECK(std::abs(d0 - d1) <= 1e-12);
    const ChainState c = affine_chain(LatticeGeometry::standard(4), W, mid);
    const WellClassification cls = classify(reconstruct(c), W);
    CHECK(cls.at(0, 0).tie);
    CHECK(cls.at(0, 0).well_id == 0);
}

TEST_CASE("analysis: classification under a global rotation") {
    std::mt19937_64 rng(41);
    const ChainState c = oracle::random_chain(6, W, 0.5, rng, 0.2, 0.1);
    const WellClassification a = classify(reconstruct(c), W);
    const Mat2 R = rotation(1.1);
    BoundaryData bc = c.boundary();
    bc.kind = BoundaryKind::custom;
    bc.left = ClampMap{R * bc.left.gradient, R * bc.left.offset};
    bc.right = ClampMap{R * bc.right.gradient, R * bc.right.offset};
    ChainState r(c.geometry(), W, bc);
    for (int i = -5; i <= 5; ++i) {
        r.set_u(i, R * c.u(i));
        r.set_theta(i, c.theta(i) + 1.1);
    }
    const WellClassification b = classify(reconstruct(r), W);
    for (std::size_t k = 0; k < a.cells.size(); ++k) {
        CHECK(std::abs(a.cells[k].distance - b.cells[k].distance) <= 1e-12);
        CHECK(std::abs(a.cells[k].other_distance - b.cells[k].other_distance) <= 1e-12);
        if (std::abs(a.cells[k].distance - a.cells[k].other_distance) > 1e-10) {
            CHECK(a.cells[k].well_id == b.cells[k].well_id);
        }
    }
}

TEST_CASE("analysis: interface count equals sign changes on piecewise affine laminates") {
    for (int k = 1; k <= 8; ++k) {
        const int n = 16;
        for (int mask = 0; mask < (1 << k); ++mask) {
            std::vector<int> pattern(static_cast<std::size_t>(k));
            int changes = 0;
            for (int b = 0; b < k; ++b) {
                pattern[static_cast<std::size_t>(b)] = (mask >> b) & 1;
                if (b > 0 && pattern[static_cast<std::size_t>(b)] != pattern[static_cast<std::size_t>(b - 1)]) ++changes;
            }
            const ChainState c = laminate(n, pattern);
            // energy sits only on the interface columns
            const EnergyBreakdown bd = chain_energy(c);
            for (int i = -n; i <= n; ++i) {
                if (bd.col_sum(i) > 1e-20) CHECK(cls_near_change(pattern, n, i));
            }
            const InterfaceReport r = interface_positions(classify(reconstruct(c), W), 0.05);
            CHECK(static_cast<int>(r.interfaces.size()) == changes);
        }
    }
}

TEST_CASE("analysis: good lines on a zero-energy state are centered") {
    const ChainState c = affine_chain(LatticeGeometry::standard(40), W, W.U0);
    const GoodLines g = find_good_lines(chain_energy(c), W);
    REQUIRE(g.found);
    CHECK(g.j_zero == 0);
    CHECK(g.j_plus - g.j_zero == g.j_zero - g.j_minus);
    CHECK(g.j_minus >= -40);
    CHECK(g.j_minus <= -40 + 8);
    for (const RowStats& r : g.chosen) CHECK(r.good());
}

TEST_CASE("analysis: good lines report a violated row bound") {
    ChainState c = affine_chain(LatticeGeometry::standard(20), W, W.U0);
    for (int i = -19; i < 20; ++i) c.set_u(i, c.u(i) * 1.6);
    const EnergyBreakdown bd = chain_energy(c);
    for (int j = -20; j <= 20; ++j) REQUIRE(bd.weighted_row_sum(j) >= 1.0);
    const GoodLines g = find_good_lines(bd, W);
    CHECK_FALSE(g.found);
    CHECK(g.failed_condition == "good1");
    CHECK_FALSE(g.best_candidates.empty());
    CHECK_THROWS_AS(find_good_lines(bd, W, {0.4, 0.3}), std::invalid_argument);
}

TEST_CASE("analysis: good lines found are verified") {
    std::mt19937_64 rng(42);
    const ChainState c = oracle::random_chain(30, W, 0.0, rng, 0.01, 0.0);
    const EnergyBreakdown bd = chain_energy(c);
    GoodLineOptions o;
    o.c_tilde = 1e-3;
    const GoodLines g = find_good_lines(bd, W, o);
    if (g.found) {
        for (int j : {g.j_minus, g.j_zero, g.j_plus}) {
            CHECK(bd.weighted_row_sum(j) <= g.row_sum_bound);
            int ca = 0, cc = 0;
            for (int i = -30; i <= 30; ++i) {
                ca += bd.at(i, j) >= std::pow(30.0, -o.alpha);
                cc += bd.at(i, j) >= o.c_tilde;
            }
            CHECK(ca <= g.count_alpha_bound);
            CHECK(cc <= g.count_ctilde_bound);
        }
    }
}

TEST_CASE("analysis: deviation profile") {
    const ChainState t = twin_chain(10, W, 0);
    for (const ProfilePoint& p : deviation_profile(t, t)) CHECK(p.deviation == 0.0);
    CHECK_THROWS_AS(deviation_profile(t, twin_chain(11, W, 0)), std::invalid_argument);
}

TEST_CASE("analysis: exponential fits") {
    std::vector<ProfilePoint> exact, noisy;
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> U(-0.01, 0.01);
    for (int i = 0; i <= 30; ++i) {
        const double d = 0.3 * std::exp(-0.8 * i);
        exact.push_back({i, d});
        noisy.push_back({i, d * (1.0 + U(rng))});
    }
    const DecayFit f = fit_exponential(exact, {1, 30, 0});
    CHECK(std::abs(f.rate + 0.8) <= 1e-9);
    CHECK(std::abs(f.amplitude - 0.3) <= 1e-9);
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    const DecayFit g = fit_exponential(noisy, {1, 30, 0});
    CHECK(std::abs(g.rate + 0.8) <= 0.04);
    CHECK(g.r_squared >= 0.99);
    CHECK_THROWS_AS(fit_exponential(exact, {1, 4, 0}), std::invalid_argument);
    std::vector<ProfilePoint> zero = exact;
    zero[3].deviation = 0.0;
    CHECK_THROWS_AS(fit_exponential(zero, {1, 10, 0}), std::invalid_argument);

    // symmetric profile, both sides
    std::vector<ProfilePoint> sym;
    for (int i = -20; i <= 20; ++i) sym.push_back({i, 0.5 * std::exp(-0.4 * std::abs(i))});
    const auto [l, r] = fit_decay_sides(sym, 0, 1, 15);
    CHECK(std::abs(l.rate + 0.4) <= 1e-9);
    CHECK(std::abs(r.rate + 0.4) <= 1e-9);
}

TEST_CASE("analysis: profile export round trip") {
    std::vector<ProfilePoint> p;
    for (int i = -5; i <= 5; ++i) p.push_back({i, 1.0 / (3.0 + i * i)});
    const DecayFit f = fit_exponential(p, {0, 5, 0});
    std::stringstream ss;
    write_profile(ss, p, {f}, {{"config.test", "1"}});
    Header h;
    const std::vector<ProfilePoint> back = read_profile(ss, &h);
    REQUIRE(back.size() == p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        CHECK(back[k].i == p[k].i);
        CHECK(back[k].deviation == p[k].deviation);
    }
    REQUIRE(find_entry(h, "fit0.rate"));
    CHECK(parse_double(*find_entry(h, "fit0.rate")) == f.rate);
}
