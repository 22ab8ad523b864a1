#include "twinlattice/density.hpp"
#include "twinlattice/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twinlat {

long VariableLayout::index(int column, int component) const {
    if (column < first_free || column > last_free) return -1;
    if (component >= block) return -1;
    return static_cast<long>(column - first_free) * block + component;
}

struct ChainObjective::Columns {
    int first = 0;  // first stored column
    std::vector<double> theta;
    std::vector<Vec2> tau;
    std::vector<Vec2> bond;  // bond[k] joins column first+k to first+k+1, lattice units

    double th(int i) const { return theta[static_cast<std::size_t>(i - first)]; }
    const Vec2& t(int i) const { return tau[static_cast<std::size_t>(i - first)]; }
    const Vec2& b(int i) const { return bond[static_cast<std::size_t>(i - first)]; }
};

ChainObjective::ChainObjective(const ChainState& base, bool variable_tau) : base_(base) {
    const LatticeGeometry& g = base_.geometry();
    layout_.first_free = g.column_first + 1;
    layout_.last_free = g.column_last - 1;
    layout_.block = variable_tau ? 3 : 2;
    const double s = g.spacing;
    for (int k = base_.first_stored(); k < base_.last_stored(); ++k) {
        base_bonds_.push_back((base_.u(k + 1) - base_.u(k)) / s);
    }
}

ChainObjective::Columns ChainObjective::columns_at(const std::vector<double>& z) const {
    if (z.size() != size()) throw std::invalid_argument("ChainObjective: wrong variable count");
    Columns c;
    c.first = base_.first_stored();
    const int last = base_.last_stored();
    const std::size_t count = static_cast<std::size_t>(last - c.first + 1);
    std::vector<Vec2> disp(count, Vec2::Zero());
    c.theta.resize(count);
    c.tau.resize(count);
    for (int i = c.first; i <= last; ++i) {
        const std::size_t k = static_cast<std::size_t>(i - c.first);
        double th = base_.theta(i);
        const long ix = layout_.index(i, 0);
        if (ix >= 0) {
            disp[k] = Vec2(z[static_cast<std::size_t>(ix)], z[static_cast<std::size_t>(ix) + 1]);
            if (layout_.has_theta()) th += z[static_cast<std::size_t>(ix) + 2];
        }
        c.theta[k] = th;
        c.tau[k] = th == 0.0 ? base_.wells().tau : Vec2(rotation(th) * base_.wells().tau);
    }
    c.bond.resize(count - 1);
    for (std::size_t k = 0; k + 1 < count; ++k) c.bond[k] = base_bonds_[k] + (disp[k + 1] - disp[k]);
    return c;
}

ChainState ChainObjective::chain_at(const std::vector<double>& z) const {
    if (z.size() != size()) throw std::invalid_argument("ChainObjective: wrong variable count");
    ChainState out = base_;
    const double s = base_.geometry().spacing;
    for (int i = layout_.first_free; i <= layout_.last_free; ++i) {
        const std::size_t ix = static_cast<std::size_t>(layout_.index(i, 0));
        out.set_u(i, base_.u(i) + s * Vec2(z[ix], z[ix + 1]));
        if (layout_.has_theta()) out.set_theta(i, base_.theta(i) + z[ix + 2]);
    }
    return out;
}

// visit(i, j, stencil, multiplicity, row_uniform)
template <class Visit>
void ChainObjective::for_each_site(const Columns& c, bool need_theta, Visit&& visit) const {
    const LatticeGeometry& g = base_.geometry();
    for (int i = g.column_first; i <= g.column_last; ++i) {
        const Vec2 dp = c.b(i);
        const Vec2 dm = -c.b(i - 1);
        const Vec2& t = c.t(i);
        const Vec2& tp = c.t(i + 1);
        const Vec2& tm = c.t(i - 1);
        const bool uniform = !need_theta && c.th(i - 1) == c.th(i) && c.th(i + 1) == c.th(i);
        if (uniform) {
            visit(i, 0, Stencil{dp + t, dm - t, dp, dm}, static_cast<double>(g.rows()), true);
            continue;
        }
        for (int j = g.row_first; j <= g.row_last; ++j) {
            Stencil st;
            st.up = dp + (j + 1.0) * tp - j * t;
            st.down = dm + (j - 1.0) * tm - j * t;
            st.right = dp + j * (tp - t);
            st.left = dm + j * (tm - t);
            visit(i, j, st, 1.0, false);
        }
    }
}

double ChainObjective::value(const std::vector<double>& z) const {
    const Columns c = columns_at(z);
    const WellPair& w = base_.wells();
    CompensatedSum sum;
    for_each_site(c, false, [&](int, int, const Stencil& st, double mult, bool) {
        sum += mult * density(st, w.a, w.b);
    });
    return sum.value() / base_.geometry().n;
}

namespace {

using Jac = Eigen::Matrix<double, 8, 9>;

// d(stencil)/d(local variables); local order w^{i-1}, w^i, w^{i+1}, theta_{i-1}, theta_i, theta_{i+1}
Jac stencil_jacobian(int j, const Vec2& tm, const Vec2& t, const Vec2& tp, bool with_theta) {
    Jac J = Jac::Zero();
    const Mat2 I = Mat2::Identity();
    J.block<2, 2>(0, 4) = I;   // up: w^{i+1}
    J.block<2, 2>(0, 2) = -I;  // up: w^i
    J.block<2, 2>(2, 0) = I;   // down: w^{i-1}
    J.block<2, 2>(2, 2) = -I;
    J.block<2, 2>(4, 4) = I;   // right
    J.block<2, 2>(4, 2) = -I;
    J.block<2, 2>(6, 0) = I;   // left
    J.block<2, 2>(6, 2) = -I;
    if (with_theta) {
        const Vec2 pm = perp(tm), p0 = perp(t), pp = perp(tp);
        J.block<2, 1>(0, 8) = (j + 1.0) * pp;
        J.block<2, 1>(0, 7) = -j * p0;
        J.block<2, 1>(2, 6) = (j - 1.0) * pm;
        J.block<2, 1>(2, 7) = -j * p0;
        J.block<2, 1>(4, 8) = j * pp;
        J.block<2, 1>(4, 7) = -j * p0;
        J.block<2, 1>(6, 6) = j * pm;
        J.block<2, 1>(6, 7) = -j * p0;
    }
    return J;
}

// second derivatives of the stencil exist only on theta diagonals: d2 tau / dtheta2 = -tau
Eigen::Matrix3d theta_curvature(int j, const Vec2& tm, const Vec2& t, const Vec2& tp,
                                const Eigen::Matrix<double, 8, 1>& g) {
    const Vec2 gu = g.segment<2>(0), gd = g.segment<2>(2), gr = g.segment<2>(4), gl = g.segment<2>(6);
    Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
    C(0, 0) = -((j - 1.0) * gd.dot(tm) + j * gl.dot(tm));
    C(1, 1) = -(-j * gu.dot(t) - j * gd.dot(t) - j * gr.dot(t) - j * gl.dot(t));
    C(2, 2) = -((j + 1.0) * gu.dot(tp) + j * gr.dot(tp));
    return C;
}

}  // namespace

double ChainObjective::value_and_gradient(const std::vector<double>& z, std::vector<double>& grad) const {
    const Columns c = columns_at(z);
    const WellPair& w = base_.wells();
    const bool vt = layout_.has_theta();
    std::vector<CompensatedSum> acc(size());
    CompensatedSum sum;
    for_each_site(c, vt, [&](int i, int j, const Stencil& st, double mult, bool) {
        const DensityJet jet = density_jet(st, w.a, w.b);
        sum += mult * jet.value;
        const Jac J = stencil_jacobian(j, c.t(i - 1), c.t(i), c.t(i + 1), vt);
        const Eigen::Matrix<double, 9, 1> gl = mult * (J.transpose() * jet.gradient);
        for (int s = 0; s < 9; ++s) {
            const int col = i - 1 + (s < 6 ? s / 2 : s - 6);
            const long ix = s < 6 ? layout_.index(col, s % 2) : (vt ? layout_.index(col, 2) : -1);
            if (ix >= 0) acc[static_cast<std::size_t>(ix)] += gl(s);
        }
    });
    const double inv_n = 1.0 / base_.geometry().n;
    grad.resize(size());
    for (std::size_t k = 0; k < size(); ++k) grad[k] = acc[k].value() * inv_n;
    return sum.value() * inv_n;
}

BandedSymmetricMatrix ChainObjective::hessian(const std::vector<double>& z) const {
    const Columns c = columns_at(z);
    const WellPair& w = base_.wells();
    const bool vt = layout_.has_theta();
    BandedSymmetricMatrix H(size(), layout_.half_bandwidth());
    const double inv_n = 1.0 / base_.geometry().n;
    for_each_site(c, vt, [&](int i, int j, const Stencil& st, double mult, bool) {
        const DensityJet jet = density_jet(st, w.a, w.b);
        const Jac J = stencil_jacobian(j, c.t(i - 1), c.t(i), c.t(i + 1), vt);
        Eigen::Matrix<double, 9, 9> Hl = J.transpose() * jet.hessian * J;
        if (vt) Hl.block<3, 3>(6, 6) += theta_curvature(j, c.t(i - 1), c.t(i), c.t(i + 1), jet.gradient);
        Hl *= mult * inv_n;
        long ix[9];
        for (int s = 0; s < 9; ++s) {
            const int col = i - 1 + (s < 6 ? s / 2 : s - 6);
            ix[s] = s < 6 ? layout_.index(col, s % 2) : (vt ? layout_.index(col, 2) : -1);
        }
        for (int r = 0; r < 9; ++r) {
            if (ix[r] < 0) continue;
            for (int q = 0; q <= r; ++q) {
                if (ix[q] < 0) continue;
                // entries are symmetric; add() mirrors, so the diagonal is added once
                if (ix[q] == ix[r] && q != r) continue;
                H.add(static_cast<std::size_t>(ix[r]), static_cast<std::size_t>(ix[q]), Hl(r, q));
            }
        }
    });
    return H;
}

std::vector<double> gradient(const ChainState& chain, bool variable_tau) {
    ChainObjective obj(chain, variable_tau);
    std::vector<double> g;
    obj.value_and_gradient(std::vector<double>(obj.size(), 0.0), g);
    return g;
}

BandedSymmetricMatrix hessian(const ChainState& chain, bool variable_tau) {
    ChainObjective obj(chain, variable_tau);
    return obj.hessian(std::vector<double>(obj.size(), 0.0));
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace twinlat
