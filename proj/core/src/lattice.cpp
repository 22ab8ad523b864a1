#include "twinlattice/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twinlat {

LatticeGeometry LatticeGeometry::standard(int n) {
    if (n < 1) throw std::invalid_argument("LatticeGeometry: n must be positive");
    LatticeGeometry g;
    g.n = n;
    g.column_first = -n;
    g.column_last = n;
    g.row_first = -n;
    g.row_last = n;
    g.spacing = 1.0 / n;
    g.rescaled = false;
    return g;
}

LatticeGeometry LatticeGeometry::strip(int n, int column_first, int column_last) {
    if (n < 1) throw std::invalid_argument("LatticeGeometry: n must be positive");
    if (column_last - column_first < 2) {
        throw std::invalid_argument("LatticeGeometry: strip needs at least one free column");
    }
    LatticeGeometry g;
    g.n = n;
    g.column_first = column_first;
    g.column_last = column_last;
    g.row_first = -n;
    g.row_last = n;
    g.spacing = 1.0;
    g.rescaled = true;
    return g;
}

BoundaryData BoundaryData::affine(const BoundaryGradient& g) {
    BoundaryData bc;
    bc.kind = BoundaryKind::affine;
    bc.lambda = g.lambda;
    bc.left.gradient = g.F;
    bc.right.gradient = g.F;
    return bc;
}

BoundaryData BoundaryData::twin(const WellPair& w) {
    BoundaryData bc;
    bc.kind = BoundaryKind::twin;
    bc.lambda = 0.5;
    bc.left.gradient = w.U0;
    bc.right.gradient = w.QU1();
    return bc;
}

BoundaryData BoundaryData::custom(const ClampMap& left, const ClampMap& right) {
    BoundaryData bc;
    bc.kind = BoundaryKind::custom;
    bc.lambda = 0.0;
    bc.left = left;
    bc.right = right;
    return bc;
}

const char* to_string(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::affine: return "affine";
        case BoundaryKind::twin: return "twin";
        case BoundaryKind::custom: return "custom";
    }
    return "custom";
}

namespace {

// angle of G(-1,1) relative to tau; the clamp must keep the vertical step in SO(2) tau
double clamp_angle(const Mat2& G, const Vec2& tau) {
    const Vec2 v = G * Vec2(-1.0, 1.0);
    if (std::abs(v.norm() - tau.norm()) > 1e-10 * tau.norm()) {
        throw std::invalid_argument("clamp gradient does not map (-1,1) onto SO(2) tau");
    }
    const double t = std::atan2(cross(tau, v), tau.dot(v));
    return std::abs(t) < 1e-14 ? 0.0 : t;
}

}  // namespace

ChainState::ChainState(const LatticeGeometry& geometry, const WellPair& wells,
                       const BoundaryData& bc)
    : geometry_(geometry), wells_(wells), bc_(bc) {
    if (geometry_.n < 1 || !(geometry_.spacing > 0.0)) {
        throw std::invalid_argument("ChainState: invalid geometry");
    }
    if (geometry_.column_last - geometry_.column_first < 2) {
        throw std::invalid_argument("ChainState: need at least one free column");
    }
    if (geometry_.row_first > 0 || geometry_.row_last < 0) {
        throw std::invalid_argument("ChainState: row range must contain the generating row 0");
    }
    const std::size_t count = static_cast<std::size_t>(last_stored() - first_stored() + 1);
    u_.assign(count, Vec2::Zero());
    theta_.assign(count, 0.0);
    set_boundary(bc);
    for (int i = geometry_.column_first + 1; i < geometry_.column_last; ++i) {
        u_[slot(i)] = bc_.left.at(i * geometry_.spacing, 0.0);
        theta_[slot(i)] = left_theta_;
    }
}

std::size_t ChainState::slot(int i) const {
    if (i < first_stored() || i > last_stored()) {
        throw std::out_of_range("ChainState: column " + std::to_string(i) + " out of range");
    }
    return static_cast<std::size_t>(i - first_stored());
}

Vec2 ChainState::tau(int i) const {
    const double t = theta(i);
    if (t == 0.0) return wells_.tau;
    return rotation(t) * wells_.tau;
}

void ChainState::set_u(int i, const Vec2& v) {
    if (!is_free(i)) throw std::out_of_range("ChainState: column " + std::to_string(i) + " is clamped");
    u_[slot(i)] = v;
}

void ChainState::set_theta(int i, double t) {
    if (!is_free(i)) throw std::out_of_range("ChainState: column " + std::to_string(i) + " is clamped");
    theta_[slot(i)] = t;
}

void ChainState::set_boundary(const BoundaryData& bc) {
    left_theta_ = clamp_angle(bc.left.gradient, wells_.tau);
    right_theta_ = clamp_angle(bc.right.gradient, wells_.tau);
    bc_ = bc;
    apply_clamps();
}

void ChainState::apply_clamps() {
    const double s = geometry_.spacing;
    for (int i = first_stored(); i <= geometry_.column_first; ++i) {
        u_[slot(i)] = bc_.left.at(i * s, 0.0);
        theta_[slot(i)] = left_theta_;
    }
    for (int i = geometry_.column_last; i <= last_stored(); ++i) {
        u_[slot(i)] = bc_.right.at(i * s, 0.0);
        theta_[slot(i)] = right_theta_;
    }
}

bool ChainState::operator==(const ChainState& other) const {
    if (!(geometry_ == other.geometry_)) return false;
    if (u_.size() != other.u_.size()) return false;
    for (std::size_t k = 0; k < u_.size(); ++k) {
        if (u_[k] != other.u_[k] || theta_[k] != other.theta_[k]) return false;
    }
    return wells_.a == other.wells_.a && bc_.left.gradient == other.bc_.left.gradient &&
           bc_.left.offset == other.bc_.left.offset &&
           bc_.right.gradient == other.bc_.right.gradient &&
           bc_.right.offset == other.bc_.right.offset;
}

ChainState affine_chain(const LatticeGeometry& geometry, const WellPair& wells, const Mat2& G,
                        const Vec2& c) {
    ClampMap m{G, c};
    ChainState chain(geometry, wells, BoundaryData::custom(m, m));
    const double t = chain.theta(geometry.column_first);
    for (int i = geometry.column_first + 1; i < geometry.column_last; ++i) {
        chain.set_u(i, m.at(i * geometry.spacing, 0.0));
        chain.set_theta(i, t);
    }
    return chain;
}

bool LatticeField::contains(int p, int q) const {
    const int i = p + q;
    return i >= diag_first && i <= diag_last && q >= row_first && q <= row_last;
}

const Vec2& LatticeField::at_diag(int i, int j) const {
    if (i < diag_first || i > diag_last || j < row_first || j > row_last) {
        throw std::out_of_range("LatticeField: site out of range");
    }
    return positions[static_cast<std::size_t>(i - diag_first) * row_count() +
                     static_cast<std::size_t>(j - row_first)];
}

const Mat2& LatticeField::plus_gradient(int p, int q) const {
    const int i = p + q;
    if (i < diag_first || i >= diag_last || q < row_first || q >= row_last) {
        throw std::out_of_range("LatticeField: triangle out of range");
    }
    return gradients[static_cast<std::size_t>(i - diag_first) * (row_count() - 1) +
                     static_cast<std::size_t>(q - row_first)];
}

std::array<Mat2, 4> LatticeField::corner_gradients(int p, int q) const {
    const double s = geometry.spacing;
    const Vec2& x = at(p, q);
    const Vec2 right = (at(p + 1, q) - x) / s;
    const Vec2 left = (x - at(p - 1, q)) / s;
    const Vec2 up = (at(p, q + 1) - x) / s;
    const Vec2 down = (x - at(p, q - 1)) / s;
    std::array<Mat2, 4> g;
    g[0] << right, up;
    g[1] << left, up;
    g[2] << left, down;
    g[3] << right, down;
    return g;
}

const Vec2& LatticeField::delta(int i) const {
    if (i <= diag_first || i > diag_last) throw std::out_of_range("LatticeField: delta out of range");
    return deltas[static_cast<std::size_t>(i - diag_first - 1)];
}

LatticeField reconstruct(const ChainState& chain) {
    const LatticeGeometry& g = chain.geometry();
    LatticeField f;
    f.geometry = g;
    f.wells = chain.wells();
    f.diag_first = chain.first_stored();
    f.diag_last = chain.last_stored();
    f.row_first = g.row_first - 1;
    f.row_last = g.row_last + 1;
    const int nd = f.diag_count();
    const int nr = f.row_count();
    const double s = g.spacing;

    f.positions.resize(static_cast<std::size_t>(nd) * nr);
    for (int i = f.diag_first; i <= f.diag_last; ++i) {
        const Vec2 u = chain.u(i);
        const Vec2 t = chain.tau(i);
        for (int j = f.row_first; j <= f.row_last; ++j) {
            f.positions[static_cast<std::size_t>(i - f.diag_first) * nr +
                        static_cast<std::size_t>(j - f.row_first)] = u + (j * s) * t;
        }
    }

    f.gradients.resize(static_cast<std::size_t>(nd - 1) * (nr - 1));
    for (int i = f.diag_first; i < f.diag_last; ++i) {
        for (int j = f.row_first; j < f.row_last; ++j) {
            const int p = i - j;
            const Vec2& x = f.at(p, j);
            Mat2 G;
            G << (f.at(p + 1, j) - x) / s, (f.at(p, j + 1) - x) / s;
            f.gradients[static_cast<std::size_t>(i - f.diag_first) * (nr - 1) +
                        static_cast<std::size_t>(j - f.row_first)] = G;
        }
    }

    f.deltas.resize(static_cast<std::size_t>(nd - 1));
    for (int i = f.diag_first + 1; i <= f.diag_last; ++i) {
        f.deltas[static_cast<std::size_t>(i - f.diag_first - 1)] = chain.tau(i) - chain.tau(i - 1);
    }
    return f;
}

ChainState extract_chain(const LatticeField& field, const BoundaryData& bc) {
    ChainState chain(field.geometry, field.wells, bc);
    const Vec2& tau = field.wells.tau;
    const double s = field.geometry.spacing;
    for (int i = field.geometry.column_first + 1; i < field.geometry.column_last; ++i) {
        const Vec2& x0 = field.at_diag(i, 0);
        const Vec2 t = (field.at_diag(i, 1) - x0) / s;
        chain.set_u(i, x0);
        chain.set_theta(i, std::atan2(cross(tau, t), tau.dot(t)));
    }
    return chain;
}

std::vector<AdmissibilityViolation> check_admissible(const LatticeField& f) {
    std::vector<AdmissibilityViolation> out;
    const double s = f.geometry.spacing;
    const double scale = 1.0 / (s * s);
    for (int i = f.diag_first; i <= f.diag_last - 2; ++i) {
        for (int q = f.row_first; q < f.row_last; ++q) {
            const int p = i - q;
            // cell vertices counterclockwise
            const std::array<Vec2, 4> v = {f.at(p, q), f.at(p + 1, q), f.at(p + 1, q + 1),
                                           f.at(p, q + 1)};
            for (int c = 0; c < 4; ++c) {
                const Vec2& x = v[c];
                const Vec2& next = v[(c + 1) % 4];
                const Vec2& prev = v[(c + 3) % 4];
                const double det = cross(next - x, prev - x) * scale;
                if (det < -1e-12) out.push_back({p, q, c, det});
            }
        }
    }
    return out;
}

std::size_t count_violations(const ChainState& chain) {
    return check_admissible(reconstruct(chain)).size();
}

}  // namespace twinlat
