#pragma once

#include "twinlattice/linalg.hpp"
#include "twinlattice/wells.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace twinlat {

// Index window of a constrained lattice. Columns (diagonals i) run from column_first to
// column_last, both ends clamped; rows j from row_first to row_last. The rescaled energy
// is sum(h) / n.
struct LatticeGeometry {
    int n = 1;
    int column_first = -1;
    int column_last = 1;
    int row_first = -1;
    int row_last = 1;
    double spacing = 1.0;
    bool rescaled = false;

    // Omega_n: columns and rows in [-n, n], spacing 1/n
    static LatticeGeometry standard(int n);
    // rescaled strip: spacing 1, rows [-n, n], arbitrary columns
    static LatticeGeometry strip(int n, int column_first, int column_last);

    double lambda_n() const { return spacing; }
    int columns() const { return column_last - column_first + 1; }
    int rows() const { return row_last - row_first + 1; }
    bool operator==(const LatticeGeometry&) const = default;
};

// Affine clamp u(x) = gradient x + offset, x in continuum coordinates.
struct ClampMap {
    Mat2 gradient = Mat2::Identity();
    Vec2 offset = Vec2::Zero();

    Vec2 at(double x, double y) const { return gradient * Vec2(x, y) + offset; }
};

enum class BoundaryKind { affine, twin, custom };

struct BoundaryData {
    BoundaryKind kind = BoundaryKind::custom;
    double lambda = 0.0;  // meaningful for affine data
    ClampMap left;
    ClampMap right;

    static BoundaryData affine(const BoundaryGradient& g);
    // U0 left, Q U1 right, continuous at x = 0
    static BoundaryData twin(const WellPair& w);
    static BoundaryData custom(const ClampMap& left, const ClampMap& right);
};

const char* to_string(BoundaryKind k);

// Generating chain u^i plus angles theta_i with tau^i = R(theta_i) tau. Columns at or beyond
// the clamped ends, including two ghost columns per side, always hold clamp values.
class ChainState {
public:
    static constexpr int ghost_columns = 2;

    ChainState(const LatticeGeometry& geometry, const WellPair& wells, const BoundaryData& bc);

    const LatticeGeometry& geometry() const { return geometry_; }
    const WellPair& wells() const { return wells_; }
    const BoundaryData& boundary() const { return bc_; }

    int first_stored() const { return geometry_.column_first - ghost_columns; }
    int last_stored() const { return geometry_.column_last + ghost_columns; }
    bool is_free(int i) const { return i > geometry_.column_first && i < geometry_.column_last; }
    int free_columns() const { return geometry_.columns() - 2; }

    const Vec2& u(int i) const { return u_[slot(i)]; }
    double theta(int i) const { return theta_[slot(i)]; }
    Vec2 tau(int i) const;

    // only free columns may be modified
    void set_u(int i, const Vec2& v);
    void set_theta(int i, double t);
    void set_boundary(const BoundaryData& bc);

    bool operator==(const ChainState& other) const;

private:
    std::size_t slot(int i) const;
    void apply_clamps();

    LatticeGeometry geometry_;
    WellPair wells_;
    BoundaryData bc_;
    double left_theta_ = 0.0;
    double right_theta_ = 0.0;
    std::vector<Vec2> u_;
    std::vector<double> theta_;
};

// Chain with every column on the affine map G x + c (G must map (-1,1) into SO(2) tau).
ChainState affine_chain(const LatticeGeometry& geometry, const WellPair& wells, const Mat2& G,
                        const Vec2& c = Vec2::Zero());

// Reconstructed lattice u^{i-j,j} = u^i + j lambda_n tau^i, stored by diagonal i and row j.
struct LatticeField {
    LatticeGeometry geometry;
    WellPair wells;
    int diag_first = 0;
    int diag_last = 0;
    int row_first = 0;
    int row_last = 0;
    std::vector<Vec2> positions;  // diagonal-major
    std::vector<Mat2> gradients;  // "+" triangle at each diagonal < diag_last and row < row_last
    std::vector<Vec2> deltas;     // delta^i = tau^i - tau^{i-1}, i in (diag_first, diag_last]

    int diag_count() const { return diag_last - diag_first + 1; }
    int row_count() const { return row_last - row_first + 1; }
    bool contains(int p, int q) const;

    // sheared key: column p = i - j, row q = j
    const Vec2& at(int p, int q) const { return at_diag(p + q, q); }
    const Vec2& at_diag(int i, int j) const;
    // gradient on the triangle (p,q), (p+1,q), (p,q+1)
    const Mat2& plus_gradient(int p, int q) const;
    // the four triangles of the energy stencil at (p,q): corners (+,+), (-,+), (-,-), (+,-)
    std::array<Mat2, 4> corner_gradients(int p, int q) const;
    const Vec2& delta(int i) const;
};

LatticeField reconstruct(const ChainState& chain);

// Inverse of reconstruct: reads row 0 and the row-0 to row-1 step. Boundary data are taken
// from the supplied template chain.
ChainState extract_chain(const LatticeField& field, const BoundaryData& bc);

struct AdmissibilityViolation {
    int p = 0;  // lower-left corner of the unit cell, sheared coordinates
    int q = 0;
    int corner = 0;  // 0..3 counterclockwise from (p,q); triangle = that vertex and its two cell neighbors
    double det = 0.0;  // orientation determinant of the difference quotients
};

std::vector<AdmissibilityViolation> check_admissible(const LatticeField& field);
std::size_t count_violations(const ChainState& chain);

}  // namespace twinlat
