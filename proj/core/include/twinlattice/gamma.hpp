#pragma once

#include "twinlattice/lattice.hpp"
#include "twinlattice/minimize.hpp"
#include "twinlattice/table_io.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace twinlat {

// ---- averaging ----------------------------------------------------------------------------

// H1_{n,m} averages the 2m rows j in [-m, m-1] with weight 1/m; candidate strips are the
// disjoint 2m-row windows starting at row -n + 2km.
struct AveragingResult {
    explicit AveragingResult(ChainState t) : translated(std::move(t)) {}

    int k = 0;
    int row_offset = 0;  // original row that becomes row 0
    ChainState translated;
    double h1_nm = 0.0;           // from strip sums of the input
    double h1_nm_direct = 0.0;    // energy of the translated chain
    double h1_nn = 0.0;
    double epsilon = 0.0;
    std::vector<double> strip_values;
    bool verified = false;  // h1_nm_direct <= h1_nn + epsilon
};

AveragingResult average_down(const ChainState& chain, int m, double epsilon);

// ---- cutting ------------------------------------------------------------------------------

enum class Side { left, right, both };

struct CutResult {
    explicit CutResult(ChainState c) : chain(std::move(c)) {}

    ChainState chain;
    std::optional<int> cut_left;
    std::optional<int> cut_right;
    double distance_left = 0.0;
    double distance_right = 0.0;
    double energy_in = 0.0;   // H1
    double energy_out = 0.0;
    double w = 0.0;           // energy_out - energy_in
    std::size_t violations_in = 0;
    std::size_t violations_out = 0;
};

// Replaces the chain beyond a near-well column r (within n^alpha of the boundary) by the
// unrotated well map glued continuously at r. Throws if no column is within C n^{-alpha/4}.
CutResult cut_and_extend(const ChainState& chain, Side side, double alpha, double C = 1.0);

// ---- layer energies -----------------------------------------------------------------------

enum class LayerKind { B_plus, B_minus, C };
const char* to_string(LayerKind k);

// B_plus: F clamps column 0 (and the ghosts left of it), V_right x + r* holds for i >= L.
// B_minus: V_left x + r* holds for i <= -L, F clamps column 0 and the ghosts right of it.
// C: V_left x for i <= -L, V_right x + r* for i >= L.
struct LayerSpec {
    LayerKind kind = LayerKind::C;
    Mat2 V_left = Mat2::Identity();
    Mat2 V_right = Mat2::Identity();
    Vec2 r_star = Vec2::Zero();
    int L = 0;  // 0 selects L_factor * n
    int n = 10;
};

struct LayerOptions {
    MinimizeOptions minimize = [] {
        MinimizeOptions o;
        o.variable_tau = true;
        o.grad_tol = 1e-9;
        o.max_iters = 200;
        return o;
    }();
    std::vector<int> n_values;  // empty selects {spec.n}
    int L_factor = 3;
    bool search_offset = true;
    double offset_step = 0.25;  // initial simplex size, lattice units
    double offset_tol = 1e-6;
    int max_offset_evals = 60;
    double tail_tol = 1e-8;
    int max_L_doublings = 2;
    double stabilization_tol = 0.02;
};

LatticeGeometry layer_geometry(const LayerSpec& spec, int n, int L);
BoundaryData layer_boundary(const LayerSpec& spec, const Vec2& r_star);
// piecewise affine start glued where the prescribed offset is best matched, remaining
// mismatch spread linearly over the strip
ChainState layer_initial_chain(const LayerSpec& spec, const WellPair& wells, int n, int L, const Vec2& r_star);

struct LayerSample {
    int n = 0;
    int L = 0;
    double estimate = 0.0;
    Vec2 r_star = Vec2::Zero();
    bool converged = false;
    double tail_energy = 0.0;
    int evaluations = 0;
};

struct LayerEnergyEstimate {
    LayerSpec spec;
    double value = 0.0;
    std::vector<LayerSample> n_sequence;
    std::vector<Vec2> offsets_tried;
    std::vector<double> best_so_far;  // running minimum over the offset search (all n)
    bool converged_flag = false;
    bool stabilized = false;
    double stabilization_gap = 0.0;  // relative change between the two largest n
    Vec2 best_offset = Vec2::Zero();
    std::optional<ChainState> best_chain;
};

// single solve at fixed n, L, r*; returns the minimization report
MinimizationReport solve_layer(const LayerSpec& spec, const WellPair& wells, int n, int L, const Vec2& r_star,
                               const MinimizeOptions& opts, const ChainState* warm = nullptr);

LayerEnergyEstimate estimate_layer(const LayerSpec& spec, const WellPair& wells, const LayerOptions& opts = {});

struct EKResult {
    double value = 0.0;
    std::vector<LayerEnergyEstimate> terms;  // B+, C..., B-
    bool converged = false;
};

// V_sequence = [F, V_1, ..., V_{K-1}, F]
EKResult estimate_EK(const std::vector<Mat2>& V_sequence, const WellPair& wells, const LayerOptions& opts = {});

std::string matrix_label(const Mat2& V, const WellPair& wells, const Mat2* F = nullptr);

// kind, V_left, V_right, r*, n, estimate, stabilization gap
void write_layer_table(std::ostream& os, const std::vector<LayerEnergyEstimate>& rows, const WellPair& wells,
                       const Mat2* F = nullptr, const Header& extra = {});

}  // namespace twinlat
