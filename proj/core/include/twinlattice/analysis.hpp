#pragma once

#include "twinlattice/energy.hpp"
#include "twinlattice/lattice.hpp"
#include "twinlattice/table_io.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace twinlat {

struct CellClass {
    int well_id = 0;  // 0 -> SO(2)U0, 1 -> SO(2)U1
    double distance = 0.0;
    double other_distance = 0.0;
    double angle = 0.0;  // rotation bringing the well onto the (+,+) triangle gradient
    bool tie = false;
};

// Per-site nearest well. A site's distance is the maximum over the four triangles of its
// energy stencil.
struct WellClassification {
    LatticeGeometry geometry;
    std::vector<CellClass> cells;  // row-major, row j then column i

    const CellClass& at(int i, int j) const;
    // largest site distance in column i over all rows
    double column_distance(int i) const;
};

WellClassification classify(const LatticeField& field, const WellPair& wells);

inline constexpr double tie_tolerance = 1e-10;

struct InterfaceRecord {
    double x_s = 0.0;  // continuum coordinate of the gap center
    int left_well = 0;
    int right_well = 0;
    int width_in_atoms = 0;  // columns in the gap
    int first_column = 0;    // gap columns; for zero width first = last + 1
    int last_column = -1;
};

struct InterfaceReport {
    std::vector<InterfaceRecord> interfaces;
    int left_layer_width = 0;   // layer columns before the first single-well run
    int right_layer_width = 0;  // after the last run
    int runs = 0;               // maximal single-well runs
    // boundary layers plus internal interfaces
    int layer_count() const {
        return static_cast<int>(interfaces.size()) + (left_layer_width > 0) + (right_layer_width > 0);
    }
};

InterfaceReport interface_positions(const WellClassification& cls, double tol);

// Default threshold ((b^2 - a^2) / (100 (a^2 + b^2)))^4.
double default_c_tilde(const WellPair& wells);

struct GoodLineOptions {
    double alpha = 0.4;
    double delta = 0.1;
    double c_tilde = 0.0;  // <= 0 selects default_c_tilde
    double C = 1.0;
    double M_delta = 0.0;  // <= 0 selects 4 / delta
};

struct RowStats {
    int j = 0;
    double weighted_sum = 0.0;  // lambda_n-weighted row energy
    int count_alpha = 0;        // sites with local >= n^-alpha
    int count_ctilde = 0;       // sites with local >= c_tilde
    bool good1 = false;
    bool bp1 = false;
    bool bp2 = false;
    bool good() const { return good1 && bp1 && bp2; }
};

struct GoodLines {
    bool found = false;
    int j_minus = 0;
    int j_zero = 0;
    int j_plus = 0;
    std::vector<RowStats> chosen;  // stats of the three rows when found
    double row_sum_bound = 0.0;
    double count_alpha_bound = 0.0;
    double count_ctilde_bound = 0.0;
    double c_tilde = 0.0;
    // failure report
    std::string failed_condition;
    std::string message;
    std::vector<RowStats> best_candidates;  // lowest row energy per band
};

GoodLines find_good_lines(const EnergyBreakdown& bd, const WellPair& wells, const GoodLineOptions& opts = {});

struct ProfilePoint {
    int i = 0;
    double deviation = 0.0;
};

std::vector<ProfilePoint> deviation_profile(const ChainState& chain, const ChainState& reference);

struct FitWindow {
    int first = 0;   // inclusive column range
    int last = 0;
    int center = 0;  // decay coordinate is |i - center|
};

struct DecayFit {
    double rate = 0.0;  // per atom, in the coordinate |i - center|
    double amplitude = 0.0;
    double r_squared = 0.0;
    FitWindow window;
    std::vector<ProfilePoint> profile;  // points used
    double at(int i) const;
};

DecayFit fit_exponential(const std::vector<ProfilePoint>& profile, const FitWindow& window);

// fits on [center - outer, center - inner] and [center + inner, center + outer]
std::pair<DecayFit, DecayFit> fit_decay_sides(const std::vector<ProfilePoint>& profile, int center,
                                               int inner, int outer);

// |u^{i+1} - 2 u^i + u^{i-1}| / spacing: local distortion, unaffected by uniform strain
std::vector<ProfilePoint> curvature_profile(const ChainState& chain);

void write_profile(std::ostream& os, const std::vector<ProfilePoint>& profile,
                   const std::vector<DecayFit>& fits, const Header& extra = {});
std::vector<ProfilePoint> read_profile(std::istream& is, Header* header = nullptr);
void write_classification(std::ostream& os, const WellClassification& cls, const Header& extra = {});

}  // namespace twinlat
