#pragma once

#include "twinlattice/density.hpp"
#include "twinlattice/lattice.hpp"
#include "twinlattice/table_io.hpp"

#include <iosfwd>
#include <vector>

namespace twinlat {

// Per-site energies over columns [column_first, column_last] and rows [row_first, row_last].
// total = spacing^2 * sum(local); rescaled = sum(local) / n, which equals total / lambda_n on
// the standard domain.
struct EnergyBreakdown {
    LatticeGeometry geometry;
    double a = 0.0;
    double lambda = 0.0;
    std::vector<double> local;     // row-major, row j then column i
    std::vector<double> row_sums;  // unweighted sum over i, per row
    std::vector<double> col_sums;  // unweighted sum over j, per column
    double sum = 0.0;
    double total = 0.0;
    double rescaled = 0.0;

    int columns() const { return geometry.columns(); }
    int rows() const { return geometry.rows(); }
    double at(int i, int j) const;
    double row_sum(int j) const { return row_sums[static_cast<std::size_t>(j - geometry.row_first)]; }
    double col_sum(int i) const { return col_sums[static_cast<std::size_t>(i - geometry.column_first)]; }
    // lambda_n-weighted row energy, the per-line quantity of the rigidity argument
    double weighted_row_sum(int j) const { return row_sum(j) / geometry.n; }
};

// Stencil of site (i, j) in chain variables, without building the lattice.
Stencil chain_stencil(const ChainState& chain, int i, int j);

EnergyBreakdown lattice_energy(const LatticeField& field);
EnergyBreakdown chain_energy(const ChainState& chain);

// sum(local) / n only, no per-site storage
double rescaled_energy(const ChainState& chain);

struct Census {
    double threshold = 0.0;
    std::vector<std::pair<int, int>> sites;  // (i, j) with local >= threshold
    std::vector<int> rows;                   // rows with weighted row sum >= threshold
    std::size_t site_count() const { return sites.size(); }
    std::size_t row_count() const { return rows.size(); }
};

Census local_energy_threshold_census(const EnergyBreakdown& bd, double threshold);

// matrix of local(i, j) (one line per row j) followed by a summary record
void write_breakdown(std::ostream& os, const EnergyBreakdown& bd, const Header& extra = {});

}  // namespace twinlat
