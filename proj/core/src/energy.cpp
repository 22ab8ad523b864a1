#include "twinlattice/energy.hpp"

#include <ostream>
#include <stdexcept>

namespace twinlat {

double EnergyBreakdown::at(int i, int j) const {
    if (i < geometry.column_first || i > geometry.column_last || j < geometry.row_first ||
        j > geometry.row_last) {
        throw std::out_of_range("EnergyBreakdown: site out of range");
    }
    return local[static_cast<std::size_t>(j - geometry.row_first) * columns() +
                 static_cast<std::size_t>(i - geometry.column_first)];
}

Stencil chain_stencil(const ChainState& chain, int i, int j) {
    const double s = chain.geometry().spacing;
    const Vec2 t = chain.tau(i);
    const Vec2 tp = chain.tau(i + 1);
    const Vec2 tm = chain.tau(i - 1);
    const Vec2 dp = (chain.u(i + 1) - chain.u(i)) / s;
    const Vec2 dm = (chain.u(i - 1) - chain.u(i)) / s;
    Stencil st;
    st.up = dp + (j + 1.0) * tp - j * t;
    st.down = dm + (j - 1.0) * tm - j * t;
    st.right = dp + j * (tp - t);
    st.left = dm + j * (tm - t);
    return st;
}

namespace {

void finish(EnergyBreakdown& bd) {
    const int nc = bd.columns();
    const int nr = bd.rows();
    bd.row_sums.assign(static_cast<std::size_t>(nr), 0.0);
    bd.col_sums.assign(static_cast<std::size_t>(nc), 0.0);
    CompensatedSum all;
    for (int r = 0; r < nr; ++r) {
        CompensatedSum row;
        for (int c = 0; c < nc; ++c) row += bd.local[static_cast<std::size_t>(r) * nc + c];
        bd.row_sums[static_cast<std::size_t>(r)] = row.value();
    }
    for (int c = 0; c < nc; ++c) {
        CompensatedSum col;
        for (int r = 0; r < nr; ++r) col += bd.local[static_cast<std::size_t>(r) * nc + c];
        bd.col_sums[static_cast<std::size_t>(c)] = col.value();
    }
    for (double h : bd.local) all += h;
    bd.sum = all.value();
    const double s = bd.geometry.spacing;
    bd.total = s * s * bd.sum;
    // on the standard domain rescaled is total / lambda_n; elsewhere sum / n
    const bool standard = !bd.geometry.rescaled && s == 1.0 / bd.geometry.n;
    bd.rescaled = standard ? bd.total / s : bd.sum / bd.geometry.n;
}

EnergyBreakdown empty_breakdown(const LatticeGeometry& g, double a, double lambda) {
    EnergyBreakdown bd;
    bd.geometry = g;
    bd.a = a;
    bd.lambda = lambda;
    bd.local.assign(static_cast<std::size_t>(g.rows()) * g.columns(), 0.0);
    return bd;
}

}  // namespace

EnergyBreakdown lattice_energy(const LatticeField& f) {
    const LatticeGeometry& g = f.geometry;
    EnergyBreakdown bd = empty_breakdown(g, f.wells.a, 0.0);
    const double s = g.spacing;
    const int nc = g.columns();
    for (int j = g.row_first; j <= g.row_last; ++j) {
        for (int i = g.column_first; i <= g.column_last; ++i) {
            const int p = i - j;
            const Vec2& x = f.at(p, j);
            Stencil st;
            st.up = (f.at(p, j + 1) - x) / s;
            st.down = (f.at(p, j - 1) - x) / s;
            st.right = (f.at(p + 1, j) - x) / s;
            st.left = (f.at(p - 1, j) - x) / s;
            bd.local[static_cast<std::size_t>(j - g.row_first) * nc + (i - g.column_first)] =
                density(st, f.wells);
        }
    }
    finish(bd);
    return bd;
}

namespace {

// true when tau is constant across i-1, i, i+1, so the site energy does not depend on j
bool row_independent(const ChainState& chain, int i) {
    const double t = chain.theta(i);
    return chain.theta(i - 1) == t && chain.theta(i + 1) == t;
}

Stencil uniform_stencil(const ChainState& chain, int i) {
    const double s = chain.geometry().spacing;
    const Vec2 t = chain.tau(i);
    const Vec2 dp = (chain.u(i + 1) - chain.u(i)) / s;
    const Vec2 dm = (chain.u(i - 1) - chain.u(i)) / s;
    return Stencil{dp + t, dm - t, dp, dm};
}

}  // namespace

EnergyBreakdown chain_energy(const ChainState& chain) {
    const LatticeGeometry& g = chain.geometry();
    EnergyBreakdown bd = empty_breakdown(g, chain.wells().a, chain.boundary().lambda);
    const int nc = g.columns();
    for (int i = g.column_first; i <= g.column_last; ++i) {
        const std::size_t c = static_cast<std::size_t>(i - g.column_first);
        if (row_independent(chain, i)) {
            const double h = density(uniform_stencil(chain, i), chain.wells());
            for (int r = 0; r < g.rows(); ++r) bd.local[static_cast<std::size_t>(r) * nc + c] = h;
        } else {
            for (int j = g.row_first; j <= g.row_last; ++j) {
                bd.local[static_cast<std::size_t>(j - g.row_first) * nc + c] =
                    density(chain_stencil(chain, i, j), chain.wells());
            }
        }
    }
    finish(bd);
    return bd;
}

double rescaled_energy(const ChainState& chain) {
    const LatticeGeometry& g = chain.geometry();
    CompensatedSum sum;
    for (int i = g.column_first; i <= g.column_last; ++i) {
        if (row_independent(chain, i)) {
            sum += g.rows() * density(uniform_stencil(chain, i), chain.wells());
        } else {
            for (int j = g.row_first; j <= g.row_last; ++j) {
                sum += density(chain_stencil(chain, i, j), chain.wells());
            }
        }
    }
    return sum.value() / g.n;
}

Census local_energy_threshold_census(const EnergyBreakdown& bd, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("census: threshold must be positive");
    Census c;
    c.threshold = threshold;
    const LatticeGeometry& g = bd.geometry;
    for (int j = g.row_first; j <= g.row_last; ++j) {
        for (int i = g.column_first; i <= g.column_last; ++i) {
            if (bd.at(i, j) >= threshold) c.sites.emplace_back(i, j);
        }
        if (bd.weighted_row_sum(j) >= threshold) c.rows.push_back(j);
    }
    return c;
}

void write_breakdown(std::ostream& os, const EnergyBreakdown& bd, const Header& extra) {
    const LatticeGeometry& g = bd.geometry;
    write_header(os, extra);
    write_header(os, {{"n", std::to_string(g.n)},
                      {"a", fmt17(bd.a)},
                      {"lambda", fmt17(bd.lambda)},
                      {"total", fmt17(bd.total)},
                      {"rescaled", fmt17(bd.rescaled)}});
    os << "j";
    for (int i = g.column_first; i <= g.column_last; ++i) os << ",i=" << i;
    os << '\n';
    for (int j = g.row_first; j <= g.row_last; ++j) {
        os << j;
        for (int i = g.column_first; i <= g.column_last; ++i) os << ',' << fmt17(bd.at(i, j));
        os << '\n';
    }
    os << "summary,n,a,lambda,total,rescaled\n";
    os << "summary," << g.n << ',' << fmt17(bd.a) << ',' << fmt17(bd.lambda) << ','
       << fmt17(bd.total) << ',' << fmt17(bd.rescaled) << '\n';
}

}  // namespace twinlat
