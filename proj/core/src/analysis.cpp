#include "twinlattice/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace twinlat {

const CellClass& WellClassification::at(int i, int j) const {
    if (i < geometry.column_first || i > geometry.column_last || j < geometry.row_first ||
        j > geometry.row_last) {
        throw std::out_of_range("WellClassification: site out of range");
    }
    return cells[static_cast<std::size_t>(j - geometry.row_first) * geometry.columns() +
                 static_cast<std::size_t>(i - geometry.column_first)];
}

double WellClassification::column_distance(int i) const {
    double d = 0.0;
    for (int j = geometry.row_first; j <= geometry.row_last; ++j) d = std::max(d, at(i, j).distance);
    return d;
}

WellClassification classify(const LatticeField& field, const WellPair& wells) {
    WellClassification cls;
    cls.geometry = field.geometry;
    const LatticeGeometry& g = field.geometry;
    cls.cells.reserve(static_cast<std::size_t>(g.rows()) * g.columns());
    for (int j = g.row_first; j <= g.row_last; ++j) {
        for (int i = g.column_first; i <= g.column_last; ++i) {
            const auto corners = field.corner_gradients(i - j, j);
            double d[2] = {0.0, 0.0};
            for (const Mat2& G : corners) {
                d[0] = std::max(d[0], dist_to_well(G, wells.U0).distance);
                d[1] = std::max(d[1], dist_to_well(G, wells.U1).distance);
            }
            CellClass c;
            c.tie = std::abs(d[0] - d[1]) <= tie_tolerance;
            c.well_id = (c.tie || d[0] <= d[1]) ? 0 : 1;
            c.distance = d[c.well_id];
            c.other_distance = d[1 - c.well_id];
            c.angle = dist_to_well(corners[0], wells.well(c.well_id)).angle;
            cls.cells.push_back(c);
        }
    }
    return cls;
}

InterfaceReport interface_positions(const WellClassification& cls, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("interface_positions: tol must be positive");
    const LatticeGeometry& g = cls.geometry;
    // -1 marks a layer column
    std::vector<int> state;
    for (int i = g.column_first; i <= g.column_last; ++i) {
        int w = cls.at(i, g.row_first).well_id;
        for (int j = g.row_first; j <= g.row_last && w >= 0; ++j) {
            const CellClass& c = cls.at(i, j);
            if (c.distance > tol || c.well_id != w) w = -1;
        }
        state.push_back(w);
    }

    struct Run {
        int first, last, well;
    };
    std::vector<Run> runs;
    for (int k = 0; k < static_cast<int>(state.size()); ++k) {
        if (state[k] < 0) continue;
        if (!runs.empty() && runs.back().last == k - 1 && runs.back().well == state[k]) {
            runs.back().last = k;
        } else {
            runs.push_back({k, k, state[k]});
        }
    }

    InterfaceReport rep;
    rep.runs = static_cast<int>(runs.size());
    if (runs.empty()) {
        rep.left_layer_width = static_cast<int>(state.size());
        return rep;
    }
    rep.left_layer_width = runs.front().first;
    rep.right_layer_width = static_cast<int>(state.size()) - 1 - runs.back().last;
    for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
        InterfaceRecord rec;
        rec.left_well = runs[r].well;
        rec.right_well = runs[r + 1].well;
        rec.first_column = g.column_first + runs[r].last + 1;
        rec.last_column = g.column_first + runs[r + 1].first - 1;
        rec.width_in_atoms = rec.last_column - rec.first_column + 1;
        rec.x_s = 0.5 * (rec.first_column + rec.last_column) * g.spacing;
        rep.interfaces.push_back(rec);
    }
    return rep;
}

double default_c_tilde(const WellPair& w) {
    const double a2 = w.a * w.a, b2 = w.b * w.b;
    return std::pow((b2 - a2) / (100.0 * (a2 + b2)), 4);
}

namespace {

RowStats row_stats(const EnergyBreakdown& bd, int j, double t_alpha, double c_tilde, double sum_bound,
                   double alpha_bound, double ctilde_bound) {
    RowStats r;
    r.j = j;
    r.weighted_sum = bd.weighted_row_sum(j);
    for (int i = bd.geometry.column_first; i <= bd.geometry.column_last; ++i) {
        const double h = bd.at(i, j);
        if (h >= t_alpha) ++r.count_alpha;
        if (h >= c_tilde) ++r.count_ctilde;
    }
    r.good1 = r.weighted_sum <= sum_bound;
    r.bp1 = r.count_alpha <= alpha_bound;
    r.bp2 = r.count_ctilde <= ctilde_bound;
    return r;
}

}  // namespace

GoodLines find_good_lines(const EnergyBreakdown& bd, const WellPair& wells, const GoodLineOptions& o) {
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw std::invalid_argument("find_good_lines: alpha must lie in (0,1)");
    if (!(o.delta > 0.0 && o.delta < 0.25)) throw std::invalid_argument("find_good_lines: delta must lie in (0,1/4)");
    const int n = bd.geometry.n;
    const double nd = n;
    GoodLines out;
    out.c_tilde = o.c_tilde > 0.0 ? o.c_tilde : default_c_tilde(wells);
    const double t_alpha = std::pow(nd, -o.alpha);
    out.row_sum_bound = o.C * t_alpha;
    out.count_alpha_bound = o.C / o.delta * std::pow(nd, o.alpha);
    out.count_ctilde_bound = o.M_delta > 0.0 ? o.M_delta : 4.0 / o.delta;

    const int lo_m = std::max(-n, bd.geometry.row_first);
    const int hi_m = static_cast<int>(std::floor(-nd + 2.0 * o.delta * nd));
    const int lo_0 = static_cast<int>(std::ceil(-o.delta * nd));
    const int hi_0 = static_cast<int>(std::floor(o.delta * nd));
    const int lo_p = static_cast<int>(std::ceil(nd - 2.0 * o.delta * nd));
    const int hi_p = std::min(n, bd.geometry.row_last);

    std::vector<RowStats> stats;
    for (int j = bd.geometry.row_first; j <= bd.geometry.row_last; ++j) {
        stats.push_back(row_stats(bd, j, t_alpha, out.c_tilde, out.row_sum_bound, out.count_alpha_bound,
                                  out.count_ctilde_bound));
    }
    auto st = [&](int j) -> const RowStats& { return stats[static_cast<std::size_t>(j - bd.geometry.row_first)]; };

    // j0 from the center outward, spacing closest to the band centers
    const double d_center = nd - o.delta * nd;
    std::vector<int> centers;
    for (int k = 0; k <= std::max(-lo_0, hi_0); ++k) {
        if (k <= hi_0) centers.push_back(k);
        if (k > 0 && -k >= lo_0) centers.push_back(-k);
    }
    for (int j0 : centers) {
        if (out.found) break;
        if (!st(j0).good()) continue;
        const int d_lo = std::max(j0 - hi_m, lo_p - j0);
        const int d_hi = std::min(j0 - lo_m, hi_p - j0);
        std::vector<int> ds;
        for (int d = d_lo; d <= d_hi; ++d) ds.push_back(d);
        std::stable_sort(ds.begin(), ds.end(),
                         [&](int x, int y) { return std::abs(x - d_center) < std::abs(y - d_center); });
        for (int d : ds) {
            if (st(j0 - d).good() && st(j0 + d).good()) {
                out.found = true;
                out.j_minus = j0 - d;
                out.j_zero = j0;
                out.j_plus = j0 + d;
                break;
            }
        }
    }

    if (out.found) {
        for (int j : {out.j_minus, out.j_zero, out.j_plus}) {
            const RowStats r = row_stats(bd, j, t_alpha, out.c_tilde, out.row_sum_bound,
                                         out.count_alpha_bound, out.count_ctilde_bound);
            if (!r.good()) throw std::logic_error("find_good_lines: post-verification failed");
            out.chosen.push_back(r);
        }
        return out;
    }

    // failure report: first condition that no row of some band satisfies
    const std::pair<int, int> bands[3] = {{lo_m, hi_m}, {lo_0, hi_0}, {lo_p, hi_p}};
    const char* names[3] = {"j_minus", "j_zero", "j_plus"};
    for (int b = 0; b < 3; ++b) {
        int n1 = 0, n2 = 0, n3 = 0, nall = 0;
        const RowStats* best = nullptr;
        for (int j = bands[b].first; j <= bands[b].second; ++j) {
            const RowStats& r = st(j);
            n1 += r.good1;
            n2 += r.bp1;
            n3 += r.bp2;
            nall += r.good();
            if (!best || r.weighted_sum < best->weighted_sum) best = &r;
        }
        if (best) out.best_candidates.push_back(*best);
        if (out.failed_condition.empty() && nall == 0) {
            out.failed_condition = n1 == 0 ? "good1" : n2 == 0 ? "BP1" : n3 == 0 ? "BP2" : "combined";
            out.message = std::string("no row in band ") + names[b] + " satisfies " + out.failed_condition;
        }
    }
    if (out.failed_condition.empty()) {
        out.failed_condition = "spacing";
        out.message = "good rows exist in every band but no equally spaced triple";
    }
    return out;
}

std::vector<ProfilePoint> deviation_profile(const ChainState& chain, const ChainState& reference) {
    const LatticeGeometry& g = chain.geometry();
    const LatticeGeometry& r = reference.geometry();
    if (g.n != r.n || g.column_first != r.column_first || g.column_last != r.column_last) {
        throw std::invalid_argument("deviation_profile: chains have different n or column range");
    }
    std::vector<ProfilePoint> out;
    for (int i = g.column_first; i <= g.column_last; ++i) {
        out.push_back({i, (chain.u(i) - reference.u(i)).norm()});
    }
    return out;
}

double DecayFit::at(int i) const { return amplitude * std::exp(rate * std::abs(i - window.center)); }

DecayFit fit_exponential(const std::vector<ProfilePoint>& profile, const FitWindow& window) {
    DecayFit fit;
    fit.window = window;
    for (const ProfilePoint& p : profile) {
        if (p.i < window.first || p.i > window.last) continue;
        if (!(p.deviation > 0.0)) {
            throw std::invalid_argument("fit_exponential: nonpositive deviation at i = " + std::to_string(p.i));
        }
        fit.profile.push_back(p);
    }
    const std::size_t m = fit.profile.size();
    if (m < 5) throw std::invalid_argument("fit_exponential: fewer than 5 points in window");
    double sx = 0, sy = 0;
    for (const ProfilePoint& p : fit.profile) {
        sx += std::abs(p.i - window.center);
        sy += std::log(p.deviation);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (const ProfilePoint& p : fit.profile) {
        const double dx = std::abs(p.i - window.center) - mx;
        const double dy = std::log(p.deviation) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_exponential: window has a single abscissa");
    fit.rate = sxy / sxx;
    const double intercept = my - fit.rate * mx;
    fit.amplitude = std::exp(intercept);
    double ss_res = 0.0;
    for (const ProfilePoint& p : fit.profile) {
        const double r = std::log(p.deviation) - (intercept + fit.rate * std::abs(p.i - window.center));
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

std::pair<DecayFit, DecayFit> fit_decay_sides(const std::vector<ProfilePoint>& profile, int center, int inner,
                                               int outer) {
    if (inner < 0 || outer < inner) throw std::invalid_argument("fit_decay_sides: need 0 <= inner <= outer");
    return {fit_exponential(profile, {center - outer, center - inner, center}),
            fit_exponential(profile, {center + inner, center + outer, center})};
}

std::vector<ProfilePoint> curvature_profile(const ChainState& chain) {
    const LatticeGeometry& g = chain.geometry();
    std::vector<ProfilePoint> out;
    for (int i = g.column_first; i <= g.column_last; ++i) {
        out.push_back({i, (chain.u(i + 1) - 2.0 * chain.u(i) + chain.u(i - 1)).norm() / g.spacing});
    }
    return out;
}

void write_profile(std::ostream& os, const std::vector<ProfilePoint>& profile, const std::vector<DecayFit>& fits,
                   const Header& extra) {
    write_header(os, extra);
    Header h;
    for (std::size_t k = 0; k < fits.size(); ++k) {
        const DecayFit& f = fits[k];
        const std::string p = "fit" + std::to_string(k) + ".";
        h.emplace_back(p + "window", std::to_string(f.window.first) + " " + std::to_string(f.window.last));
        h.emplace_back(p + "center", std::to_string(f.window.center));
        h.emplace_back(p + "rate", fmt17(f.rate));
        h.emplace_back(p + "amplitude", fmt17(f.amplitude));
        h.emplace_back(p + "r_squared", fmt17(f.r_squared));
    }
    write_header(os, h);
    os << "i,deviation,log_deviation,fitted_value\n";
    for (const ProfilePoint& p : profile) {
        os << p.i << ',' << fmt17(p.deviation) << ',';
        if (p.deviation > 0.0) os << fmt17(std::log(p.deviation));
        os << ',';
        for (const DecayFit& f : fits) {
            if (p.i >= f.window.first && p.i <= f.window.last) {
                os << fmt17(f.at(p.i));
                break;
            }
        }
        os << '\n';
    }
}

std::vector<ProfilePoint> read_profile(std::istream& is, Header* header) {
    Header h = read_header(is);
    if (header) *header = h;
    std::string line;
    std::getline(is, line);
    const auto cols = split_csv_line(line);
    if (cols.size() < 2 || cols[0] != "i") throw std::invalid_argument("profile: missing column header");
    std::vector<ProfilePoint> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() < 2) throw std::invalid_argument("profile: malformed record '" + line + "'");
        out.push_back({parse_int(f[0]), parse_double(f[1])});
    }
    return out;
}

void write_classification(std::ostream& os, const WellClassification& cls, const Header& extra) {
    const LatticeGeometry& g = cls.geometry;
    write_header(os, extra);
    os << "j";
    for (int i = g.column_first; i <= g.column_last; ++i) os << ",i=" << i;
    os << '\n';
    for (int j = g.row_first; j <= g.row_last; ++j) {
        os << j;
        for (int i = g.column_first; i <= g.column_last; ++i) os << ',' << cls.at(i, j).well_id;
        os << '\n';
    }
}

}  // namespace twinlat
