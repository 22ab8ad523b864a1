#include "twinlattice/gamma.hpp"

#include "twinlattice/analysis.hpp"
#include "twinlattice/energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace twinlat {

AveragingResult average_down(const ChainState& chain, int m, double epsilon) {
    const LatticeGeometry& g = chain.geometry();
    const int n = g.n;
    if (g.row_first != -n || g.row_last != n) {
        throw std::invalid_argument("average_down: input must cover rows [-n, n]");
    }
    if (m < 1 || !(epsilon > 0.0)) throw std::invalid_argument("average_down: need m >= 1 and epsilon > 0");
    const EnergyBreakdown bd = chain_energy(chain);
    const double C = bd.rescaled;
    if (!(n > m * (1.0 + C / epsilon))) {
        throw std::invalid_argument("average_down: precondition n > m (1 + C / epsilon) violated (n = " +
                                    std::to_string(n) + ", m = " + std::to_string(m) + ", C = " + fmt17(C) +
                                    ", epsilon = " + fmt17(epsilon) + ")");
    }

    const int strips = (2 * n + 1) / (2 * m);
    std::vector<double> values;
    int chosen = -1;
    for (int k = 0; k < strips; ++k) {
        CompensatedSum s;
        const int r0 = -n + 2 * k * m;
        for (int j = r0; j < r0 + 2 * m; ++j) s += bd.row_sum(j);
        values.push_back(s.value() / m);
        if (chosen < 0 && values.back() <= C + epsilon) chosen = k;
    }
    if (chosen < 0) throw std::logic_error("average_down: no strip satisfies the bound");

    const int j0 = -n + 2 * chosen * m + m;
    LatticeGeometry tg = g;
    tg.n = m;
    tg.row_first = -m;
    tg.row_last = m - 1;
    const double s = g.spacing;
    BoundaryData bc = chain.boundary();
    bc.left.offset += j0 * s * (bc.left.gradient * Vec2(-1.0, 1.0));
    bc.right.offset += j0 * s * (bc.right.gradient * Vec2(-1.0, 1.0));
    ChainState t(tg, chain.wells(), bc);
    for (int i = g.column_first + 1; i < g.column_last; ++i) {
        t.set_u(i, chain.u(i) + (j0 * s) * chain.tau(i));
        t.set_theta(i, chain.theta(i));
    }

    AveragingResult res(t);
    res.k = chosen;
    res.row_offset = j0;
    res.h1_nm = values[static_cast<std::size_t>(chosen)];
    res.h1_nm_direct = chain_energy(t).rescaled;
    res.h1_nn = C;
    res.epsilon = epsilon;
    res.strip_values = std::move(values);
    res.verified = res.h1_nm_direct <= res.h1_nn + epsilon;
    return res;
}

namespace {

struct CutCandidate {
    int column;
    double distance;
    int well;
};

std::vector<CutCandidate> cut_candidates(const ChainState& chain, bool right, double alpha) {
    const LatticeGeometry& g = chain.geometry();
    const WellClassification cls = classify(reconstruct(chain), chain.wells());
    const int reach = static_cast<int>(std::ceil(std::pow(static_cast<double>(g.n), alpha)));
    const int lo = right ? std::max(g.column_first + 1, g.column_last - reach) : g.column_first + 1;
    const int hi = right ? g.column_last - 1 : std::min(g.column_last - 1, g.column_first + reach);
    std::vector<CutCandidate> out;
    for (int r = lo; r <= hi; ++r) {
        int well = cls.at(r, 0).well_id;
        double d = 0.0;
        for (int j = g.row_first; j <= g.row_last; ++j) {
            const CellClass& c = cls.at(r, j);
            d = std::max(d, c.well_id == well ? c.distance : c.other_distance);
        }
        out.push_back({r, d, well});
    }
    // closest to a well first, ties toward the boundary
    std::stable_sort(out.begin(), out.end(), [&](const CutCandidate& x, const CutCandidate& y) {
        if (x.distance != y.distance) return x.distance < y.distance;
        return right ? x.column > y.column : x.column < y.column;
    });
    return out;
}

ChainState glue(const ChainState& chain, bool right, int r, const Mat2& V) {
    const LatticeGeometry& g = chain.geometry();
    const double s = g.spacing;
    const Vec2 c = chain.u(r) - V * Vec2(r * s, 0.0);
    BoundaryData bc = chain.boundary();
    bc.kind = BoundaryKind::custom;
    (right ? bc.right : bc.left) = ClampMap{V, c};
    ChainState out(g, chain.wells(), bc);
    for (int i = g.column_first + 1; i < g.column_last; ++i) {
        const bool replaced = right ? i > r : i < r;
        if (replaced) {
            out.set_u(i, chain.u(r) + V * Vec2((i - r) * s, 0.0));
            out.set_theta(i, out.theta(right ? g.column_last : g.column_first));
        } else {
            out.set_u(i, chain.u(i));
            out.set_theta(i, chain.theta(i));
        }
    }
    return out;
}

}  // namespace

CutResult cut_and_extend(const ChainState& chain, Side side, double alpha, double C) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("cut_and_extend: alpha must lie in (0,1)");
    CutResult res(chain);
    res.energy_in = rescaled_energy(chain);
    res.violations_in = count_violations(chain);
    const double threshold = C * std::pow(static_cast<double>(chain.geometry().n), -alpha / 4.0);

    auto cut_one = [&](bool right) {
        const ChainState& cur = res.chain;
        const std::size_t v_now = count_violations(cur);
        for (const CutCandidate& cand : cut_candidates(cur, right, alpha)) {
            if (cand.distance > threshold) break;
            const Mat2 V = cand.well == 0 ? cur.wells().U0 : cur.wells().QU1();
            ChainState out = glue(cur, right, cand.column, V);
            if (count_violations(out) > v_now) continue;
            (right ? res.cut_right : res.cut_left) = cand.column;
            (right ? res.distance_right : res.distance_left) = cand.distance;
            res.chain = std::move(out);
            return;
        }
        throw std::runtime_error(std::string("cut_and_extend: no column within n^alpha of the ") +
                                 (right ? "right" : "left") + " boundary is within " + fmt17(threshold) +
                                 " of a well");
    };
    if (side == Side::right || side == Side::both) cut_one(true);
    if (side == Side::left || side == Side::both) cut_one(false);

    res.energy_out = rescaled_energy(res.chain);
    res.w = res.energy_out - res.energy_in;
    res.violations_out = count_violations(res.chain);
    return res;
}

const char* to_string(LayerKind k) {
    switch (k) {
        case LayerKind::B_plus: return "B_plus";
        case LayerKind::B_minus: return "B_minus";
        case LayerKind::C: return "C";
    }
    return "C";
}

LatticeGeometry layer_geometry(const LayerSpec& spec, int n, int L) {
    switch (spec.kind) {
        case LayerKind::B_plus: return LatticeGeometry::strip(n, 0, L);
        case LayerKind::B_minus: return LatticeGeometry::strip(n, -L, 0);
        case LayerKind::C: return LatticeGeometry::strip(n, -L, L);
    }
    throw std::invalid_argument("layer_geometry: unknown kind");
}

BoundaryData layer_boundary(const LayerSpec& spec, const Vec2& r_star) {
    ClampMap left{spec.V_left, Vec2::Zero()};
    ClampMap right{spec.V_right, Vec2::Zero()};
    if (spec.kind == LayerKind::B_minus) {
        left.offset = r_star;
    } else {
        right.offset = r_star;
    }
    return BoundaryData::custom(left, right);
}

ChainState layer_initial_chain(const LayerSpec& spec, const WellPair& wells, int n, int L, const Vec2& r_star) {
    const LatticeGeometry g = layer_geometry(spec, n, L);
    const BoundaryData bc = layer_boundary(spec, r_star);
    ChainState chain(g, wells, bc);
    const int lo = g.column_first, hi = g.column_last;
    int best_k = lo;
    double best = std::numeric_limits<double>::infinity();
    for (int k = lo; k <= hi; ++k) {
        const double m = (bc.left.at(k, 0.0) - bc.right.at(k, 0.0)).norm();
        if (m < best - 1e-12 || (std::abs(m - best) <= 1e-12 && std::abs(k) < std::abs(best_k))) {
            best = m;
            best_k = k;
        }
    }
    const Vec2 ck = bc.left.at(best_k, 0.0) - bc.right.at(best_k, 0.0);
    for (int i = lo + 1; i < hi; ++i) {
        const Vec2 piece = i <= best_k ? bc.left.at(i, 0.0) : Vec2(bc.right.at(i, 0.0) + ck);
        chain.set_u(i, piece - ck * (static_cast<double>(i - lo) / (hi - lo)));
    }
    return chain;
}

namespace {

// moves a converged chain to new clamp offsets by spreading the change linearly
ChainState shift_offsets(const ChainState& warm, const BoundaryData& bc) {
    const LatticeGeometry& g = warm.geometry();
    const Vec2 dl = bc.left.offset - warm.boundary().left.offset;
    const Vec2 dr = bc.right.offset - warm.boundary().right.offset;
    ChainState out(g, warm.wells(), bc);
    const int lo = g.column_first, hi = g.column_last;
    for (int i = lo + 1; i < hi; ++i) {
        const double t = static_cast<double>(i - lo) / (hi - lo);
        out.set_u(i, warm.u(i) + (1.0 - t) * dl + t * dr);
        out.set_theta(i, warm.theta(i));
    }
    return out;
}

double tail_energy(const LayerSpec& spec, const ChainState& chain) {
    const EnergyBreakdown bd = chain_energy(chain);
    const LatticeGeometry& g = chain.geometry();
    const double left = bd.col_sum(g.column_first) / g.n;
    const double right = bd.col_sum(g.column_last) / g.n;
    switch (spec.kind) {
        case LayerKind::B_plus: return right;
        case LayerKind::B_minus: return left;
        case LayerKind::C: return std::max(left, right);
    }
    return std::max(left, right);
}

}  // namespace

MinimizationReport solve_layer(const LayerSpec& spec, const WellPair& wells, int n, int L, const Vec2& r_star,
                               const MinimizeOptions& opts, const ChainState* warm) {
    const LatticeGeometry g = layer_geometry(spec, n, L);
    if (warm && warm->geometry() == g) {
        return newton_minimize(shift_offsets(*warm, layer_boundary(spec, r_star)), opts);
    }
    return newton_minimize(layer_initial_chain(spec, wells, n, L, r_star), opts);
}

namespace {

struct OffsetSearch {
    OffsetSearch(const LayerSpec& s, const WellPair& w, const LayerOptions& o, LayerEnergyEstimate& e, int n_, int L_)
        : spec(s), wells(w), opts(o), est(e), n(n_), L(L_) {}

    const LayerSpec& spec;
    const WellPair& wells;
    const LayerOptions& opts;
    LayerEnergyEstimate& est;
    int n;
    int L;
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_r = Vec2::Zero();
    std::optional<ChainState> best_chain;
    bool best_converged = false;
    int evals = 0;

    double eval(const Vec2& r) {
        ++evals;
        const MinimizationReport rep =
            solve_layer(spec, wells, n, L, r, opts.minimize, best_chain ? &*best_chain : nullptr);
        est.offsets_tried.push_back(r);
        const double e = rep.converged ? rep.energy_history.back() : std::numeric_limits<double>::infinity();
        if (e < best) {
            best = e;
            best_r = r;
            best_chain = rep.final_chain;
            best_converged = true;
        }
        const double prev = est.best_so_far.empty() ? e : std::min(est.best_so_far.back(), e);
        est.best_so_far.push_back(prev);
        return e;
    }

    void nelder_mead(const Vec2& start, double step) {
        std::array<Vec2, 3> x = {start, start + Vec2(step, 0.0), start + Vec2(0.0, step)};
        std::array<double, 3> f;
        for (int k = 0; k < 3; ++k) f[k] = eval(x[k]);
        while (evals < opts.max_offset_evals) {
            std::array<int, 3> idx = {0, 1, 2};
            std::sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
            const Vec2 xb = x[idx[0]], xm = x[idx[1]], xw = x[idx[2]];
            const double fb = f[idx[0]], fm = f[idx[1]], fw = f[idx[2]];
            const double size = std::max((xm - xb).norm(), (xw - xb).norm());
            if (size <= opts.offset_tol) break;
            const Vec2 c = 0.5 * (xb + xm);
            const Vec2 xr = c + (c - xw);
            const double fr = eval(xr);
            if (fr < fb) {
                const Vec2 xe = c + 2.0 * (c - xw);
                const double fe = eval(xe);
                if (fe < fr) {
                    x[idx[2]] = xe;
                    f[idx[2]] = fe;
                } else {
                    x[idx[2]] = xr;
                    f[idx[2]] = fr;
                }
            } else if (fr < fm) {
                x[idx[2]] = xr;
                f[idx[2]] = fr;
            } else {
                const bool outside = fr < fw;
                const Vec2 xc = outside ? Vec2(c + 0.5 * (xr - c)) : Vec2(c + 0.5 * (xw - c));
                const double fc = eval(xc);
                if (fc < (outside ? fr : fw)) {
                    x[idx[2]] = xc;
                    f[idx[2]] = fc;
                } else {
                    for (int k : {idx[1], idx[2]}) {
                        x[k] = xb + 0.5 * (x[k] - xb);
                        f[k] = eval(x[k]);
                    }
                }
            }
        }
    }
};

}  // namespace

LayerEnergyEstimate estimate_layer(const LayerSpec& spec, const WellPair& wells, const LayerOptions& opts) {
    opts.minimize.validate();
    std::vector<int> ns = opts.n_values.empty() ? std::vector<int>{spec.n} : opts.n_values;
    std::sort(ns.begin(), ns.end());
    LayerEnergyEstimate est;
    est.spec = spec;
    Vec2 start = spec.r_star;
    // later searches start at a previous optimum and use a smaller simplex
    double step = opts.offset_step;

    for (int n : ns) {
        if (n < 1) throw std::invalid_argument("estimate_layer: n must be positive");
        int L = std::max(spec.L, opts.L_factor * n);
        if (L < n) L = n;
        LayerSample sample;
        for (int doubling = 0;; ++doubling) {
            OffsetSearch search(spec, wells, opts, est, n, L);
            if (opts.search_offset) {
                search.nelder_mead(start, step);
            } else {
                search.eval(start);
            }
            sample = LayerSample{n, L, search.best, search.best_r, search.best_converged, 0.0, search.evals};
            if (search.best_chain) {
                sample.tail_energy = tail_energy(spec, *search.best_chain);
                est.best_chain = search.best_chain;
                start = search.best_r;
                step = std::max(opts.offset_step / 16.0, 10.0 * opts.offset_tol);
            }
            if (!search.best_chain || sample.tail_energy < opts.tail_tol || doubling >= opts.max_L_doublings) break;
            L *= 2;
        }
        est.n_sequence.push_back(sample);
    }

    est.converged_flag = true;
    const LayerSample* last = nullptr;
    const LayerSample* prev = nullptr;
    for (const LayerSample& s : est.n_sequence) {
        if (!s.converged) {
            est.converged_flag = false;
            continue;
        }
        prev = last;
        last = &s;
    }
    if (last) {
        est.value = last->estimate;
        est.best_offset = last->r_star;
    } else {
        est.value = std::numeric_limits<double>::infinity();
    }
    if (last && prev) {
        const double scale = std::max(std::abs(last->estimate), std::abs(prev->estimate));
        est.stabilization_gap = scale > 0.0 ? std::abs(last->estimate - prev->estimate) / scale : 0.0;
        est.stabilized = est.stabilization_gap <= opts.stabilization_tol;
    }
    return est;
}

EKResult estimate_EK(const std::vector<Mat2>& V, const WellPair& wells, const LayerOptions& opts) {
    if (V.size() < 3) throw std::invalid_argument("estimate_EK: need at least [F, V_1, F]");
    EKResult res;
    res.converged = true;
    const std::size_t K = V.size() - 1;
    auto run = [&](LayerKind kind, const Mat2& left, const Mat2& right) {
        LayerSpec spec;
        spec.kind = kind;
        spec.V_left = left;
        spec.V_right = right;
        spec.n = opts.n_values.empty() ? 10 : opts.n_values.back();
        res.terms.push_back(estimate_layer(spec, wells, opts));
        res.value += res.terms.back().value;
        res.converged = res.converged && res.terms.back().converged_flag;
    };
    run(LayerKind::B_plus, V[0], V[1]);
    for (std::size_t s = 1; s + 1 < K; ++s) run(LayerKind::C, V[s], V[s + 1]);
    run(LayerKind::B_minus, V[K - 1], V[K]);
    return res;
}

std::string matrix_label(const Mat2& V, const WellPair& wells, const Mat2* F) {
    if (F && (V - *F).norm() <= 1e-12) return "F";
    if ((V - wells.U0).norm() <= 1e-12) return "U0";
    if ((V - wells.QU1()).norm() <= 1e-12) return "QU1";
    return "custom";
}

void write_layer_table(std::ostream& os, const std::vector<LayerEnergyEstimate>& rows, const WellPair& wells,
                       const Mat2* F, const Header& extra) {
    write_header(os, extra);
    os << "kind,V_left,V_right,r_x,r_y,n,L,estimate,converged,tail_energy,stabilization_gap\n";
    for (const LayerEnergyEstimate& e : rows) {
        for (const LayerSample& s : e.n_sequence) {
            os << to_string(e.spec.kind) << ',' << matrix_label(e.spec.V_left, wells, F) << ','
               << matrix_label(e.spec.V_right, wells, F) << ',' << fmt17(s.r_star.x()) << ',' << fmt17(s.r_star.y())
               << ',' << s.n << ',' << s.L << ',' << fmt17(s.estimate) << ',' << (s.converged ? 1 : 0) << ','
               << fmt17(s.tail_energy) << ',' << fmt17(e.stabilization_gap) << '\n';
        }
    }
}

}  // namespace twinlat
