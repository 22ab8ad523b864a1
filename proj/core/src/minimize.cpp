#include "twinlattice/minimize.hpp"

#include "twinlattice/chain_io.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace twinlat {

void MinimizeOptions::validate() const {
    if (!(grad_tol > 0.0)) throw std::invalid_argument("MinimizeOptions: grad_tol must be positive");
    if (max_iters < 0) throw std::invalid_argument("MinimizeOptions: max_iters must be nonnegative");
    if (!(hessian_regularization > 0.0)) {
        throw std::invalid_argument("MinimizeOptions: hessian_regularization must be positive");
    }
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw std::invalid_argument("MinimizeOptions: armijo_c in (0,1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw std::invalid_argument("MinimizeOptions: backtrack in (0,1)");
    if (max_admissibility_halvings < 0) {
        throw std::invalid_argument("MinimizeOptions: max_admissibility_halvings must be nonnegative");
    }
}

namespace {

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
    return s;
}

// Solves (H + mu I) p = -g with the smallest mu from {0, reg, 10 reg, ...} that factors.
bool regularized_step(BandedSymmetricMatrix H, const std::vector<double>& g, double reg,
                      std::vector<double>& p, bool& shifted) {
    BandedCholesky chol;
    shifted = false;
    if (!chol.factor(H)) {
        shifted = true;
        double mu = reg;
        double applied = 0.0;
        for (;;) {
            H.add_diagonal(mu - applied);
            applied = mu;
            if (chol.factor(H)) break;
            mu *= 10.0;
            if (mu > 1e16) return false;
        }
    }
    p = chol.solve(g);
    for (double& x : p) x = -x;
    return true;
}

}  // namespace

MinimizationReport newton_minimize(const ChainState& chain, const MinimizeOptions& opts) {
    opts.validate();
    const ChainObjective obj(chain, opts.variable_tau);
    const std::size_t N = obj.size();
    MinimizationReport rep(chain);

    std::vector<double> z(N, 0.0), g, z_try(N), g_try;
    double E = obj.value_and_gradient(z, g);
    double gnorm = max_abs(g);
    rep.energy_history.push_back(E);
    rep.grad_norm_history.push_back(gnorm);
    std::size_t violations = opts.check_admissibility ? count_violations(chain) : 0;

    const double noise = 1e-13 * std::max(1.0, std::abs(E));
    rep.termination = "max_iters";
    while (true) {
        if (gnorm <= opts.grad_tol) {
            rep.termination = "grad_tol";
            break;
        }
        if (rep.iterations >= opts.max_iters) break;

        std::vector<double> p;
        bool shifted = false;
        if (!regularized_step(obj.hessian(z), g, opts.hessian_regularization, p, shifted)) {
            rep.termination = "singular";
            break;
        }
        if (shifted) ++rep.regularized_steps;
        double gp = dot(g, p);
        if (!(gp < 0.0)) {
            for (std::size_t k = 0; k < N; ++k) p[k] = -g[k];
            gp = -dot(g, g);
        }

        double t = 1.0;
        int halvings = 0;
        bool accepted = false;
        std::size_t v_try = violations;
        double E_try = E;
        while (t > 1e-14) {
            for (std::size_t k = 0; k < N; ++k) z_try[k] = z[k] + t * p[k];
            if (opts.check_admissibility) {
                v_try = count_violations(obj.chain_at(z_try));
                if (v_try > violations && halvings < opts.max_admissibility_halvings) {
                    t *= 0.5;
                    ++halvings;
                    ++rep.admissibility_rejections;
                    continue;
                }
            }
            E_try = obj.value_and_gradient(z_try, g_try);
            if (E_try <= E + opts.armijo_c * t * gp) {
                accepted = true;
                break;
            }
            // below roundoff the energy cannot certify descent; accept if the gradient shrinks
            if (E_try <= E + noise && max_abs(g_try) < gnorm) {
                accepted = true;
                break;
            }
            t *= opts.backtrack;
        }
        if (!accepted) {
            rep.termination = "step_collapse";
            break;
        }
        z.swap(z_try);
        g.swap(g_try);
        E = E_try;
        gnorm = max_abs(g);
        violations = v_try;
        ++rep.iterations;
        rep.energy_history.push_back(E);
        rep.grad_norm_history.push_back(gnorm);
    }

    rep.final_chain = obj.chain_at(z);
    rep.final_grad_norm = max_abs(gradient(rep.final_chain, opts.variable_tau));
    rep.converged = rep.final_grad_norm <= opts.grad_tol;
    rep.admissibility_violations = count_violations(rep.final_chain);
    return rep;
}

ChainState twin_chain(int n, const WellPair& wells, int interface_column) {
    if (n < 2) throw std::invalid_argument("twin_chain: n must be at least 2");
    if (std::abs(interface_column) >= n) throw std::invalid_argument("twin_chain: interface column out of range");
    const LatticeGeometry g = LatticeGeometry::standard(n);
    const double s = g.spacing;
    const Mat2 QU1 = wells.QU1();
    BoundaryData bc = BoundaryData::twin(wells);
    const Vec2 c = (wells.U0 - QU1) * Vec2(interface_column * s, 0.0);
    if (interface_column != 0) {
        bc.kind = BoundaryKind::custom;
        bc.right.offset = c;
    }
    ChainState chain(g, wells, bc);
    for (int i = -n + 1; i < n; ++i) {
        const Vec2 x(i * s, 0.0);
        chain.set_u(i, i <= interface_column ? Vec2(wells.U0 * x) : Vec2(QU1 * x + c));
    }
    return chain;
}

ChainState comparison_chain(int n, const WellPair& wells, double lambda) {
    const BoundaryGradient bg = boundary_gradient(wells, lambda);
    const LatticeGeometry g = LatticeGeometry::standard(n);
    const double s = g.spacing;
    const Mat2 QU1 = wells.QU1();
    const int is = static_cast<int>(std::lround((1.0 - 2.0 * lambda) * n));
    const Vec2 c1 = (bg.F - wells.U0) * Vec2(-1.0, 0.0);
    const Vec2 c2 = wells.U0 * Vec2(is * s, 0.0) + c1 - QU1 * Vec2(is * s, 0.0);
    ChainState chain(g, wells, BoundaryData::affine(bg));
    for (int i = -n + 1; i < n; ++i) {
        const Vec2 x(i * s, 0.0);
        chain.set_u(i, i <= is ? Vec2(wells.U0 * x + c1) : Vec2(QU1 * x + c2));
    }
    return chain;
}

PreoptimizeResult preoptimize_middle(const ChainState& chain, int column) {
    PreoptimizeResult res(chain);
    if (!chain.is_free(column)) throw std::invalid_argument("preoptimize_middle: column is clamped");
    const ChainObjective obj(chain, false);
    const long ix = obj.layout().index(column, 0);
    const std::size_t k0 = static_cast<std::size_t>(ix);

    std::vector<double> z(obj.size(), 0.0), g, z_try, g_try;
    double E = obj.value_and_gradient(z, g);
    const double noise = 1e-13 * std::max(1.0, std::abs(E));
    for (int it = 0; it < 200; ++it) {
        Eigen::Vector2d gl(g[k0], g[k0 + 1]);
        if (gl.lpNorm<Eigen::Infinity>() <= 1e-12) {
            res.converged = true;
            break;
        }
        const BandedSymmetricMatrix H = obj.hessian(z);
        Eigen::Matrix2d Hl;
        Hl << H(k0, k0), H(k0, k0 + 1), H(k0 + 1, k0), H(k0 + 1, k0 + 1);
        Eigen::Vector2d p;
        double mu = 0.0;
        for (;;) {
            Eigen::LLT<Eigen::Matrix2d> llt(Hl + mu * Eigen::Matrix2d::Identity());
            if (llt.info() == Eigen::Success) {
                p = -llt.solve(gl);
                break;
            }
            mu = mu == 0.0 ? 1e-8 : 10.0 * mu;
        }
        const double gp = gl.dot(p);
        double t = 1.0;
        bool accepted = false;
        double E_try = E;
        while (t > 1e-14) {
            z_try = z;
            z_try[k0] += t * p.x();
            z_try[k0 + 1] += t * p.y();
            E_try = obj.value_and_gradient(z_try, g_try);
            const double gn = std::max(std::abs(g_try[k0]), std::abs(g_try[k0 + 1]));
            if (E_try <= E + 1e-4 * t * gp || (E_try <= E + noise && gn < gl.lpNorm<Eigen::Infinity>())) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        z.swap(z_try);
        g.swap(g_try);
        E = E_try;
        ++res.iterations;
    }
    if (!res.converged) {
        res.warning = "preoptimize_middle: inner minimization did not converge, input returned";
        return res;
    }
    res.chain = obj.chain_at(z);
    return res;
}

void write_report(std::ostream& os, const MinimizationReport& rep, const MinimizeOptions& opts,
                  const Header& extra) {
    write_header(os, extra);
    write_header(os, {{"opt.variable_tau", opts.variable_tau ? "1" : "0"},
                      {"opt.grad_tol", fmt17(opts.grad_tol)},
                      {"opt.max_iters", std::to_string(opts.max_iters)},
                      {"opt.hessian_regularization", fmt17(opts.hessian_regularization)},
                      {"opt.armijo_c", fmt17(opts.armijo_c)},
                      {"opt.backtrack", fmt17(opts.backtrack)},
                      {"opt.max_admissibility_halvings", std::to_string(opts.max_admissibility_halvings)},
                      {"opt.energy", "rescaled H1 = sum(h)/n, variables in lattice units"},
                      {"opt.boundary_columns", "clamped columns and two ghost columns per side hold clamp values; sites on clamped columns contribute"},
                      {"result.iterations", std::to_string(rep.iterations)},
                      {"result.converged", rep.converged ? "1" : "0"},
                      {"result.termination", rep.termination},
                      {"result.final_grad_norm", fmt17(rep.final_grad_norm)},
                      {"result.admissibility_violations", std::to_string(rep.admissibility_violations)},
                      {"result.admissibility_rejections", std::to_string(rep.admissibility_rejections)},
                      {"result.regularized_steps", std::to_string(rep.regularized_steps)}});
    os << "iteration,energy,grad_norm\n";
    for (std::size_t k = 0; k < rep.energy_history.size(); ++k) {
        os << k << ',' << fmt17(rep.energy_history[k]) << ',' << fmt17(rep.grad_norm_history[k]) << '\n';
    }
    os << '\n';
    write_chain(os, rep.final_chain);
}

}  // namespace twinlat
