#pragma once

#include "twinlattice/banded.hpp"
#include "twinlattice/lattice.hpp"
#include "twinlattice/table_io.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace twinlat {

// Free variables, column by column over the free columns: (u_x, u_y) / spacing (lattice
// units), then theta_i when tau is variable.
struct VariableLayout {
    int first_free = 0;
    int last_free = -1;
    int block = 2;

    std::size_t size() const { return static_cast<std::size_t>((last_free - first_free + 1) * block); }
    bool has_theta() const { return block == 3; }
    // -1 for clamped columns or a theta slot that is not a variable
    long index(int column, int component) const;
    std::size_t half_bandwidth() const { return static_cast<std::size_t>(3 * block - 1); }
};

// Rescaled energy H1 = sum(h) / n as a function of a displacement z of the free variables
// from a fixed base chain. Keeping the base fixed and small displacements as unknowns keeps
// roundoff in the absolute positions out of the derivatives.
class ChainObjective {
public:
    ChainObjective(const ChainState& base, bool variable_tau);

    const VariableLayout& layout() const { return layout_; }
    std::size_t size() const { return layout_.size(); }
    const ChainState& base() const { return base_; }

    ChainState chain_at(const std::vector<double>& z) const;
    double value(const std::vector<double>& z) const;
    double value_and_gradient(const std::vector<double>& z, std::vector<double>& grad) const;
    BandedSymmetricMatrix hessian(const std::vector<double>& z) const;

private:
    struct Columns;
    Columns columns_at(const std::vector<double>& z) const;
    template <class Visit>
    void for_each_site(const Columns& cols, bool need_theta, Visit&& visit) const;

    ChainState base_;
    VariableLayout layout_;
    std::vector<Vec2> base_bonds_;  // (u^{i+1} - u^i) / spacing for the base chain
};

// Derivatives of H1 with respect to the free variables, at the given chain.
std::vector<double> gradient(const ChainState& chain, bool variable_tau = false);
BandedSymmetricMatrix hessian(const ChainState& chain, bool variable_tau = false);
double max_abs(const std::vector<double>& v);

struct MinimizeOptions {
    bool variable_tau = false;
    double grad_tol = 1e-10;
    int max_iters = 500;
    double hessian_regularization = 1e-8;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    int max_admissibility_halvings = 20;
    bool check_admissibility = true;

    void validate() const;
};

struct MinimizationReport {
    explicit MinimizationReport(ChainState c) : final_chain(std::move(c)) {}

    ChainState final_chain;
    int iterations = 0;
    std::vector<double> grad_norm_history;
    std::vector<double> energy_history;  // H1 after each accepted step, starting value first
    bool converged = false;
    std::size_t admissibility_violations = 0;  // in the final state
    int admissibility_rejections = 0;          // trial steps halved because of violations
    int regularized_steps = 0;                 // steps that needed a Levenberg shift
    double final_grad_norm = 0.0;
    std::string termination;
};

MinimizationReport newton_minimize(const ChainState& chain, const MinimizeOptions& opts = {});

// u^i = U0 (i lambda_n, 0) up to the interface column, Q U1 (i lambda_n, 0) + c beyond,
// with c making the two branches meet at the interface atom; twin clamps.
ChainState twin_chain(int n, const WellPair& wells, int interface_column = 0);

// Piecewise affine U0 | Q U1 chain under F_lambda clamps with the interface at x = 1 - 2 lambda.
ChainState comparison_chain(int n, const WellPair& wells, double lambda);

struct PreoptimizeResult {
    explicit PreoptimizeResult(ChainState c) : chain(std::move(c)) {}

    ChainState chain;
    bool converged = false;
    int iterations = 0;
    std::string warning;
};

// Minimizes H1 over the single atom u^column, all others fixed.
PreoptimizeResult preoptimize_middle(const ChainState& chain, int column = 0);

// options echo, histories and the final chain snapshot
void write_report(std::ostream& os, const MinimizationReport& report, const MinimizeOptions& opts,
                  const Header& extra = {});

}  // namespace twinlat
