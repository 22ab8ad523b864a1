#include "twinlab/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>

namespace twinlab {

namespace {

// Flag storage shared by all subcommands; a flag only overrides the config when given.
struct Flags {
    ExperimentConfig v;
    std::string config_file;
};

struct Bound {
    CLI::Option* opt;
    std::function<void(ExperimentConfig&, const ExperimentConfig&)> apply;
};

std::vector<Bound> add_common(CLI::App* sub, Flags& f) {
    ExperimentConfig& v = f.v;
    std::vector<Bound> b;
    auto copy = [](auto member) {
        return [member](ExperimentConfig& dst, const ExperimentConfig& src) { dst.*member = src.*member; };
    };
    sub->add_option("--config", f.config_file, "JSON config file; flags override its values");
    b.push_back({sub->add_option("--a", v.a, "horizontal stretch a (b = 1/a)"), copy(&ExperimentConfig::a)});
    b.push_back({sub->add_option("--lambda", v.lambda, "boundary data parameter in [0,1]"),
                 copy(&ExperimentConfig::lambda)});
    b.push_back({sub->add_option("--n", v.n_list, "half-width n (repeatable)")->take_all(),
                 copy(&ExperimentConfig::n_list)});
    b.push_back({sub->add_option("--alpha", v.alpha, "good-line exponent"), copy(&ExperimentConfig::alpha)});
    b.push_back({sub->add_option("--delta", v.delta, "good-line band width"), copy(&ExperimentConfig::delta)});
    b.push_back({sub->add_option("--seed", v.seed, "seed echoed into every output"), copy(&ExperimentConfig::seed)});
    b.push_back({sub->add_option("--out", v.output_dir, "output directory"), copy(&ExperimentConfig::output_dir)});
    b.push_back({sub->add_flag("--variable-tau", v.variable_tau, "minimize over the column angles too"),
                 copy(&ExperimentConfig::variable_tau)});
    b.push_back({sub->add_flag("--quick", v.quick, "small default sizes for smoke runs"),
                 copy(&ExperimentConfig::quick)});
    b.push_back({sub->add_option("--bc", v.bc, "boundary data: twin (U0 | QU1 clamps) or affine (F_lambda)")
                     ->check(CLI::IsMember({"twin", "affine"})),
                 copy(&ExperimentConfig::bc)});
    b.push_back({sub->add_flag("--svg", v.svg, "also write a static SVG plot"), copy(&ExperimentConfig::svg)});
    b.push_back({sub->add_option("--grad-tol", v.grad_tol, "gradient infinity-norm tolerance"),
                 copy(&ExperimentConfig::grad_tol)});
    b.push_back({sub->add_option("--max-iters", v.max_iters, "Newton iteration cap"),
                 copy(&ExperimentConfig::max_iters)});
    b.push_back({sub->add_option("--fit-inner", v.fit_inner, "fit window starts at |i - center| = inner"),
                 copy(&ExperimentConfig::fit_inner)});
    b.push_back({sub->add_option("--fit-outer", v.fit_outer, "fit window ends at |i - center| = outer (0: n/2)"),
                 copy(&ExperimentConfig::fit_outer)});
    b.push_back({sub->add_option("--interface-tol", v.interface_tol, "distance separating in-well cells"),
                 copy(&ExperimentConfig::interface_tol)});
    return b;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"twinlab: constrained two-well lattice experiments"};
    app.require_subcommand(1);
    Flags f;
    std::map<CLI::App*, std::vector<Bound>> bound;

    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        bound[sub] = add_common(sub, f);
        return sub;
    };
    CLI::App* minimize = add("minimize", "twin start, middle-atom preoptimization, Newton minimization per n");
    CLI::App* scan = add("scan", "energy scaling table over n");
    CLI::App* layers = add("layers", "boundary and internal layer energy estimates");
    CLI::App* diagnose = add("diagnose", "energy census and good-line search on minimizers");
    CLI::App* fit = add("fit-decay", "exponential fit of a stored deviation profile");

    auto copy = [](auto member) {
        return [member](ExperimentConfig& dst, const ExperimentConfig& src) { dst.*member = src.*member; };
    };
    bound[diagnose].push_back({diagnose->add_option("--c-tilde", f.v.c_tilde, "census threshold (default formula)"),
                               copy(&ExperimentConfig::c_tilde)});
    bound[layers].push_back({layers->add_option("--L-factor", f.v.L_factor, "truncation L = factor * n"),
                             copy(&ExperimentConfig::L_factor)});
    bound[layers].push_back({layers->add_option("--max-offset-evals", f.v.max_offset_evals,
                                                "offset search budget per n"),
                             copy(&ExperimentConfig::max_offset_evals)});
    bound[layers].push_back({layers->add_option("--cross-check-n", f.v.cross_check_n,
                                                "n of the minimizer compared with the internal layer"),
                             copy(&ExperimentConfig::cross_check_n)});
    bound[fit].push_back({fit->add_option("--input", f.v.input, "profile file written by minimize"),
                          copy(&ExperimentConfig::input)});
    bound[fit].push_back({fit->add_option("--center", f.v.center, "interface column"),
                          copy(&ExperimentConfig::center)});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    CLI::App* sub = app.get_subcommands().front();
    ExperimentConfig cfg;
    try {
        if (!f.config_file.empty()) {
            std::ifstream is(f.config_file);
            if (!is) throw std::invalid_argument("cannot read config file " + f.config_file);
            apply_json(cfg, nlohmann::json::parse(is));
        }
        for (const Bound& b : bound[sub]) {
            if (b.opt->count() > 0) b.apply(cfg, f.v);
        }
        cfg.command = sub->get_name();
        cfg.validate();
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (sub == minimize) return cmd_minimize(cfg, out);
        if (sub == scan) return cmd_scan(cfg, out);
        if (sub == layers) return cmd_layers(cfg, out);
        if (sub == diagnose) return cmd_diagnose(cfg, out);
        return cmd_fit_decay(cfg, out);
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "run failure: " << e.what() << '\n';
        return exit_run_failure;
    }
}

}  // namespace twinlab
