#include "twinlab/commands.hpp"

#include "twinlab/svg.hpp"
#include "twinlab/worker_pool.hpp"

#include "twinlattice/chain_io.hpp"
#include "twinlattice/energy.hpp"
#include "twinlattice/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace twinlat;

namespace twinlab {

double MinimizeRun::deviation_at(int i) const {
    for (const ProfilePoint& p : profile) {
        if (p.i == i) return p.deviation;
    }
    throw std::out_of_range("deviation_at: column outside the profile");
}

ExperimentConfig with_command(ExperimentConfig cfg, const std::string& command) {
    cfg.command = command;
    return cfg;
}

namespace {

std::ofstream open_out(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
    return os;
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream os = open_out(p);
    os << j.dump(2) << '\n';
}

fs::path run_dir(const ExperimentConfig& cfg, int n) {
    return fs::path(cfg.output_dir) / cfg.command / ("n" + std::to_string(n));
}

MinimizeOptions minimize_options(const ExperimentConfig& cfg) {
    MinimizeOptions o;
    o.variable_tau = cfg.variable_tau;
    o.grad_tol = cfg.grad_tol;
    o.max_iters = cfg.max_iters;
    return o;
}

json fit_json(const std::optional<DecayFit>& f) {
    if (!f) return nullptr;
    return {{"rate", f->rate},
            {"amplitude", f->amplitude},
            {"r_squared", f->r_squared},
            {"first", f->window.first},
            {"last", f->window.last},
            {"center", f->window.center}};
}

json interfaces_json(const InterfaceReport& r) {
    json list = json::array();
    for (const InterfaceRecord& rec : r.interfaces) {
        list.push_back({{"x_s", rec.x_s},
                        {"left_well", rec.left_well},
                        {"right_well", rec.right_well},
                        {"width_in_atoms", rec.width_in_atoms},
                        {"first_column", rec.first_column},
                        {"last_column", rec.last_column}});
    }
    return {{"interfaces", list},
            {"left_layer_width", r.left_layer_width},
            {"right_layer_width", r.right_layer_width},
            {"runs", r.runs},
            {"layer_count", r.layer_count()}};
}

json run_json(const MinimizeRun& r) {
    const EnergyBreakdown bd = chain_energy(r.report.final_chain);
    json j = {{"n", r.n},
              {"converged", r.report.converged},
              {"iterations", r.report.iterations},
              {"termination", r.report.termination},
              {"final_grad_norm", r.report.final_grad_norm},
              {"H1", bd.rescaled},
              {"H_total", bd.total},
              {"start_energy", r.start_energy},
              {"preoptimized_energy", r.report.energy_history.front()},
              {"preoptimize_converged", r.pre.converged},
              {"admissibility_violations", r.report.admissibility_violations},
              {"admissibility_rejections", r.report.admissibility_rejections},
              {"regularized_steps", r.report.regularized_steps},
              {"center", r.center},
              {"fit_left", fit_json(r.fit_left)},
              {"fit_right", fit_json(r.fit_right)},
              {"classification", interfaces_json(r.interfaces)}};
    if (!r.pre.warning.empty()) j["preoptimize_warning"] = r.pre.warning;
    if (!r.fit_error.empty()) j["fit_error"] = r.fit_error;
    j["middle_deviation"] = r.deviation_at(r.center);
    return j;
}

void write_run_files(const MinimizeRun& r, const ExperimentConfig& cfg) {
    const fs::path dir = run_dir(cfg, r.n);
    Header h = cfg.header();
    h.emplace_back("run.n", std::to_string(r.n));
    {
        std::ofstream os = open_out(dir / "report.csv");
        write_report(os, r.report, minimize_options(cfg), h);
    }
    save_chain((dir / "start_chain.csv").string(), r.pre.chain, h);
    save_chain((dir / "chain.csv").string(), r.report.final_chain, h);
    {
        std::ofstream os = open_out(dir / "energy.csv");
        write_breakdown(os, chain_energy(r.report.final_chain), h);
    }
    {
        std::vector<DecayFit> fits;
        if (r.fit_left) fits.push_back(*r.fit_left);
        if (r.fit_right) fits.push_back(*r.fit_right);
        std::ofstream os = open_out(dir / "profile.csv");
        write_profile(os, r.profile, fits, h);
    }
    {
        std::ofstream os = open_out(dir / "classification.csv");
        write_classification(os, classify(reconstruct(r.report.final_chain), r.report.final_chain.wells()), h);
    }
}

// runs every n on the worker pool, results in n-list order
std::vector<MinimizeRun> run_all(const ExperimentConfig& cfg) {
    const WellPair wells = build_wells(cfg.a);
    const std::vector<int> ns = cfg.resolved_n();
    std::vector<std::optional<MinimizeRun>> slots(ns.size());
    parallel_for(ns.size(), worker_count(), [&](std::size_t k) {
        slots[k].emplace(run_minimize(wells, ns[k], cfg));
        write_run_files(*slots[k], cfg);
    });
    std::vector<MinimizeRun> out;
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

void write_profile_svg(const std::vector<MinimizeRun>& runs, const ExperimentConfig& cfg) {
    std::vector<Series> series;
    for (const MinimizeRun& r : runs) {
        Series s{"n = " + std::to_string(r.n), {}};
        for (const ProfilePoint& p : r.profile) s.points.emplace_back(p.i, p.deviation);
        series.push_back(std::move(s));
    }
    std::ofstream os = open_out(fs::path(cfg.output_dir) / cfg.command / "profiles.svg");
    write_line_plot(os, "deviation from the preoptimized start", "i", "|u_i - u_i(start)|", series, true);
}

}  // namespace

MinimizeRun run_minimize(const WellPair& wells, int n, const ExperimentConfig& cfg) {
    ChainState start = cfg.bc == "twin" ? twin_chain(n, wells, 0) : comparison_chain(n, wells, cfg.lambda);
    const int center = cfg.bc == "twin" ? 0 : static_cast<int>(std::lround((1.0 - 2.0 * cfg.lambda) * n));
    PreoptimizeResult pre(start);
    pre.converged = true;
    if (start.is_free(center)) pre = preoptimize_middle(start, center);
    MinimizeRun run(pre, newton_minimize(pre.chain, minimize_options(cfg)));
    run.n = n;
    run.center = center;
    run.start_energy = rescaled_energy(start);
    run.profile = deviation_profile(run.report.final_chain, run.pre.chain);

    const int outer = cfg.fit_outer > 0 ? cfg.fit_outer : n / 2;
    const int lo = -n + 1, hi = n - 1;
    auto side = [&](bool right) -> std::optional<DecayFit> {
        FitWindow w = right ? FitWindow{center + cfg.fit_inner, std::min(hi, center + outer), center}
                            : FitWindow{std::max(lo, center - outer), center - cfg.fit_inner, center};
        try {
            return fit_exponential(run.profile, w);
        } catch (const std::invalid_argument& e) {
            run.fit_error += std::string(run.fit_error.empty() ? "" : "; ") + (right ? "right: " : "left: ") + e.what();
            return std::nullopt;
        }
    };
    run.fit_left = side(false);
    run.fit_right = side(true);
    run.interfaces = interface_positions(classify(reconstruct(run.report.final_chain), wells), cfg.interface_tol);
    return run;
}

int cmd_minimize(const ExperimentConfig& cfg, std::ostream& log) {
    const std::vector<MinimizeRun> runs = run_all(cfg);
    json summary = {{"config", cfg.to_json()}, {"runs", json::array()}};
    bool ok = true;
    std::vector<int> failed;
    for (const MinimizeRun& r : runs) {
        summary["runs"].push_back(run_json(r));
        log << "n=" << r.n << " H1=" << fmt17(r.energy()) << " iterations=" << r.report.iterations
            << " grad=" << fmt17(r.report.final_grad_norm) << " converged=" << (r.report.converged ? "yes" : "no")
            << " interfaces=" << r.interfaces.interfaces.size() << '\n';
        if (!r.report.converged) {
            ok = false;
            failed.push_back(r.n);
        }
    }
    summary["all_converged"] = ok;
    summary["failed_n"] = failed;
    write_json(fs::path(cfg.output_dir) / cfg.command / "summary.json", summary);
    if (cfg.svg) write_profile_svg(runs, cfg);
    if (!ok) {
        log << "not converged for n =";
        for (int n : failed) log << ' ' << n;
        log << '\n';
    }
    return ok ? exit_ok : exit_run_failure;
}

int cmd_scan(const ExperimentConfig& cfg, std::ostream& log) {
    const std::vector<MinimizeRun> runs = run_all(cfg);
    const fs::path dir = fs::path(cfg.output_dir) / cfg.command;
    std::ofstream table = open_out(dir / "scan.csv");
    std::ofstream loglog = open_out(dir / "loglog.csv");
    write_header(table, cfg.header());
    write_header(loglog, cfg.header());
    table << "n,lambda_n,H_total,H1,converged,iterations,final_grad_norm,H1_ratio,H_total_ratio\n";
    loglog << "log10_n,log10_H_total\n";
    json summary = {{"config", cfg.to_json()}, {"rows", json::array()}};
    bool ok = true;
    const EnergyBreakdown* prev = nullptr;
    std::vector<EnergyBreakdown> bds;
    bds.reserve(runs.size());
    for (const MinimizeRun& r : runs) {
        bds.push_back(chain_energy(r.report.final_chain));
        const EnergyBreakdown& bd = bds.back();
        const double h1_ratio = prev ? bd.rescaled / prev->rescaled : 1.0;
        const double total_ratio = prev ? bd.total / prev->total : 1.0;
        table << r.n << ',' << fmt17(bd.geometry.spacing) << ',' << fmt17(bd.total) << ',' << fmt17(bd.rescaled) << ','
              << (r.report.converged ? 1 : 0) << ',' << r.report.iterations << ',' << fmt17(r.report.final_grad_norm)
              << ',' << fmt17(h1_ratio) << ',' << fmt17(total_ratio) << '\n';
        loglog << fmt17(std::log10(static_cast<double>(r.n))) << ',' << fmt17(std::log10(bd.total)) << '\n';
        summary["rows"].push_back({{"n", r.n},
                                   {"H_total", bd.total},
                                   {"H1", bd.rescaled},
                                   {"converged", r.report.converged},
                                   {"H1_ratio", h1_ratio},
                                   {"H_total_ratio", total_ratio}});
        log << "n=" << r.n << " H=" << fmt17(bd.total) << " H1=" << fmt17(bd.rescaled) << '\n';
        ok = ok && r.report.converged;
        prev = &bd;
    }
    summary["all_converged"] = ok;
    write_json(dir / "summary.json", summary);
    if (cfg.svg) {
        Series s{"H_n", {}};
        for (const EnergyBreakdown& bd : bds) s.points.emplace_back(std::log10(static_cast<double>(bd.geometry.n)), bd.total);
        std::ofstream os = open_out(dir / "loglog.svg");
        write_line_plot(os, "energy scaling", "log10 n", "H_n", {s}, true);
    }
    return ok ? exit_ok : exit_run_failure;
}

int cmd_layers(const ExperimentConfig& cfg, std::ostream& log) {
    const WellPair wells = build_wells(cfg.a);
    const Mat2 F = boundary_gradient(wells, cfg.lambda).F;
    const Mat2 QU1 = wells.QU1();
    LayerOptions lo;
    lo.n_values = cfg.resolved_n();
    lo.L_factor = cfg.L_factor;
    lo.max_offset_evals = cfg.max_offset_evals;
    lo.minimize.grad_tol = std::max(cfg.grad_tol, 1e-9);
    lo.minimize.max_iters = std::max(cfg.max_iters, 200);
    if (cfg.quick) {
        lo.max_offset_evals = std::min(lo.max_offset_evals, 20);
        lo.max_L_doublings = 0;
    }

    // zero rows need no offset search
    LayerOptions fixed = lo;
    fixed.search_offset = false;
    auto zero_spec = [&](const Mat2& V) {
        LayerSpec s;
        s.kind = LayerKind::C;
        s.V_left = V;
        s.V_right = V;
        s.n = lo.n_values.back();
        return s;
    };
    const std::vector<std::vector<Mat2>> sequences = {{F, wells.U0, QU1, F}, {F, QU1, wells.U0, F}};

    std::vector<LayerEnergyEstimate> zero(2);
    std::vector<EKResult> ek(sequences.size());
    std::optional<MinimizeRun> cross;
    ExperimentConfig cross_cfg = cfg;
    cross_cfg.bc = "twin";
    cross_cfg.variable_tau = false;
    const int cross_n = cfg.quick ? 8 : cfg.cross_check_n;
    parallel_for(5, worker_count(), [&](std::size_t k) {
        if (k < 2) zero[k] = estimate_layer(zero_spec(k == 0 ? wells.U0 : QU1), wells, fixed);
        else if (k < 4) ek[k - 2] = estimate_EK(sequences[k - 2], wells, lo);
        else cross.emplace(run_minimize(wells, cross_n, cross_cfg));
    });

    const fs::path dir = fs::path(cfg.output_dir) / cfg.command;
    std::vector<LayerEnergyEstimate> rows = zero;
    for (const EKResult& r : ek) rows.insert(rows.end(), r.terms.begin(), r.terms.end());
    {
        std::ofstream os = open_out(dir / "layers.csv");
        write_layer_table(os, rows, wells, &F, cfg.header());
    }

    const LayerEnergyEstimate& c_internal = ek[0].terms[1];
    const double h1 = cross->energy();
    const double rel = std::abs(c_internal.value - h1) / std::abs(h1);
    {
        std::ofstream os = open_out(dir / "ek.csv");
        write_header(os, cfg.header());
        os << "sequence,value,B_plus,C,B_minus,converged\n";
        for (std::size_t s = 0; s < ek.size(); ++s) {
            os << (s == 0 ? "F|U0|QU1|F" : "F|QU1|U0|F") << ',' << fmt17(ek[s].value);
            for (const LayerEnergyEstimate& t : ek[s].terms) os << ',' << fmt17(t.value);
            os << ',' << (ek[s].converged ? 1 : 0) << '\n';
        }
        os << "crosscheck,n,minimizer_H1,C_estimate,relative_difference\n";
        os << "crosscheck," << cross_n << ',' << fmt17(h1) << ',' << fmt17(c_internal.value) << ',' << fmt17(rel) << '\n';
    }

    auto est_json = [&](const LayerEnergyEstimate& e) {
        json samples = json::array();
        for (const LayerSample& s : e.n_sequence) {
            samples.push_back({{"n", s.n},
                               {"L", s.L},
                               {"estimate", s.estimate},
                               {"r_star", {s.r_star.x(), s.r_star.y()}},
                               {"converged", s.converged},
                               {"tail_energy", s.tail_energy},
                               {"evaluations", s.evaluations}});
        }
        return json{{"kind", to_string(e.spec.kind)},
                    {"V_left", matrix_label(e.spec.V_left, wells, &F)},
                    {"V_right", matrix_label(e.spec.V_right, wells, &F)},
                    {"value", e.value},
                    {"converged", e.converged_flag},
                    {"stabilized", e.stabilized},
                    {"stabilization_gap", e.stabilization_gap},
                    {"best_offset", {e.best_offset.x(), e.best_offset.y()}},
                    {"n_sequence", samples}};
    };
    json summary = {{"config", cfg.to_json()}, {"zero_rows", json::array()}, {"ek", json::array()}};
    for (const LayerEnergyEstimate& e : zero) summary["zero_rows"].push_back(est_json(e));
    bool ok = zero[0].converged_flag && zero[1].converged_flag;
    for (std::size_t s = 0; s < ek.size(); ++s) {
        json terms = json::array();
        for (const LayerEnergyEstimate& t : ek[s].terms) terms.push_back(est_json(t));
        summary["ek"].push_back({{"sequence", s == 0 ? "F|U0|QU1|F" : "F|QU1|U0|F"},
                                 {"value", ek[s].value},
                                 {"converged", ek[s].converged},
                                 {"terms", terms}});
        ok = ok && ek[s].converged;
    }
    summary["crosscheck"] = {{"n", cross_n},
                             {"minimizer_H1", h1},
                             {"minimizer_converged", cross->report.converged},
                             {"C_estimate", c_internal.value},
                             {"relative_difference", rel}};
    summary["all_converged"] = ok && cross->report.converged;
    write_json(dir / "summary.json", summary);

    log << "C(U0,U0,0)=" << fmt17(zero[0].value) << " C(QU1,QU1,0)=" << fmt17(zero[1].value) << '\n';
    log << "E3[F|U0|QU1|F]=" << fmt17(ek[0].value) << " E3[F|QU1|U0|F]=" << fmt17(ek[1].value) << '\n';
    log << "C(U0,QU1)=" << fmt17(c_internal.value) << " minimizer H1(n=" << cross_n << ")=" << fmt17(h1)
        << " relative difference=" << fmt17(rel) << '\n';
    return summary["all_converged"].get<bool>() ? exit_ok : exit_run_failure;
}

int cmd_diagnose(const ExperimentConfig& cfg, std::ostream& log) {
    const std::vector<MinimizeRun> runs = run_all(cfg);
    const fs::path root = fs::path(cfg.output_dir) / cfg.command;
    json summary = {{"config", cfg.to_json()}, {"runs", json::array()}};
    bool ok = true;
    for (const MinimizeRun& r : runs) {
        const ChainState& chain = r.report.final_chain;
        const EnergyBreakdown bd = chain_energy(chain);
        GoodLineOptions go;
        go.alpha = cfg.alpha;
        go.delta = cfg.delta;
        go.c_tilde = cfg.c_tilde;
        const double c_tilde = cfg.c_tilde > 0.0 ? cfg.c_tilde : default_c_tilde(chain.wells());
        const double t_alpha = std::pow(static_cast<double>(r.n), -cfg.alpha);
        const Census census_alpha = local_energy_threshold_census(bd, t_alpha);
        const Census census_c = local_energy_threshold_census(bd, c_tilde);
        const GoodLines gl = find_good_lines(bd, chain.wells(), go);

        const LatticeGeometry& g = bd.geometry;
        std::vector<int> per_row_alpha(static_cast<std::size_t>(g.rows()), 0);
        std::vector<int> per_row_c(static_cast<std::size_t>(g.rows()), 0);
        for (auto [i, j] : census_alpha.sites) ++per_row_alpha[static_cast<std::size_t>(j - g.row_first)];
        for (auto [i, j] : census_c.sites) ++per_row_c[static_cast<std::size_t>(j - g.row_first)];
        int max_alpha = 0;
        {
            Header h = cfg.header();
            h.emplace_back("run.n", std::to_string(r.n));
            h.emplace_back("census.threshold_alpha", fmt17(t_alpha));
            h.emplace_back("census.threshold_c_tilde", fmt17(c_tilde));
            std::ofstream os = open_out(run_dir(cfg, r.n) / "census.csv");
            write_header(os, h);
            os << "j,weighted_row_sum,count_alpha,count_c_tilde\n";
            for (int j = g.row_first; j <= g.row_last; ++j) {
                const std::size_t k = static_cast<std::size_t>(j - g.row_first);
                max_alpha = std::max(max_alpha, per_row_alpha[k]);
                os << j << ',' << fmt17(bd.weighted_row_sum(j)) << ',' << per_row_alpha[k] << ',' << per_row_c[k]
                   << '\n';
            }
        }
        json good = {{"found", gl.found},
                     {"row_sum_bound", gl.row_sum_bound},
                     {"count_alpha_bound", gl.count_alpha_bound},
                     {"count_c_tilde_bound", gl.count_ctilde_bound},
                     {"c_tilde", gl.c_tilde}};
        if (gl.found) {
            good["rows"] = {gl.j_minus, gl.j_zero, gl.j_plus};
        } else {
            good["failed_condition"] = gl.failed_condition;
            good["message"] = gl.message;
        }
        json row = run_json(r);
        row["census"] = {{"threshold_alpha", t_alpha},
                         {"sites_alpha", census_alpha.sites.size()},
                         {"rows_alpha", census_alpha.rows.size()},
                         {"max_per_row_alpha", max_alpha},
                         {"n_pow_alpha", std::pow(static_cast<double>(r.n), cfg.alpha)},
                         {"threshold_c_tilde", c_tilde},
                         {"sites_c_tilde", census_c.sites.size()},
                         {"rows_c_tilde", census_c.rows.size()}};
        row["good_lines"] = good;
        summary["runs"].push_back(row);
        log << "n=" << r.n << " sites>=n^-alpha: " << census_alpha.sites.size() << " (max per row " << max_alpha
            << ") sites>=c_tilde: " << census_c.sites.size() << " good lines: "
            << (gl.found ? "found" : "none (" + gl.failed_condition + ")") << '\n';
        ok = ok && r.report.converged;
    }
    summary["all_converged"] = ok;
    write_json(root / "summary.json", summary);
    return ok ? exit_ok : exit_run_failure;
}

int cmd_fit_decay(const ExperimentConfig& cfg, std::ostream& log) {
    std::ifstream is(cfg.input);
    if (!is) throw std::invalid_argument("cannot read " + cfg.input);
    Header in_header;
    const std::vector<ProfilePoint> profile = read_profile(is, &in_header);
    if (profile.empty()) throw std::runtime_error("profile is empty");
    int lo = profile.front().i, hi = profile.front().i;
    for (const ProfilePoint& p : profile) {
        lo = std::min(lo, p.i);
        hi = std::max(hi, p.i);
    }
    const int outer_left = cfg.fit_outer > 0 ? cfg.fit_outer : (cfg.center - lo) / 2;
    const int outer_right = cfg.fit_outer > 0 ? cfg.fit_outer : (hi - cfg.center) / 2;
    std::vector<DecayFit> fits;
    json summary = {{"config", cfg.to_json()}};
    bool ok = true;
    for (bool right : {false, true}) {
        const FitWindow w = right ? FitWindow{cfg.center + cfg.fit_inner, cfg.center + outer_right, cfg.center}
                                  : FitWindow{cfg.center - outer_left, cfg.center - cfg.fit_inner, cfg.center};
        const char* key = right ? "fit_right" : "fit_left";
        try {
            fits.push_back(fit_exponential(profile, w));
            summary[key] = fit_json(fits.back());
            log << key << ": rate=" << fmt17(fits.back().rate) << " r_squared=" << fmt17(fits.back().r_squared) << '\n';
        } catch (const std::invalid_argument& e) {
            summary[key] = {{"error", e.what()}};
            log << key << ": " << e.what() << '\n';
            ok = false;
        }
    }
    const fs::path dir = fs::path(cfg.output_dir) / cfg.command;
    {
        std::ofstream os = open_out(dir / "fit.csv");
        write_profile(os, profile, fits, cfg.header());
    }
    write_json(dir / "summary.json", summary);
    return ok ? exit_ok : exit_run_failure;
}

}  // namespace twinlab
