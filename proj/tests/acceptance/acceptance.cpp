// Acceptance run: one PASS/FAIL line per criterion; exit code 1 if any criterion fails.
#include "oracles.hpp"

#include "twinlab/commands.hpp"

#include "twinlattice/analysis.hpp"
#include "twinlattice/energy.hpp"
#include "twinlattice/gamma.hpp"
#include "twinlattice/minimize.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace twinlat;

namespace {

const WellPair W = build_wells(std::sqrt(2.0));

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("twinlab_acceptance_" + name);
    fs::remove_all(p);
    return p;
}

json read_json(const fs::path& p) {
    std::ifstream is(p);
    return json::parse(is);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

twinlab::ExperimentConfig config(const std::string& command, const fs::path& out, std::vector<int> n) {
    twinlab::ExperimentConfig cfg;
    cfg.command = command;
    cfg.output_dir = out.string();
    cfg.n_list = std::move(n);
    cfg.validate();
    return cfg;
}

Stencil affine_stencil(const Mat2& G) {
    return {G * Vec2(0, 1), G * Vec2(0, -1), G * Vec2(1, 0), G * Vec2(-1, 0)};
}

// ---- criteria -----------------------------------------------------------------------------

Outcome oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<int> N(4, 16);
    std::uniform_real_distribution<double> L(0.0, 1.0);
    double worst = 0.0;
    int inadmissible = 0;
    for (int k = 0; k < 100; ++k) {
        const ChainState c = oracle::random_chain(N(rng), W, L(rng), rng);
        if (count_violations(c) != 0) ++inadmissible;
        const double e = chain_energy(c).total;
        const double ref = lattice_energy(reconstruct(c)).total;
        worst = std::max(worst, std::abs(e - ref) / (1.0 + std::abs(ref)));
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-12 && inadmissible == 0 && t < 5.0,
            "max |chain - lattice|/(1+|E|) = " + fmt(worst) + " (tol 1e-12), inadmissible = " +
                std::to_string(inadmissible) + ", " + fmt(t) + " s (limit 5 s)"};
}

Outcome zero_set() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI), U(-2.0, 2.0);
    double worst_zero = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Mat2 G = rotation(angle(rng)) * (k % 2 ? W.U1 : W.U0);
        worst_zero = std::max(worst_zero, density(affine_stencil(G), W));
    }
    double least_far = std::numeric_limits<double>::infinity();
    int far = 0;
    while (far < 1000) {
        Mat2 M;
        M << U(rng), U(rng), U(rng), U(rng);
        if (dist_to_well(M, W.U0).distance < 0.1 || dist_to_well(M, W.U1).distance < 0.1) continue;
        least_far = std::min(least_far, density(affine_stencil(M), W));
        ++far;
    }
    const double t = seconds_since(t0);
    return {worst_zero <= 1e-20 && least_far > 0.0 && t < 1.0,
            "max h on wells = " + fmt(worst_zero) + " (tol 1e-20), min h off wells = " + fmt(least_far) + ", " +
                fmt(t) + " s (limit 1 s)"};
}

Outcome rank_one_geometry() {
    const double det_q = std::abs((W.U0 - W.Q * W.U1).determinant());
    const double det_qt = std::abs((W.U0 - W.Qtilde * W.U1).determinant());
    // U0 - Q U1 = c (x) (1,1)/sqrt2 with c parallel to (a, -b); U0 - Qt U1 along (a, b) (x) (1,-1)/sqrt2
    const Mat2 P = Vec2(W.a, -W.b) * Vec2(1, 1).transpose() / std::sqrt(2.0);
    const Mat2 Pt = Vec2(W.a, W.b) * Vec2(1, -1).transpose() / std::sqrt(2.0);
    const Mat2 D = W.U0 - W.Q * W.U1, Dt = W.U0 - W.Qtilde * W.U1;
    const double fac = (D - (D.array() * P.array()).sum() / P.squaredNorm() * P).norm();
    const double fac_t = (Dt - (Dt.array() * Pt.array()).sum() / Pt.squaredNorm() * Pt).norm();
    const oracle::AngleGrid grid(1000000);
    const std::vector<double> roots = oracle::scan_rank_one_angles(W.U0, W.U1, grid);
    double scan_gap = std::numeric_limits<double>::infinity();
    for (double r : roots) scan_gap = std::min(scan_gap, std::abs(std::atan2(std::sin(r - W.gamma), std::cos(r - W.gamma))));
    const double sin_err = std::abs(std::sin(W.gamma) - 0.6);
    const bool pass = det_q <= 1e-12 && det_qt <= 1e-12 && fac <= 1e-12 && fac_t <= 1e-12 && sin_err <= 1e-9 &&
                      roots.size() == 2 && scan_gap <= 2.0 * M_PI / 1000000;
    return {pass, "det = " + fmt(det_q) + ", " + fmt(det_qt) + "; factorization residual = " + fmt(fac) + ", " +
                      fmt(fac_t) + "; |sin gamma - 0.6| = " + fmt(sin_err) + "; scan roots = " +
                      std::to_string(roots.size()) + ", gap to gamma = " + fmt(scan_gap)};
}

Outcome derivative_check() {
    std::mt19937_64 rng(1004);
    double worst_g = 0.0, worst_h = 0.0;
    for (int k = 0; k < 20; ++k) {
        const ChainState c = oracle::random_chain(8, W, 0.5, rng, 0.1, 0.1);
        const ChainObjective obj(c, k % 2 == 1);
        const std::size_t N = obj.size();
        std::vector<double> z(N, 0.0), g;
        obj.value_and_gradient(z, g);
        const BandedSymmetricMatrix H = obj.hessian(z);
        const double h = 1e-6, scale_g = max_abs(g);
        for (std::size_t v = 0; v < N; ++v) {
            std::vector<double> zp = z, zm = z, gp, gm;
            zp[v] += h;
            zm[v] -= h;
            const double fd = (obj.value(zp) - obj.value(zm)) / (2 * h);
            worst_g = std::max(worst_g, std::abs(g[v] - fd) / std::max(1.0, std::max(std::abs(fd), scale_g)));
            obj.value_and_gradient(zp, gp);
            obj.value_and_gradient(zm, gm);
            for (std::size_t r = 0; r < N; ++r) {
                const double fdh = (gp[r] - gm[r]) / (2 * h);
                worst_h = std::max(worst_h, std::abs(H(r, v) - fdh) / std::max(1.0, std::abs(fdh)));
            }
        }
    }
    return {worst_g <= 1e-5 && worst_h <= 1e-4,
            "20 chains n=8 (fixed and variable tau): gradient rel err = " + fmt(worst_g) +
                " (tol 1e-5), Hessian rel err = " + fmt(worst_h) + " (tol 1e-4)"};
}

Outcome twin_minimizers() {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path out = scratch("c5");
    std::ostringstream log;
    twinlab::ExperimentConfig cfg = config("minimize", out, {40, 100});
    cfg.lambda = 0.5;
    const int code = twinlab::cmd_minimize(cfg, log);
    const json s = read_json(out / "minimize" / "summary.json");
    bool pass = code == twinlab::exit_ok;
    std::string detail;
    for (const json& r : s["runs"]) {
        const json& c = r["classification"];
        const bool ok = r["converged"].get<bool>() && r["final_grad_norm"].get<double>() <= 1e-10 &&
                        c["interfaces"].size() == 1 && c["runs"].get<int>() == 2 &&
                        c["left_layer_width"].get<int>() == 0 && c["right_layer_width"].get<int>() == 0 &&
                        r["admissibility_violations"].get<int>() == 0;
        pass = pass && ok;
        detail += "n=" + std::to_string(r["n"].get<int>()) + ": grad " + fmt(r["final_grad_norm"].get<double>()) +
                  ", regions " + std::to_string(c["runs"].get<int>()) + ", interfaces " +
                  std::to_string(c["interfaces"].size()) + ", violations " +
                  std::to_string(r["admissibility_violations"].get<int>()) + "; ";
    }
    const double t = seconds_since(t0);
    fs::remove_all(out);
    return {pass && t < 120.0, detail + fmt(t) + " s (limit 120 s)"};
}

Outcome deviation_profile_check() {
    twinlab::ExperimentConfig cfg = config("minimize", scratch("c6"), {100, 200});
    bool middle_ok = true, fit_ok = true, local_ok = true;
    std::string detail;
    for (int n : cfg.n_list) {
        const twinlab::MinimizeRun r = twinlab::run_minimize(W, n, cfg);
        const double mid = r.deviation_at(r.center);
        const double r2l = r.fit_left ? r.fit_left->r_squared : 0.0;
        const double r2r = r.fit_right ? r.fit_right->r_squared : 0.0;
        double worst_ratio = std::numeric_limits<double>::infinity();
        for (int sgn : {-1, 1}) {
            const double near = r.deviation_at(r.center + 2 * sgn);
            const double far = r.deviation_at(r.center + sgn * (n / 2));
            worst_ratio = std::min(worst_ratio, near / far);
        }
        middle_ok = middle_ok && mid <= 1e-10;
        fit_ok = fit_ok && r2l >= 0.9 && r2r >= 0.9;
        local_ok = local_ok && worst_ratio >= 10.0;
        detail += "n=" + std::to_string(n) + ": middle dev " + fmt(mid) + " (tol 1e-10), r2 " + fmt(r2l) + "/" +
                  fmt(r2r) + " (min 0.9), dev(|i|=2)/dev(|i|=n/2) " + fmt(worst_ratio) + " (min 10); ";
    }
    detail += std::string("middle ") + (middle_ok ? "ok" : "fails") + ", fit " + (fit_ok ? "ok" : "fails") +
              ", localization " + (local_ok ? "ok" : "fails");
    return {middle_ok && fit_ok && local_ok, detail};
}

Outcome energy_scaling() {
    const fs::path out = scratch("c7");
    std::ostringstream log;
    const int code = twinlab::cmd_scan(config("scan", out, {25, 50, 100, 200}), log);
    const json s = read_json(out / "scan" / "summary.json");
    bool pass = code == twinlab::exit_ok;
    std::string detail;
    const json& rows = s["rows"];
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double h1 = rows[k]["H1_ratio"].get<double>();
        const double total = rows[k]["H_total_ratio"].get<double>();
        pass = pass && std::abs(h1 - 1.0) < 0.10 && std::abs(total / 0.5 - 1.0) <= 0.15;
        detail += std::to_string(rows[k - 1]["n"].get<int>()) + "->" + std::to_string(rows[k]["n"].get<int>()) +
                  ": H1 ratio " + fmt(h1) + ", H ratio " + fmt(total) + "; ";
    }
    fs::remove_all(out);
    return {pass, detail + "limits |H1 ratio - 1| < 0.1, |H ratio / 0.5 - 1| <= 0.15"};
}

Outcome averaging_contract() {
    std::mt19937_64 rng(1008);
    std::uniform_int_distribution<int> N(12, 48), M(1, 5);
    std::uniform_real_distribution<double> L(0.0, 1.0), slack(1.05, 3.0);
    int failures = 0, inputs = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    while (inputs < 50) {
        const int n = N(rng), m = M(rng);
        const ChainState c = oracle::random_chain(n, W, L(rng), rng, 0.02, 0.05);
        const double C = rescaled_energy(c);
        const double eps = slack(rng) * m * C / (n - m);
        if (!(n > m * (1.0 + C / eps))) continue;
        const AveragingResult r = average_down(c, m, eps);
        const double direct = rescaled_energy(r.translated);
        const double margin = r.h1_nn + eps - direct;
        worst_margin = std::min(worst_margin, margin);
        if (margin < 0.0) ++failures;
        ++inputs;
    }
    return {failures == 0, "50 inputs, violations = " + std::to_string(failures) +
                               ", min (H1_nn + eps - H1_nm direct) = " + fmt(worst_margin)};
}

Outcome layer_consistency() {
    const fs::path out = scratch("c9");
    std::ostringstream log;
    twinlab::ExperimentConfig cfg = config("layers", out, {10, 20, 40});
    cfg.lambda = 0.5;
    const int code = twinlab::cmd_layers(cfg, log);
    const json s = read_json(out / "layers" / "summary.json");
    fs::remove_all(out);

    // internal layer at the largest stabilized n
    const json& c = s["ek"][0]["terms"][1];
    const json& seq = c["n_sequence"];
    const double c_est = seq.back()["estimate"].get<double>();
    const double h1 = s["crosscheck"]["minimizer_H1"].get<double>();
    const double rel = std::abs(c_est - h1) / h1;
    const bool cross_ok = c["stabilized"].get<bool>() && rel <= 0.10;

    double zero = 0.0;
    for (const json& z : s["zero_rows"]) zero = std::max(zero, z["value"].get<double>());
    const bool zero_ok = zero <= 1e-10;

    // E^3 for lambda = 1/2: both well orders give a finite sum of three positive layers, and the
    // minimizer under F_{1/2} clamps shows two boundary layers plus one internal interface
    bool e3_ok = code == twinlab::exit_ok;
    std::string e3;
    for (const json& ek : s["ek"]) {
        int positive = 0;
        for (const json& t : ek["terms"]) positive += t["value"].get<double>() > 1e-6;
        e3_ok = e3_ok && ek["terms"].size() == 3 && positive == 3 && ek["converged"].get<bool>();
        e3 += ek["sequence"].get<std::string>() + " = " + fmt(ek["value"].get<double>()) + ", ";
    }
    twinlab::ExperimentConfig affine = cfg;
    affine.command = "minimize";
    affine.bc = "affine";
    const twinlab::MinimizeRun r = twinlab::run_minimize(W, 40, affine);
    const int layers = r.interfaces.layer_count();
    e3_ok = e3_ok && r.report.converged && layers == 3 && r.interfaces.interfaces.size() == 1;

    return {cross_ok && zero_ok && e3_ok,
            "C(U0,QU1) at n=" + std::to_string(seq.back()["n"].get<int>()) + " = " + fmt(c_est) +
                " vs minimizer H1(n=" + std::to_string(s["crosscheck"]["n"].get<int>()) + ") = " + fmt(h1) +
                ", rel diff " + fmt(rel) + " (tol 0.1); max C(V,V,0) = " + fmt(zero) + " (tol 1e-10); " + e3 +
                "layers in the F_1/2 minimizer (n=40) = " + std::to_string(layers) + " (expected 3)"};
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "twinlab");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    return twinlab::run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
}

Outcome determinism() {
    const fs::path a = scratch("c10a"), b = scratch("c10b");
    const char* workers[] = {"1", "3"};
    bool codes = true;
    for (int k = 0; k < 2; ++k) {
        const fs::path& p = k == 0 ? a : b;
        ::setenv("TWINLAB_WORKERS", workers[k], 1);
        codes = codes && run_cli({"minimize", "--n", "10", "--n", "20", "--svg", "--out", p.string()}) == 0;
        codes = codes && run_cli({"scan", "--quick", "--out", p.string()}) == 0;
        codes = codes && run_cli({"diagnose", "--quick", "--out", p.string()}) == 0;
        codes = codes && run_cli({"layers", "--quick", "--out", p.string()}) == 0;
    }
    ::unsetenv("TWINLAB_WORKERS");
    int files = 0, differing = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        ++files;
        const fs::path other = b / fs::relative(e.path(), a);
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differing;
    }
    int files_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(b)) files_b += e.is_regular_file();
    fs::remove_all(a);
    fs::remove_all(b);
    return {codes && files > 0 && files == files_b && differing == 0,
            std::to_string(files) + " files compared across 1 and 3 workers, differing = " +
                std::to_string(differing)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 oracle equivalence", oracle_equivalence},
        {"2 zero set", zero_set},
        {"3 rank-one geometry", rank_one_geometry},
        {"4 gradient and Hessian check", derivative_check},
        {"5 twin minimizers", twin_minimizers},
        {"6 deviation profile", deviation_profile_check},
        {"7 surface energy scaling", energy_scaling},
        {"8 averaging contract", averaging_contract},
        {"9 layer energy consistency", layer_consistency},
        {"10 determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << o.detail << " [" << fmt(seconds_since(t0))
                  << " s]" << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
