#include "twinlab/config.hpp"

#include <set>
#include <stdexcept>

namespace twinlab {

std::vector<int> ExperimentConfig::resolved_n() const {
    if (!n_list.empty()) return n_list;
    if (command == "scan") return quick ? std::vector<int>{8, 16} : std::vector<int>{25, 50, 100, 200};
    if (command == "layers") return quick ? std::vector<int>{4, 8} : std::vector<int>{10, 20, 40};
    return quick ? std::vector<int>{8} : std::vector<int>{40, 100, 200};
}

void ExperimentConfig::validate() const {
    if (!(a > 0.0) || a == 1.0) throw std::invalid_argument("a must be positive and different from 1");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0,1]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(delta > 0.0 && delta < 0.25)) throw std::invalid_argument("delta must lie in (0,1/4)");
    if (bc != "twin" && bc != "affine") throw std::invalid_argument("bc must be 'twin' or 'affine'");
    if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
    if (max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
    if (fit_inner < 1 || fit_outer < 0) throw std::invalid_argument("fit window must satisfy inner >= 1, outer >= 0");
    if (!(interface_tol > 0.0)) throw std::invalid_argument("interface_tol must be positive");
    if (L_factor < 1) throw std::invalid_argument("L_factor must be at least 1");
    if (max_offset_evals < 3) throw std::invalid_argument("max_offset_evals must be at least 3");
    if (cross_check_n < 2) throw std::invalid_argument("cross_check_n must be at least 2");
    if (output_dir.empty()) throw std::invalid_argument("output directory must not be empty");
    if (command == "fit-decay") {
        if (input.empty()) throw std::invalid_argument("fit-decay needs --input");
        return;
    }
    const std::vector<int> ns = resolved_n();
    if (ns.empty()) throw std::invalid_argument("n list must not be empty");
    const int n_min = command == "layers" ? 1 : 2;
    for (int n : ns) {
        if (n < n_min) throw std::invalid_argument("every n must be at least " + std::to_string(n_min));
    }
    if (std::set<int>(ns.begin(), ns.end()).size() != ns.size()) {
        throw std::invalid_argument("n list must not contain duplicates");
    }
}

namespace {

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + std::to_string(v[k]);
    return s;
}

}  // namespace

twinlat::Header ExperimentConfig::header() const {
    using twinlat::fmt17;
    return {{"config.command", command},
            {"config.a", fmt17(a)},
            {"config.lambda", fmt17(lambda)},
            {"config.n_list", join(resolved_n())},
            {"config.alpha", fmt17(alpha)},
            {"config.delta", fmt17(delta)},
            {"config.seed", std::to_string(seed)},
            {"config.variable_tau", variable_tau ? "1" : "0"},
            {"config.quick", quick ? "1" : "0"},
            {"config.bc", bc},
            {"config.grad_tol", fmt17(grad_tol)},
            {"config.max_iters", std::to_string(max_iters)},
            {"config.fit_inner", std::to_string(fit_inner)},
            {"config.fit_outer", std::to_string(fit_outer)},
            {"config.interface_tol", fmt17(interface_tol)},
            {"config.c_tilde", fmt17(c_tilde)},
            {"config.L_factor", std::to_string(L_factor)},
            {"config.max_offset_evals", std::to_string(max_offset_evals)},
            {"config.cross_check_n", std::to_string(cross_check_n)},
            {"config.svg", svg ? "1" : "0"},
            {"config.input", input},
            {"config.center", std::to_string(center)}};
}

nlohmann::json ExperimentConfig::to_json() const {
    return {{"command", command},
            {"a", a},
            {"lambda", lambda},
            {"n", resolved_n()},
            {"alpha", alpha},
            {"delta", delta},
            {"seed", seed},
            {"variable_tau", variable_tau},
            {"quick", quick},
            {"bc", bc},
            {"grad_tol", grad_tol},
            {"max_iters", max_iters},
            {"fit_inner", fit_inner},
            {"fit_outer", fit_outer},
            {"interface_tol", interface_tol},
            {"c_tilde", c_tilde},
            {"L_factor", L_factor},
            {"max_offset_evals", max_offset_evals},
            {"cross_check_n", cross_check_n},
            {"svg", svg},
            {"input", input},
            {"center", center}};
}

void apply_json(ExperimentConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "a") cfg.a = v.get<double>();
        else if (key == "lambda") cfg.lambda = v.get<double>();
        else if (key == "n") cfg.n_list = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
        else if (key == "alpha") cfg.alpha = v.get<double>();
        else if (key == "delta") cfg.delta = v.get<double>();
        else if (key == "seed") cfg.seed = v.get<long>();
        else if (key == "out") cfg.output_dir = v.get<std::string>();
        else if (key == "variable_tau") cfg.variable_tau = v.get<bool>();
        else if (key == "quick") cfg.quick = v.get<bool>();
        else if (key == "bc") cfg.bc = v.get<std::string>();
        else if (key == "svg") cfg.svg = v.get<bool>();
        else if (key == "grad_tol") cfg.grad_tol = v.get<double>();
        else if (key == "max_iters") cfg.max_iters = v.get<int>();
        else if (key == "fit_inner") cfg.fit_inner = v.get<int>();
        else if (key == "fit_outer") cfg.fit_outer = v.get<int>();
        else if (key == "interface_tol") cfg.interface_tol = v.get<double>();
        else if (key == "c_tilde") cfg.c_tilde = v.get<double>();
        else if (key == "L_factor") cfg.L_factor = v.get<int>();
        else if (key == "max_offset_evals") cfg.max_offset_evals = v.get<int>();
        else if (key == "cross_check_n") cfg.cross_check_n = v.get<int>();
        else if (key == "input") cfg.input = v.get<std::string>();
        else if (key == "center") cfg.center = v.get<int>();
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

}  // namespace twinlab
