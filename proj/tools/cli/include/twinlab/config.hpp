#pragma once

#include "twinlattice/table_io.hpp"

#include <json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace twinlab {

struct ExperimentConfig {
    std::string command;
    double a = std::sqrt(2.0);
    double lambda = 0.5;
    std::vector<int> n_list;  // empty selects the command default
    double alpha = 0.4;
    double delta = 0.1;
    long seed = 0;
    std::string output_dir = "twinlab_out";
    bool variable_tau = false;
    bool quick = false;
    std::string bc = "twin";  // twin | affine
    bool svg = false;

    // minimize
    double grad_tol = 1e-10;
    int max_iters = 500;
    int fit_inner = 2;  // fit window |i - center| in [inner, outer]
    int fit_outer = 0;  // 0 selects n / 2
    double interface_tol = 0.05;

    // diagnose
    double c_tilde = 0.0;  // <= 0 selects the default threshold

    // layers
    int L_factor = 3;
    int max_offset_evals = 60;
    int cross_check_n = 100;

    // fit-decay
    std::string input;
    int center = 0;

    // n_list with the command default filled in
    std::vector<int> resolved_n() const;
    // throws std::invalid_argument describing the first violated precondition
    void validate() const;
    twinlat::Header header() const;
    nlohmann::json to_json() const;
};

// Reads known keys from a JSON object; unknown keys are rejected.
void apply_json(ExperimentConfig& cfg, const nlohmann::json& j);

}  // namespace twinlab
