#pragma once

#include "twinlab/config.hpp"

#include "twinlattice/analysis.hpp"
#include "twinlattice/minimize.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace twinlab {

inline constexpr int exit_ok = 0;
inline constexpr int exit_run_failure = 1;
inline constexpr int exit_usage = 2;

// One start -> preoptimize -> Newton run at a single n.
struct MinimizeRun {
    MinimizeRun(twinlat::PreoptimizeResult p, twinlat::MinimizationReport r)
        : pre(std::move(p)), report(std::move(r)) {}

    int n = 0;
    int center = 0;  // interface column of the start
    double start_energy = 0.0;
    twinlat::PreoptimizeResult pre;  // deviation reference
    twinlat::MinimizationReport report;
    std::vector<twinlat::ProfilePoint> profile;
    std::optional<twinlat::DecayFit> fit_left;
    std::optional<twinlat::DecayFit> fit_right;
    std::string fit_error;
    twinlat::InterfaceReport interfaces;

    double energy() const { return report.energy_history.back(); }
    double deviation_at(int i) const;
};

ExperimentConfig with_command(ExperimentConfig cfg, const std::string& command);

MinimizeRun run_minimize(const twinlat::WellPair& wells, int n, const ExperimentConfig& cfg);

int cmd_minimize(const ExperimentConfig& cfg, std::ostream& log);
int cmd_scan(const ExperimentConfig& cfg, std::ostream& log);
int cmd_layers(const ExperimentConfig& cfg, std::ostream& log);
int cmd_diagnose(const ExperimentConfig& cfg, std::ostream& log);
int cmd_fit_decay(const ExperimentConfig& cfg, std::ostream& log);

// Full command line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace twinlab
