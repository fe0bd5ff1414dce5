#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "incsel/analysis.hpp"
#include "incsel/grid.hpp"

namespace incsel {

// Batch experiment description shared by all subcommands. Flags and config
// files populate it; validate_config enforces the invariants below.
struct ExperimentConfig {
    std::string command;                     // "simulate" | "limit" | "verify"
    std::vector<double> nus{1000.0};         // one entry per intensity; most commands use front()
    std::string strategy = "self-similar:optimal";
    std::size_t replicates = 1000;           // >= 1
    std::size_t grid_points = 101;           // >= 2
    std::uint64_t seed = 7;
    std::size_t threads = 0;                 // 0 = use hardware concurrency
    std::string out_path;                    // empty = print to stdout
    std::string format = "csv";              // "csv" | "json"
    double beta_override = std::numeric_limits<double>::quiet_NaN();
    double k_override = std::numeric_limits<double>::quiet_NaN();
    bool fixture_violate = false;            // verify only: inject a synthetic violation
};

// Throws std::invalid_argument describing the first violated invariant.
void validate_config(const ExperimentConfig& config);

// One named check inside a verify run.
struct AuditLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<AuditLine> audits;
    bool all_pass() const;
};

// Closed-form vs Monte Carlo covariance table for the limit pair process.
struct LimitTable {
    std::vector<std::string> header;          // s, t, then closed/mc/se per component
    std::vector<std::vector<double>> rows;    // one row per ordered grid pair s <= t
    std::size_t within_three_se = 0;          // component cells with |mc-closed| <= 3 se
    std::size_t cells = 0;                    // total component cells
};

// Testable cores (no file output). cmd_* wrappers orchestrate IO on top.
MomentReport run_simulate(const ExperimentConfig& config,
                          std::vector<GridSeries>* ensemble_out = nullptr);
LimitTable run_limit(const ExperimentConfig& config);
VerifyReport run_verify_audits(const ExperimentConfig& config);

// Subcommand drivers: return the process exit code (0 ok, 1 audit failure).
// Usage problems throw std::invalid_argument; file problems throw IoError.
int cmd_simulate(const ExperimentConfig& config);
int cmd_limit(const ExperimentConfig& config);
int cmd_verify(const ExperimentConfig& config);

} // namespace incsel
