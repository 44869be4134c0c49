#pragma once

#include "qmediate/config.hpp"
#include "qmediate/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qmediate {

struct StageRecord {
    std::string name;
    double wall_ms = 0.0;
    std::vector<std::string> outputs;
};

struct RunManifest {
    std::string config_hash;
    std::string tool_version;
    std::vector<StageRecord> stages;
    std::vector<std::string> reports; // report.json per seed
    bool gates_passed = true;
};

struct PipelineOptions {
    int jobs = 1;
    bool keep_residuals = false;
};

/// Artifacts of one (config, seed) training pass.
struct SeedRunPaths {
    std::string dir;
    std::string model_t0;
    std::string model_t1;
    std::string arm_t0_csv;
    std::string arm_t1_csv;
    std::string paired_csv;
    std::string report_json;
    std::string summary_csv;
    std::string residuals_csv;
};

SeedRunPaths seed_run_paths(const std::string& out_dir, std::uint64_t seed);

/// Trains both arms from scratch and writes models, arm CSVs and the paired
/// CSV for one seed.
SeedRunPaths run_train_stage(const ExperimentConfig& config, std::uint64_t seed,
                             const std::string& out_dir, const PipelineOptions& opts);

/// Mediation on a paired CSV; writes report.json and a one-row summary CSV
/// next to it. The numerical gates (eps_rel < 0.05, pure-state check when
/// states are available) throw NumericGateError on violation.
MediationReport run_mediate_stage(const std::string& paired_csv, const SeedRunPaths& paths,
                                  const AnalysisOptions& opts, bool keep_residuals,
                                  double max_s_ab_gate);

/// train -> evaluate -> mediate -> classify for every seed in the config.
/// Writes manifest.json under the output root.
RunManifest run_pipeline(const ExperimentConfig& config, const PipelineOptions& opts = {});

std::string manifest_to_json(const RunManifest& manifest);

struct ValidationOutput {
    std::string diagnostics_csv; // residual vs fitted + normal quantile pairs
    std::string summary_json;
};

/// Plot-ready regression diagnostics for a completed seed run; requires the
/// residuals kept by `--keep-residuals`.
ValidationOutput run_validate_stage(const std::string& seed_dir);

} // namespace qmediate
