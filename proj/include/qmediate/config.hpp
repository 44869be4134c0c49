#pragma once

#include "qmediate/circuit.hpp"
#include "qmediate/mediation.hpp"
#include "qmediate/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qmediate {

/// One experiment: a dataset, an architecture contrast (shallow t=0 vs deep
/// t=1), training settings and mediation settings. Parsed from a JSON
/// document and schema-validated field by field.
struct ExperimentConfig {
    // dataset
    std::string dataset_path;
    std::string label_column;
    bool binarize_median = false;
    char delimiter = ',';

    // circuit contrast
    int n_qubits = 4;
    Topology topology = Topology::Linear;
    int layers_t0 = 1;
    int layers_t1 = 3; // 3 or 6

    std::vector<std::uint64_t> seeds = {42, 142};

    TrainOptions training; // learning_rate 0.005, batch 16, epochs 50
    double test_fraction = 0.3;
    std::optional<std::vector<int>> bipartition_a; // default: first ceil(n/2)

    int bootstrap_b = 2000;
    double threshold_c = 0.5;
    std::string threshold_mode = "per-config";
    BasisMode basis = BasisMode::Reduced;

    std::string output_dir; // empty -> QMEDIATE_OUT_DIR -> "qmediate-out"

    CircuitSpec spec_for_arm(int t) const;
    Bipartition bipartition() const;
    std::string config_id(std::uint64_t seed) const;
};

/// Parses + validates; errors name the offending field.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text);

/// Canonical serialized form; its FNV-1a hash fingerprints a run.
std::string canonical_config_json(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

/// Output root resolution: explicit value, else QMEDIATE_OUT_DIR, else
/// "qmediate-out".
std::string resolve_output_dir(const ExperimentConfig& config);

} // namespace qmediate
