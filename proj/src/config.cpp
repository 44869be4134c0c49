#include "qmediate/config.hpp"

#include "qmediate/errors.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qmediate {

using nlohmann::json;

CircuitSpec ExperimentConfig::spec_for_arm(int t) const {
    CircuitSpec spec;
    spec.topology = topology;
    spec.n_qubits = n_qubits;
    spec.n_layers = t == 0 ? layers_t0 : layers_t1;
    return spec;
}

Bipartition ExperimentConfig::bipartition() const {
    if (bipartition_a.has_value()) {
        Bipartition part;
        part.n_qubits = n_qubits;
        part.subsystem_a = *bipartition_a;
        part.validate();
        return part;
    }
    return Bipartition::front_half(n_qubits);
}

std::string ExperimentConfig::config_id(std::uint64_t seed) const {
    return to_string(topology) + "_" + std::to_string(n_qubits) + "_" +
           std::to_string(layers_t1) + "_seed" + std::to_string(seed);
}

namespace {

template <typename T>
T get_field(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field '" + key + "' has the wrong type");
    }
}

template <typename T>
T require_field(const json& j, const std::string& key) {
    if (!j.contains(key)) {
        throw ConfigError("missing required field '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field '" + key + "' has the wrong type");
    }
}

} // namespace

ExperimentConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& err) {
        throw ConfigError(std::string("config is not valid JSON: ") + err.what());
    }

    ExperimentConfig config;

    const json dataset = require_field<json>(j, "dataset");
    config.dataset_path = require_field<std::string>(dataset, "path");
    config.label_column = require_field<std::string>(dataset, "label_column");
    config.binarize_median = get_field<bool>(dataset, "binarize_median", false);
    const std::string delim = get_field<std::string>(dataset, "delimiter", ",");
    if (delim.size() != 1) {
        throw ConfigError("field 'dataset.delimiter' must be a single character");
    }
    config.delimiter = delim[0];

    const json circuit = require_field<json>(j, "circuit");
    config.n_qubits = require_field<int>(circuit, "n_qubits");
    if (config.n_qubits < 2 || config.n_qubits > 8) {
        throw ConfigError("field 'circuit.n_qubits' must be in [2, 8]");
    }
    config.topology = topology_from_string(require_field<std::string>(circuit, "topology"));
    config.layers_t0 = get_field<int>(circuit, "layers_t0", 1);
    config.layers_t1 = get_field<int>(circuit, "layers_t1", 3);
    if (config.layers_t0 < 1) {
        throw ConfigError("field 'circuit.layers_t0' must be >= 1");
    }
    if (config.layers_t1 != 3 && config.layers_t1 != 6) {
        throw ConfigError("field 'circuit.layers_t1' must be 3 or 6");
    }
    if (config.layers_t1 <= config.layers_t0) {
        throw ConfigError("field 'circuit.layers_t1' must exceed layers_t0");
    }

    if (j.contains("seeds")) {
        config.seeds = require_field<std::vector<std::uint64_t>>(j, "seeds");
        if (config.seeds.empty()) {
            throw ConfigError("field 'seeds' must not be empty");
        }
    }

    if (j.contains("training")) {
        const json training = j.at("training");
        config.training.learning_rate =
            get_field<double>(training, "learning_rate", config.training.learning_rate);
        config.training.batch_size =
            get_field<int>(training, "batch_size", config.training.batch_size);
        config.training.epochs = get_field<int>(training, "epochs", config.training.epochs);
        config.training.validation_fraction = get_field<double>(
            training, "validation_fraction", config.training.validation_fraction);
        config.training.select_best_epoch =
            get_field<bool>(training, "select_best_epoch", config.training.select_best_epoch);
        if (config.training.learning_rate <= 0.0) {
            throw ConfigError("field 'training.learning_rate' must be positive");
        }
        if (config.training.batch_size < 1 || config.training.epochs < 1) {
            throw ConfigError("fields 'training.batch_size' and 'training.epochs' must be >= 1");
        }
        if (config.training.validation_fraction <= 0.0 ||
            config.training.validation_fraction >= 1.0) {
            throw ConfigError("field 'training.validation_fraction' must be in (0, 1)");
        }
    }

    if (j.contains("split")) {
        config.test_fraction = get_field<double>(j.at("split"), "test_fraction", 0.3);
        if (config.test_fraction <= 0.0 || config.test_fraction >= 1.0) {
            throw ConfigError("field 'split.test_fraction' must be in (0, 1)");
        }
    }

    if (j.contains("bipartition")) {
        config.bipartition_a = require_field<std::vector<int>>(j, "bipartition");
    }

    if (j.contains("mediation")) {
        const json mediation = j.at("mediation");
        config.bootstrap_b = get_field<int>(mediation, "bootstrap_b", config.bootstrap_b);
        config.threshold_c = get_field<double>(mediation, "threshold_c", config.threshold_c);
        config.threshold_mode =
            get_field<std::string>(mediation, "threshold_mode", config.threshold_mode);
        config.basis =
            basis_mode_from_string(get_field<std::string>(mediation, "basis", "reduced"));
        if (config.bootstrap_b < 1) {
            throw ConfigError("field 'mediation.bootstrap_b' must be >= 1");
        }
        if (config.threshold_c <= 0.0) {
            throw ConfigError("field 'mediation.threshold_c' must be positive");
        }
        if (config.threshold_mode != "per-config" && config.threshold_mode != "global-max") {
            throw ConfigError("field 'mediation.threshold_mode' must be per-config or global-max");
        }
    }

    config.output_dir = get_field<std::string>(j, "output_dir", "");

    // Validate the derived objects eagerly so config errors surface here.
    config.spec_for_arm(0).validate();
    config.spec_for_arm(1).validate();
    try {
        config.bipartition();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("field 'bipartition': ") + err.what());
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_json(buffer.str());
}

std::string canonical_config_json(const ExperimentConfig& config) {
    json j;
    j["dataset"] = {{"path", config.dataset_path},
                    {"label_column", config.label_column},
                    {"binarize_median", config.binarize_median},
                    {"delimiter", std::string(1, config.delimiter)}};
    j["circuit"] = {{"n_qubits", config.n_qubits},
                    {"topology", to_string(config.topology)},
                    {"layers_t0", config.layers_t0},
                    {"layers_t1", config.layers_t1}};
    j["seeds"] = config.seeds;
    j["training"] = {{"learning_rate", config.training.learning_rate},
                     {"batch_size", config.training.batch_size},
                     {"epochs", config.training.epochs},
                     {"validation_fraction", config.training.validation_fraction},
                     {"select_best_epoch", config.training.select_best_epoch}};
    j["split"] = {{"test_fraction", config.test_fraction}};
    if (config.bipartition_a.has_value()) {
        j["bipartition"] = *config.bipartition_a;
    }
    j["mediation"] = {{"bootstrap_b", config.bootstrap_b},
                      {"threshold_c", config.threshold_c},
                      {"threshold_mode", config.threshold_mode},
                      {"basis", to_string(config.basis)}};
    j["output_dir"] = config.output_dir;
    return j.dump();
}

std::string config_hash(const ExperimentConfig& config) {
    // FNV-1a over the canonical serialization; a fingerprint, not a MAC.
    const std::string text = canonical_config_json(config);
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (const unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001B3ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buffer);
}

std::string resolve_output_dir(const ExperimentConfig& config) {
    if (!config.output_dir.empty()) {
        return config.output_dir;
    }
    if (const char* env = std::getenv("QMEDIATE_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "qmediate-out";
}

} // namespace qmediate
