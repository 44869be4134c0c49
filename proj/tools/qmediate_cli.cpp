// qmediate: train paired shallow/deep variational classifiers, extract
// quantum-information mediators, and decompose performance contrasts into
// direct and mediated effects.

#include "qmediate/config.hpp"
#include "qmediate/errors.hpp"
#include "qmediate/pipeline.hpp"
#include "qmediate/report.hpp"
#include "qmediate/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

namespace {

namespace fs = std::filesystem;
using namespace qmediate;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitGate = 3;

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    out << text;
}

struct ConfigOverrides {
    std::optional<std::uint64_t> seed; // replaces the config's seed list
    bool binarize_median = false;
    std::optional<std::string> threshold_mode;
};

ExperimentConfig load_with_overrides(const std::string& config_path,
                                     const ConfigOverrides& overrides) {
    ExperimentConfig config = load_config(config_path);
    if (overrides.seed.has_value()) {
        config.seeds = {*overrides.seed};
    }
    if (overrides.binarize_median) {
        config.binarize_median = true;
    }
    if (overrides.threshold_mode.has_value()) {
        if (*overrides.threshold_mode != "per-config" &&
            *overrides.threshold_mode != "global-max") {
            throw ConfigError("--threshold-mode must be per-config or global-max");
        }
        config.threshold_mode = *overrides.threshold_mode;
    }
    return config;
}

int cmd_train(const std::string& config_path, const ConfigOverrides& overrides, int jobs) {
    const ExperimentConfig config = load_with_overrides(config_path, overrides);
    const std::string out_dir = resolve_output_dir(config);
    fs::create_directories(out_dir);
    PipelineOptions opts;
    opts.jobs = jobs;
    for (const std::uint64_t seed : config.seeds) {
        const SeedRunPaths paths = run_train_stage(config, seed, out_dir, opts);
        std::cout << "trained seed " << seed << " -> " << paths.dir << "\n";
    }
    return kExitOk;
}

int cmd_mediate(const std::string& input, std::uint64_t seed, int bootstrap_b, double threshold_c,
                const std::string& threshold_mode, const std::string& basis, bool keep_residuals,
                int jobs) {
    std::string paired_csv = input;
    SeedRunPaths paths;
    double max_s_ab = std::numeric_limits<double>::quiet_NaN();
    if (fs::is_directory(input)) {
        paths.dir = input;
        paired_csv = input + "/paired.csv";
        std::ifstream diag_in(input + "/state_diagnostics.json");
        if (diag_in) {
            nlohmann::json diag;
            diag_in >> diag;
            max_s_ab = diag.value("max_s_ab", max_s_ab);
        }
    } else {
        const fs::path parent = fs::path(input).parent_path();
        paths.dir = parent.empty() ? "." : parent.string();
    }
    paths.report_json = paths.dir + "/report.json";
    paths.summary_csv = paths.dir + "/summary.csv";
    paths.residuals_csv = paths.dir + "/residuals.csv";

    AnalysisOptions opts;
    opts.bootstrap_b = bootstrap_b;
    opts.seed = seed;
    opts.threshold_c = threshold_c;
    opts.threshold_mode = threshold_mode;
    opts.basis = basis_mode_from_string(basis);
    opts.jobs = jobs;
    const MediationReport report =
        run_mediate_stage(paired_csv, paths, opts, keep_residuals, max_s_ab);
    std::cout << "eps_rel " << report.estimate.eps_rel << ", regime "
              << to_string(report.regime.regime) << " -> " << paths.report_json << "\n";
    return kExitOk;
}

int cmd_classify(const std::string& input, const std::string& threshold_mode,
                 const std::string& out_csv, const std::string& out_json) {
    const CsvTable table = read_csv(input);
    const ClassifyResult result = classify_summary(table, threshold_mode);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(result.rows.size());
    for (const ClassifiedRow& row : result.rows) {
        rows.push_back(row.cells);
    }
    write_csv(out_csv, result.header, rows);
    write_text_file(out_json, histogram_to_json(result));
    for (const auto& [regime, count] : result.histogram) {
        std::cout << regime << " " << count << " ("
                  << 100.0 * count / static_cast<double>(result.rows.size()) << "%)\n";
    }
    return kExitOk;
}

int cmd_pipeline(const std::string& config_path, const ConfigOverrides& overrides, int jobs,
                 bool keep_residuals) {
    const ExperimentConfig config = load_with_overrides(config_path, overrides);
    PipelineOptions opts;
    opts.jobs = jobs;
    opts.keep_residuals = keep_residuals;
    const RunManifest manifest = run_pipeline(config, opts);
    std::cout << "pipeline complete, " << manifest.stages.size() << " stages, config hash "
              << manifest.config_hash << "\n";
    return kExitOk;
}

int cmd_validate(const std::string& run_dir) {
    const ValidationOutput out = run_validate_stage(run_dir);
    std::cout << "diagnostics -> " << out.diagnostics_csv << "\n";
    std::cout << "summary -> " << out.summary_json << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal mediation analysis of variational quantum classifier architectures"};
    app.set_version_flag("--version", qmediate::kVersion);
    app.require_subcommand(1);

    int jobs = 1;
    app.add_option("--jobs", jobs, "Worker threads (never changes outputs)")->capture_default_str();

    auto* train_cmd = app.add_subcommand("train", "Train both arms and write evaluations");
    std::string train_config;
    std::uint64_t override_seed = 0;
    bool have_override_seed = false;
    bool override_binarize = false;
    train_cmd->add_option("--config", train_config, "Experiment config JSON")->required();
    train_cmd
        ->add_option_function<std::uint64_t>(
            "--seed",
            [&](std::uint64_t v) {
                override_seed = v;
                have_override_seed = true;
            },
            "Run a single seed instead of the config's list")
        ->expected(1);
    train_cmd->add_flag("--binarize-median", override_binarize,
                        "Binarize a continuous label column at its median");

    auto* mediate_cmd =
        app.add_subcommand("mediate", "Estimate the effect decomposition for a paired CSV");
    std::string mediate_input;
    std::uint64_t mediate_seed = 42;
    int mediate_b = 2000;
    double mediate_c = 0.5;
    std::string mediate_mode = "per-config";
    std::string mediate_basis = "reduced";
    bool keep_residuals = false;
    mediate_cmd->add_option("--input", mediate_input, "Paired CSV or a seed run directory")
        ->required();
    mediate_cmd->add_option("--seed", mediate_seed, "Master seed for the bootstrap stream")
        ->capture_default_str();
    mediate_cmd->add_option("--b", mediate_b, "Bootstrap resamples")->capture_default_str();
    mediate_cmd->add_option("--threshold-c", mediate_c, "Threshold constant c")
        ->capture_default_str();
    mediate_cmd->add_option("--threshold-mode", mediate_mode, "per-config or global-max")
        ->capture_default_str();
    mediate_cmd->add_option("--basis", mediate_basis, "reduced or full-pseudo")
        ->capture_default_str();
    mediate_cmd->add_flag("--keep-residuals", keep_residuals,
                          "Store residuals for the validate subcommand");

    auto* classify_cmd = app.add_subcommand("classify", "Label summary rows with causal regimes");
    std::string classify_input;
    std::string classify_mode = "per-config";
    std::string classify_out_csv = "classified.csv";
    std::string classify_out_json = "histogram.json";
    classify_cmd->add_option("--input", classify_input, "Summary CSV with thr,dir,ind,tot columns")
        ->required();
    classify_cmd->add_option("--threshold-mode", classify_mode, "per-config or global-max")
        ->capture_default_str();
    classify_cmd->add_option("--out-csv", classify_out_csv, "Annotated CSV path")
        ->capture_default_str();
    classify_cmd->add_option("--out-json", classify_out_json, "Histogram JSON path")
        ->capture_default_str();

    auto* pipeline_cmd =
        app.add_subcommand("pipeline", "Full run: train, evaluate, mediate, classify");
    std::string pipeline_config;
    bool pipeline_keep_residuals = false;
    std::string pipeline_threshold_mode;
    pipeline_cmd->add_option("--config", pipeline_config, "Experiment config JSON")->required();
    pipeline_cmd->add_flag("--keep-residuals", pipeline_keep_residuals,
                           "Store residuals for the validate subcommand");
    pipeline_cmd
        ->add_option_function<std::uint64_t>(
            "--seed",
            [&](std::uint64_t v) {
                override_seed = v;
                have_override_seed = true;
            },
            "Run a single seed instead of the config's list")
        ->expected(1);
    pipeline_cmd->add_flag("--binarize-median", override_binarize,
                           "Binarize a continuous label column at its median");
    pipeline_cmd->add_option("--threshold-mode", pipeline_threshold_mode,
                             "Override the config's per-config/global-max mode");

    auto* validate_cmd =
        app.add_subcommand("validate", "Plot-ready regression diagnostics for a seed run");
    std::string validate_dir;
    validate_cmd->add_option("--run", validate_dir, "Seed run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    ConfigOverrides overrides;
    if (have_override_seed) {
        overrides.seed = override_seed;
    }
    overrides.binarize_median = override_binarize;
    if (!pipeline_threshold_mode.empty()) {
        overrides.threshold_mode = pipeline_threshold_mode;
    }

    try {
        if (train_cmd->parsed()) {
            return cmd_train(train_config, overrides, jobs);
        }
        if (mediate_cmd->parsed()) {
            return cmd_mediate(mediate_input, mediate_seed, mediate_b, mediate_c, mediate_mode,
                               mediate_basis, keep_residuals, jobs);
        }
        if (classify_cmd->parsed()) {
            return cmd_classify(classify_input, classify_mode, classify_out_csv,
                                classify_out_json);
        }
        if (pipeline_cmd->parsed()) {
            return cmd_pipeline(pipeline_config, overrides, jobs, pipeline_keep_residuals);
        }
        if (validate_cmd->parsed()) {
            return cmd_validate(validate_dir);
        }
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const NumericGateError& err) {
        std::cerr << "numerical gate failure: " << err.what() << "\n";
        return kExitGate;
    } catch (const DataError& err) {
        std::cerr << "data error: " << err.what() << "\n";
        return kExitData;
    } catch (const SingularDesignError& err) {
        std::cerr << "data error: " << err.what() << "\n";
        return kExitData;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
