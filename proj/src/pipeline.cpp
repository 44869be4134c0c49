#include "qmediate/pipeline.hpp"

#include "qmediate/errors.hpp"
#include "qmediate/rng.hpp"
#include "qmediate/stats.hpp"
#include "qmediate/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <thread>

namespace qmediate {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double elapsed_ms(const std::chrono::steady_clock::time_point& start) {
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << text;
}

constexpr double kEpsRelGate = 0.05;
constexpr double kPurityGate = 1e-10;

} // namespace

SeedRunPaths seed_run_paths(const std::string& out_dir, std::uint64_t seed) {
    SeedRunPaths paths;
    paths.dir = out_dir + "/seed" + std::to_string(seed);
    paths.model_t0 = paths.dir + "/model_t0.txt";
    paths.model_t1 = paths.dir + "/model_t1.txt";
    paths.arm_t0_csv = paths.dir + "/arm_t0.csv";
    paths.arm_t1_csv = paths.dir + "/arm_t1.csv";
    paths.paired_csv = paths.dir + "/paired.csv";
    paths.report_json = paths.dir + "/report.json";
    paths.summary_csv = paths.dir + "/summary.csv";
    paths.residuals_csv = paths.dir + "/residuals.csv";
    return paths;
}

namespace {

struct PreparedData {
    Matrix train_features;
    std::vector<int> train_labels;
    Matrix test_features;
    std::vector<int> test_labels;
    std::vector<std::size_t> test_ids;
};

PreparedData prepare_data(const ExperimentConfig& config, std::uint64_t seed) {
    LoadOptions load_opts;
    load_opts.label_column = config.label_column;
    load_opts.binarize_median = config.binarize_median;
    load_opts.delimiter = config.delimiter;
    const Dataset data = load_csv(config.dataset_path, load_opts);

    const SplitResult split = stratified_split(data, config.test_fraction, seed);
    const StandardizeResult standardized =
        standardize(split.train.features, split.test.features);
    const PcaResult reduced =
        pca_reduce(standardized.train, standardized.test, config.n_qubits);

    PreparedData prepared;
    prepared.train_features = reduced.train;
    prepared.train_labels = split.train.labels;
    prepared.test_features = reduced.test;
    prepared.test_labels = split.test.labels;
    prepared.test_ids = split.test.row_ids;
    return prepared;
}

std::vector<PairedObservation> pair_arms(const ArmEvaluation& arm0, const ArmEvaluation& arm1) {
    if (arm0.samples.size() != arm1.samples.size()) {
        throw PairingError("arm evaluations have different sample counts");
    }
    std::vector<PairedObservation> pairs;
    pairs.reserve(arm0.samples.size());
    for (std::size_t i = 0; i < arm0.samples.size(); ++i) {
        const ArmSample& s0 = arm0.samples[i];
        const ArmSample& s1 = arm1.samples[i];
        if (s0.sample_id != s1.sample_id) {
            throw PairingError("arm evaluations disagree on sample order at row " +
                               std::to_string(i));
        }
        PairedObservation obs;
        obs.sample_id = s0.sample_id;
        obs.m0 = s0.mediators;
        obs.m1 = s1.mediators;
        obs.y0 = s0.y_dir;
        obs.y1 = s1.y_dir;
        obs.y_true = s0.y_true;
        pairs.push_back(obs);
    }
    return pairs;
}

} // namespace

SeedRunPaths run_train_stage(const ExperimentConfig& config, std::uint64_t seed,
                             const std::string& out_dir, const PipelineOptions& opts) {
    const SeedRunPaths paths = seed_run_paths(out_dir, seed);
    fs::create_directories(paths.dir);

    const PreparedData data = prepare_data(config, seed);
    const Bipartition part = config.bipartition();

    // Both arms are trained from scratch on their own derived streams; no
    // parameter transfer between t=0 and t=1.
    auto train_arm = [&](int t) {
        const CircuitSpec spec = config.spec_for_arm(t);
        const std::uint64_t arm_seed = derive_seed(
            seed, RngStream::ArmBase, static_cast<std::uint64_t>(t));
        return train(spec, data.train_features, data.train_labels, arm_seed, config.training);
    };

    TrainedModel model0;
    TrainedModel model1;
    if (opts.jobs >= 2) {
        auto future0 = std::async(std::launch::async, train_arm, 0);
        model1 = train_arm(1);
        model0 = future0.get();
    } else {
        model0 = train_arm(0);
        model1 = train_arm(1);
    }
    save_model(paths.model_t0, model0);
    save_model(paths.model_t1, model1);

    const int eval_jobs = std::max(1, opts.jobs);
    const ArmEvaluation eval0 =
        evaluate_arm(model0, data.test_features, data.test_labels, data.test_ids, part, 0,
                     eval_jobs);
    const ArmEvaluation eval1 =
        evaluate_arm(model1, data.test_features, data.test_labels, data.test_ids, part, 1,
                     eval_jobs);
    write_arm_csv(paths.arm_t0_csv, eval0);
    write_arm_csv(paths.arm_t1_csv, eval1);

    write_paired_csv(paths.paired_csv, pair_arms(eval0, eval1));

    // Stash the purity diagnostic for the mediate gate.
    json diag;
    diag["max_s_ab"] = std::max(eval0.max_s_ab, eval1.max_s_ab);
    write_text(paths.dir + "/state_diagnostics.json", diag.dump(2) + "\n");
    return paths;
}

MediationReport run_mediate_stage(const std::string& paired_csv, const SeedRunPaths& paths,
                                  const AnalysisOptions& opts, bool keep_residuals,
                                  double max_s_ab_gate) {
    const std::vector<PairedObservation> pairs = read_paired_csv(paired_csv);
    MediationReport report = analyze_pairs(pairs, opts, fs::path(paths.dir).filename().string());
    report.max_s_ab = max_s_ab_gate;

    if (keep_residuals) {
        const OutcomeFit fit = fit_outcome_model(pairs, opts.basis);
        std::vector<std::vector<std::string>> rows;
        for (std::size_t r = 0; r < fit.residuals.size(); ++r) {
            rows.push_back({std::to_string(pairs[r / 2].sample_id),
                            std::to_string(r % 2),
                            format_double(fit.fitted[r]),
                            format_double(fit.residuals[r])});
        }
        write_csv(paths.residuals_csv, {"sample_id", "t", "fitted", "residual"}, rows);
    }

    write_text(paths.report_json, report_to_json(report));
    write_csv(paths.summary_csv, kSummaryHeader, {summary_row(report)});

    if (report.estimate.eps_rel >= kEpsRelGate) {
        throw NumericGateError("mediate: consistency error eps_rel = " +
                               format_double(report.estimate.eps_rel) + " breaches the " +
                               format_double(kEpsRelGate) + " gate");
    }
    if (!std::isnan(max_s_ab_gate) && max_s_ab_gate >= kPurityGate) {
        throw NumericGateError("mediate: joint entropy max S_AB = " +
                               format_double(max_s_ab_gate) + " breaches the pure-state gate");
    }
    return report;
}

RunManifest run_pipeline(const ExperimentConfig& config, const PipelineOptions& opts) {
    const std::string out_dir = resolve_output_dir(config);
    fs::create_directories(out_dir);

    RunManifest manifest;
    manifest.config_hash = config_hash(config);
    manifest.tool_version = kVersion;

    std::vector<MediationReport> reports;
    std::vector<std::vector<std::string>> summary_rows;

    StageRecord train_stage{"train", 0.0, {}};
    StageRecord evaluate_stage{"evaluate", 0.0, {}};
    StageRecord mediate_stage{"mediate", 0.0, {}};
    StageRecord classify_stage{"classify", 0.0, {}};

    for (const std::uint64_t seed : config.seeds) {
        const auto train_start = std::chrono::steady_clock::now();
        const SeedRunPaths paths = run_train_stage(config, seed, out_dir, opts);
        train_stage.wall_ms += elapsed_ms(train_start);
        train_stage.outputs.push_back(paths.model_t0);
        train_stage.outputs.push_back(paths.model_t1);
        evaluate_stage.outputs.push_back(paths.arm_t0_csv);
        evaluate_stage.outputs.push_back(paths.arm_t1_csv);
        evaluate_stage.outputs.push_back(paths.paired_csv);

        double max_s_ab = std::numeric_limits<double>::quiet_NaN();
        {
            std::ifstream in(paths.dir + "/state_diagnostics.json");
            if (in) {
                json diag;
                in >> diag;
                max_s_ab = diag.value("max_s_ab", max_s_ab);
            }
        }

        const auto mediate_start = std::chrono::steady_clock::now();
        AnalysisOptions analysis;
        analysis.bootstrap_b = config.bootstrap_b;
        analysis.seed = seed;
        analysis.threshold_c = config.threshold_c;
        analysis.threshold_mode = config.threshold_mode;
        analysis.basis = config.basis;
        analysis.jobs = std::max(1, opts.jobs);
        MediationReport report = run_mediate_stage(paths.paired_csv, paths, analysis,
                                                   opts.keep_residuals, max_s_ab);
        report.config_id = config.config_id(seed);
        mediate_stage.wall_ms += elapsed_ms(mediate_start);
        mediate_stage.outputs.push_back(paths.report_json);
        mediate_stage.outputs.push_back(paths.summary_csv);
        manifest.reports.push_back(paths.report_json);

        summary_rows.push_back(summary_row(report));
        summary_rows.back()[0] = report.config_id;
        reports.push_back(std::move(report));
    }

    const auto classify_start = std::chrono::steady_clock::now();
    const std::string summary_path = out_dir + "/summary.csv";
    write_csv(summary_path, kSummaryHeader, summary_rows);

    CsvTable summary_table;
    summary_table.header = kSummaryHeader;
    summary_table.rows = summary_rows;
    const ClassifyResult classified = classify_summary(summary_table, config.threshold_mode);
    std::vector<std::vector<std::string>> classified_rows;
    classified_rows.reserve(classified.rows.size());
    for (const ClassifiedRow& row : classified.rows) {
        classified_rows.push_back(row.cells);
    }
    const std::string classified_path = out_dir + "/classified.csv";
    const std::string histogram_path = out_dir + "/histogram.json";
    write_csv(classified_path, classified.header, classified_rows);
    write_text(histogram_path, histogram_to_json(classified));
    const std::string batch_path = out_dir + "/batch_summary.json";
    write_text(batch_path, batch_summary_to_json(batch_summarize(reports)));
    classify_stage.wall_ms = elapsed_ms(classify_start);
    classify_stage.outputs = {summary_path, classified_path, histogram_path, batch_path};

    manifest.stages = {train_stage, evaluate_stage, mediate_stage, classify_stage};
    manifest.gates_passed = true;
    write_text(out_dir + "/manifest.json", manifest_to_json(manifest));
    return manifest;
}

std::string manifest_to_json(const RunManifest& manifest) {
    json j;
    j["config_hash"] = manifest.config_hash;
    j["tool_version"] = manifest.tool_version;
    j["gates_passed"] = manifest.gates_passed;
    json stages = json::array();
    for (const StageRecord& stage : manifest.stages) {
        json s;
        s["name"] = stage.name;
        s["wall_ms"] = stage.wall_ms;
        s["outputs"] = stage.outputs;
        stages.push_back(s);
    }
    j["stages"] = stages;
    j["reports"] = manifest.reports;
    return j.dump(2) + "\n";
}

ValidationOutput run_validate_stage(const std::string& seed_dir) {
    const std::string residuals_path = seed_dir + "/residuals.csv";
    if (!fs::exists(residuals_path)) {
        throw DataError("no stored residuals in '" + seed_dir +
                        "'; re-run mediate with --keep-residuals");
    }
    const CsvTable table = read_csv(residuals_path);
    const std::size_t col_fitted = table.column("fitted");
    const std::size_t col_resid = table.column("residual");
    const std::size_t col_t = table.column("t");

    std::vector<double> fitted;
    std::vector<double> residuals;
    std::vector<int> arms;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        fitted.push_back(parse_double_cell(table.rows[r][col_fitted], r + 1, "fitted"));
        residuals.push_back(parse_double_cell(table.rows[r][col_resid], r + 1, "residual"));
        arms.push_back(static_cast<int>(parse_double_cell(table.rows[r][col_t], r + 1, "t")));
    }
    if (residuals.size() < 4) {
        throw DataError("validate: too few residuals in '" + residuals_path + "'");
    }

    // Normal-quantile pairs against the standardized residuals.
    const double mu = mean_of(residuals);
    const double sd = sample_sd(residuals);
    std::vector<std::size_t> order(residuals.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return residuals[a] < residuals[b]; });

    std::vector<std::vector<std::string>> rows;
    const auto n = static_cast<double>(residuals.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const std::size_t i = order[rank];
        const double p = (static_cast<double>(rank) + 0.5) / n;
        const double standardized = sd > 0.0 ? (residuals[i] - mu) / sd : 0.0;
        rows.push_back({format_double(fitted[i]), format_double(residuals[i]),
                        std::to_string(arms[i]), format_double(normal_quantile(p)),
                        format_double(standardized)});
    }
    ValidationOutput out;
    out.diagnostics_csv = seed_dir + "/validate_diagnostics.csv";
    write_csv(out.diagnostics_csv,
              {"fitted", "residual", "t", "normal_quantile", "standardized_residual"}, rows);

    // Spread ratio between the upper and lower fitted halves; a funnel
    // pattern (heteroscedasticity) pushes it away from 1.
    std::vector<std::size_t> by_fitted(order.size());
    for (std::size_t i = 0; i < by_fitted.size(); ++i) {
        by_fitted[i] = i;
    }
    std::sort(by_fitted.begin(), by_fitted.end(),
              [&](std::size_t a, std::size_t b) { return fitted[a] < fitted[b]; });
    const std::size_t half = by_fitted.size() / 2;
    std::vector<double> lower;
    std::vector<double> upper;
    for (std::size_t i = 0; i < by_fitted.size(); ++i) {
        (i < half ? lower : upper).push_back(residuals[by_fitted[i]]);
    }
    const double sd_lower = sample_sd(lower);
    const double sd_upper = sample_sd(upper);
    const double ratio = sd_lower > 0.0 ? sd_upper / sd_lower : 0.0;
    const bool funnel = ratio > 1.5 || (ratio > 0.0 && ratio < 1.0 / 1.5);

    std::vector<double> mean_by_arm(2, 0.0);
    std::vector<std::size_t> count_by_arm(2, 0);
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        const auto arm = static_cast<std::size_t>(arms[i]);
        mean_by_arm[arm] += residuals[i];
        ++count_by_arm[arm];
    }
    for (int t = 0; t < 2; ++t) {
        const auto arm = static_cast<std::size_t>(t);
        if (count_by_arm[arm] > 0) {
            mean_by_arm[arm] /= static_cast<double>(count_by_arm[arm]);
        }
    }

    json j;
    j["residual_mean"] = mu;
    j["residual_sd"] = sd;
    j["residual_mean_t0"] = mean_by_arm[0];
    j["residual_mean_t1"] = mean_by_arm[1];
    j["spread_ratio_upper_lower"] = ratio;
    j["funnel_flag"] = funnel;
    out.summary_json = seed_dir + "/validate_summary.json";
    write_text(out.summary_json, j.dump(2) + "\n");
    return out;
}

} // namespace qmediate
