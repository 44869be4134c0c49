#include "qmediate/report.hpp"

#include "qmediate/errors.hpp"
#include "qmediate/rng.hpp"
#include "qmediate/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace qmediate {

using nlohmann::json;

MediationReport analyze_pairs(const std::vector<PairedObservation>& pairs,
                              const AnalysisOptions& opts, const std::string& config_id) {
    MediationReport report;
    report.config_id = config_id;
    report.n_pairs = pairs.size();
    report.estimate = decompose(pairs, opts.basis);
    const OutcomeFit fit = fit_outcome_model(pairs, opts.basis);
    report.inference = cluster_robust_for_fit(fit, pairs.size());
    report.bootstrap = bootstrap_indirect(pairs, opts.bootstrap_b,
                                          derive_seed(opts.seed, RngStream::Bootstrap), opts.basis,
                                          opts.jobs);
    report.interaction = test_interaction(pairs);
    report.threshold_c = opts.threshold_c;
    report.threshold_mode = opts.threshold_mode;
    report.threshold = opts.threshold_override.value_or(intra_threshold(pairs, opts.threshold_c));
    report.mamc_values = mamc(report.estimate);
    report.rqc_values = rqc(report.mamc_values);
    report.regime = classify_regime(report.estimate.tau, report.estimate.nie,
                                    report.estimate.ate_empirical, report.threshold);
    report.max_s_ab = std::numeric_limits<double>::quiet_NaN();

    for (int k = 0; k < kMediatorCount; ++k) {
        double sum = 0.0;
        for (const PairedObservation& obs : pairs) {
            sum += mediator_component(obs.m0, k);
        }
        const double mean = sum / static_cast<double>(pairs.size());
        double ss = 0.0;
        for (const PairedObservation& obs : pairs) {
            const double d = mediator_component(obs.m0, k) - mean;
            ss += d * d;
        }
        report.baseline_mean[static_cast<std::size_t>(k)] = mean;
        report.baseline_sd[static_cast<std::size_t>(k)] =
            pairs.size() > 1 ? std::sqrt(ss / static_cast<double>(pairs.size() - 1)) : 0.0;
    }
    return report;
}

namespace {

json mediator_array(const std::array<double, kMediatorCount>& values) {
    json out = json::object();
    for (int k = 0; k < kMediatorCount; ++k) {
        out[mediator_name(k)] = values[static_cast<std::size_t>(k)];
    }
    return out;
}

} // namespace

std::string report_to_json(const MediationReport& report) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["config_id"] = report.config_id;
    j["n_pairs"] = report.n_pairs;

    json est;
    est["basis"] = to_string(report.estimate.basis);
    est["alpha"] = mediator_array(report.estimate.alpha);
    est["beta"] = mediator_array(report.estimate.beta);
    est["tau0"] = report.estimate.tau0;
    est["tau"] = report.estimate.tau;
    est["ate_empirical"] = report.estimate.ate_empirical;
    est["nde"] = report.estimate.nde;
    est["nie"] = report.estimate.nie;
    est["per_mediator"] = mediator_array(report.estimate.per_mediator);
    est["eps_rel"] = report.estimate.eps_rel;
    json dropped = json::array();
    for (const int k : report.estimate.dropped_mediators) {
        dropped.push_back(mediator_name(k));
    }
    est["dropped_mediators"] = dropped;
    j["estimate"] = est;

    json inference;
    inference["cluster_robust_se"] = json::object();
    const auto& se = report.inference.se;
    if (se.size() >= 2) {
        inference["cluster_robust_se"]["tau0"] = se[0];
        inference["cluster_robust_se"]["tau"] = se[1];
        json beta_se = json::array();
        for (std::size_t i = 2; i < se.size(); ++i) {
            beta_se.push_back(se[i]);
        }
        inference["cluster_robust_se"]["beta"] = beta_se;
    }
    json boot;
    boot["b_requested"] = report.bootstrap.b_requested;
    boot["b_used"] = report.bootstrap.b_used;
    boot["skipped"] = report.bootstrap.skipped;
    boot["skip_warning"] = report.bootstrap.skip_warning;
    json cis = json::object();
    for (int k = 0; k < kMediatorCount; ++k) {
        const auto& ci = report.bootstrap.ci_per_mediator[static_cast<std::size_t>(k)];
        cis[mediator_name(k)] = json::array({ci.first, ci.second});
    }
    boot["ci_per_mediator"] = cis;
    boot["ci_total"] =
        json::array({report.bootstrap.ci_total.first, report.bootstrap.ci_total.second});
    inference["bootstrap"] = boot;
    j["inference"] = inference;

    json diag;
    diag["a1"] = report.a1_code;
    json a2;
    a2["code"] = to_string(report.interaction.code);
    a2["statistic"] = report.interaction.statistic;
    a2["p_value"] = report.interaction.p_value;
    json terms = json::object();
    for (const auto& [k, p] : report.interaction.term_p) {
        terms[std::string("t*") + mediator_name(k)] = p;
    }
    a2["term_p"] = terms;
    diag["a2"] = a2;
    if (std::isnan(report.max_s_ab)) {
        diag["max_s_ab"] = nullptr;
    } else {
        diag["max_s_ab"] = report.max_s_ab;
    }
    diag["baseline_mediators"] = {{"mean", mediator_array(report.baseline_mean)},
                                  {"sd", mediator_array(report.baseline_sd)}};
    j["diagnostics"] = diag;

    json threshold;
    threshold["epsilon"] = report.threshold;
    threshold["c"] = report.threshold_c;
    threshold["mode"] = report.threshold_mode;
    j["threshold"] = threshold;

    j["mamc"] = mediator_array(report.mamc_values);
    if (report.rqc_values.defined) {
        j["rqc"] = mediator_array(report.rqc_values.pct);
    } else {
        j["rqc"] = nullptr; // undefined: every MAMC is zero
    }

    json regime;
    regime["label"] = to_string(report.regime.regime);
    regime["excluded_from_primary"] = report.regime.excluded;
    regime["sign_triple"] = json::array(
        {report.regime.sign_tau, report.regime.sign_indirect, report.regime.sign_total});
    j["regime"] = regime;

    return j.dump(2) + "\n";
}

const std::vector<std::string> kSummaryHeader = {
    "config", "n_pairs", "thr",      "dir",        "ind",    "tot",
    "mamc_s_a", "mamc_gamma_a", "mamc_l_a", "mamc_i_ab", "a1", "a2",
};

std::vector<std::string> summary_row(const MediationReport& report) {
    // Effects and MAMC in percentage points, matching the result-table
    // layout the classifier consumes.
    const double pct = 100.0;
    std::string a2;
    switch (report.interaction.code) {
    case InteractionCode::Pass: a2 = "pass"; break;
    case InteractionCode::Partial: a2 = "partial"; break;
    case InteractionCode::Fail: a2 = "fail"; break;
    case InteractionCode::Untestable: a2 = "na"; break;
    }
    return {
        report.config_id,
        std::to_string(report.n_pairs),
        format_double(report.threshold * pct),
        format_double(report.estimate.tau * pct),
        format_double(report.estimate.nie * pct),
        format_double(report.estimate.ate_empirical * pct),
        format_double(report.mamc_values[0] * pct),
        format_double(report.mamc_values[1] * pct),
        format_double(report.mamc_values[2] * pct),
        format_double(report.mamc_values[3] * pct),
        report.a1_code == "design" ? "pass" : report.a1_code,
        a2,
    };
}

void write_paired_csv(const std::string& path, const std::vector<PairedObservation>& pairs) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(2 * pairs.size());
    for (const PairedObservation& obs : pairs) {
        const MediatorVector* arms[2] = {&obs.m0, &obs.m1};
        const double y[2] = {obs.y0, obs.y1};
        for (int t = 0; t < 2; ++t) {
            rows.push_back({std::to_string(obs.sample_id), std::to_string(t),
                            format_double(arms[t]->s_a), format_double(arms[t]->gamma_a),
                            format_double(arms[t]->l_a), format_double(arms[t]->i_ab),
                            format_double(y[t]), std::to_string(obs.y_true)});
        }
    }
    write_csv(path, {"sample_id", "t", "S_A", "gamma_A", "L_A", "I_AB", "Y_dir", "y_true"}, rows);
}

std::vector<PairedObservation> read_paired_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const std::size_t col_id = table.column("sample_id");
    const std::size_t col_t = table.column("t");
    const std::size_t col_s = table.column("S_A");
    const std::size_t col_g = table.column("gamma_A");
    const std::size_t col_l = table.column("L_A");
    const std::size_t col_i = table.column("I_AB");
    const std::size_t col_y = table.column("Y_dir");
    const std::size_t col_label = table.column("y_true");

    struct ArmRow {
        bool present = false;
        MediatorVector m;
        double y = 0.0;
        int y_true = 0;
    };
    std::map<std::size_t, std::array<ArmRow, 2>> by_sample;
    std::vector<std::size_t> order;

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto sample_id =
            static_cast<std::size_t>(parse_double_cell(row[col_id], r + 1, "sample_id"));
        const int t = static_cast<int>(parse_double_cell(row[col_t], r + 1, "t"));
        if (t != 0 && t != 1) {
            throw IngestError("row " + std::to_string(r + 1) + ": t must be 0 or 1");
        }
        ArmRow arm;
        arm.present = true;
        arm.m.s_a = parse_double_cell(row[col_s], r + 1, "S_A");
        arm.m.gamma_a = parse_double_cell(row[col_g], r + 1, "gamma_A");
        arm.m.l_a = parse_double_cell(row[col_l], r + 1, "L_A");
        arm.m.i_ab = parse_double_cell(row[col_i], r + 1, "I_AB");
        arm.y = parse_double_cell(row[col_y], r + 1, "Y_dir");
        arm.y_true = static_cast<int>(parse_double_cell(row[col_label], r + 1, "y_true"));
        auto [it, inserted] = by_sample.try_emplace(sample_id);
        if (inserted) {
            order.push_back(sample_id);
        }
        if (it->second[static_cast<std::size_t>(t)].present) {
            throw PairingError("sample " + std::to_string(sample_id) + " has duplicate t=" +
                               std::to_string(t) + " rows");
        }
        it->second[static_cast<std::size_t>(t)] = arm;
    }

    std::string missing;
    for (const auto& [sample_id, arms] : by_sample) {
        for (int t = 0; t < 2; ++t) {
            if (!arms[static_cast<std::size_t>(t)].present) {
                if (!missing.empty()) {
                    missing += ", ";
                }
                missing += "sample " + std::to_string(sample_id) + " t=" + std::to_string(t);
            }
        }
    }
    if (!missing.empty()) {
        throw PairingError("unpaired observations, missing arms: " + missing);
    }

    std::vector<PairedObservation> pairs;
    pairs.reserve(order.size());
    for (const std::size_t sample_id : order) {
        const auto& arms = by_sample[sample_id];
        PairedObservation obs;
        obs.sample_id = sample_id;
        obs.m0 = arms[0].m;
        obs.m1 = arms[1].m;
        obs.y0 = arms[0].y;
        obs.y1 = arms[1].y;
        obs.y_true = arms[1].y_true;
        pairs.push_back(obs);
    }
    return pairs;
}

ClassifyResult classify_summary(const CsvTable& table, const std::string& threshold_mode) {
    if (threshold_mode != "per-config" && threshold_mode != "global-max") {
        throw ConfigError("threshold mode must be per-config or global-max, got '" +
                          threshold_mode + "'");
    }
    const std::size_t col_thr = table.column("thr");
    const std::size_t col_dir = table.column("dir");
    const std::size_t col_ind = table.column("ind");
    const std::size_t col_tot = table.column("tot");

    ClassifyResult result;
    result.header = table.header;
    result.header.push_back("regime");
    result.header.push_back("excluded");

    double global_max = 0.0;
    std::vector<std::array<double, 4>> parsed;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const double thr = parse_double_cell(row[col_thr], r + 1, "thr");
        const double dir = parse_double_cell(row[col_dir], r + 1, "dir");
        const double ind = parse_double_cell(row[col_ind], r + 1, "ind");
        const double tot = parse_double_cell(row[col_tot], r + 1, "tot");
        parsed.push_back({thr, dir, ind, tot});
        global_max = std::max(global_max, thr);
    }
    result.global_threshold = global_max;

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& [thr, dir, ind, tot] = parsed[r];
        ClassifiedRow out;
        out.cells = table.rows[r];
        out.threshold_used = threshold_mode == "global-max" ? global_max : thr;
        out.label = classify_regime(dir, ind, tot, out.threshold_used);
        out.cells.push_back(to_string(out.label.regime));
        out.cells.push_back(out.label.excluded ? "yes" : "no");
        result.rows.push_back(out);
        result.histogram[to_string(out.label.regime)] += 1;
    }
    return result;
}

std::string histogram_to_json(const ClassifyResult& result) {
    json j;
    j["n_rows"] = result.rows.size();
    j["global_threshold"] = result.global_threshold;
    json counts = json::object();
    json pct = json::object();
    for (const auto& [regime, count] : result.histogram) {
        counts[regime] = count;
        pct[regime] = result.rows.empty()
                          ? 0.0
                          : 100.0 * count / static_cast<double>(result.rows.size());
    }
    j["counts"] = counts;
    j["percent"] = pct;
    return j.dump(2) + "\n";
}

BatchSummary batch_summarize(const std::vector<MediationReport>& reports) {
    BatchSummary summary;
    summary.n_configurations = static_cast<int>(reports.size());
    double dir_sum = 0.0;
    double ind_sum = 0.0;
    double dir_sum_validated = 0.0;
    double ind_sum_validated = 0.0;
    for (const MediationReport& report : reports) {
        summary.regime_histogram[to_string(report.regime.regime)] += 1;
        dir_sum += std::abs(report.estimate.tau);
        ind_sum += std::abs(report.estimate.nie);
        const bool a2_ok = report.interaction.code == InteractionCode::Pass;
        if (report.a1_code == "design" && a2_ok) {
            ++summary.n_validated;
            dir_sum_validated += std::abs(report.estimate.tau);
            ind_sum_validated += std::abs(report.estimate.nie);
        }
    }
    if (!reports.empty()) {
        summary.mean_abs_direct = dir_sum / static_cast<double>(reports.size());
        summary.mean_abs_indirect = ind_sum / static_cast<double>(reports.size());
        if (summary.mean_abs_indirect > 0.0) {
            summary.direct_indirect_ratio = summary.mean_abs_direct / summary.mean_abs_indirect;
        }
    }
    if (summary.n_validated > 0) {
        summary.validated_mean_abs_direct =
            dir_sum_validated / static_cast<double>(summary.n_validated);
        summary.validated_mean_abs_indirect =
            ind_sum_validated / static_cast<double>(summary.n_validated);
    }
    summary.no_validated_configurations = summary.n_validated == 0;

    // Cross-run balance of baseline mediators: the largest standardized
    // mean difference over report pairs and mediators.
    if (reports.size() >= 2) {
        summary.a1_proxy_defined = true;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            for (std::size_t j = i + 1; j < reports.size(); ++j) {
                for (int k = 0; k < kMediatorCount; ++k) {
                    const auto ks = static_cast<std::size_t>(k);
                    const double sd_i = reports[i].baseline_sd[ks];
                    const double sd_j = reports[j].baseline_sd[ks];
                    const double pooled = std::sqrt(0.5 * (sd_i * sd_i + sd_j * sd_j));
                    if (pooled <= 0.0) {
                        continue;
                    }
                    const double diff =
                        std::abs(reports[i].baseline_mean[ks] - reports[j].baseline_mean[ks]);
                    summary.a1_balance_proxy =
                        std::max(summary.a1_balance_proxy, diff / pooled);
                }
            }
        }
    }
    return summary;
}

std::string batch_summary_to_json(const BatchSummary& summary) {
    json j;
    j["n_configurations"] = summary.n_configurations;
    j["n_validated"] = summary.n_validated;
    j["no_validated_configurations"] = summary.no_validated_configurations;
    json hist = json::object();
    for (const auto& [regime, count] : summary.regime_histogram) {
        hist[regime] = count;
    }
    j["regime_histogram"] = hist;
    j["mean_abs_direct"] = summary.mean_abs_direct;
    j["mean_abs_indirect"] = summary.mean_abs_indirect;
    j["direct_indirect_ratio"] = summary.direct_indirect_ratio;
    j["validated_mean_abs_direct"] = summary.validated_mean_abs_direct;
    j["validated_mean_abs_indirect"] = summary.validated_mean_abs_indirect;
    if (summary.a1_proxy_defined) {
        j["a1_balance_proxy"] = summary.a1_balance_proxy;
    } else {
        j["a1_balance_proxy"] = nullptr;
    }
    return j.dump(2) + "\n";
}

} // namespace qmediate
