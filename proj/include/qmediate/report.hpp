#pragma once

#include "qmediate/csv.hpp"
#include "qmediate/mediation.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qmediate {

struct AnalysisOptions {
    int bootstrap_b = 2000;
    std::uint64_t seed = 42; // master seed; the bootstrap derives its stream
    double threshold_c = 0.5;
    std::string threshold_mode = "per-config"; // or "global-max"
    BasisMode basis = BasisMode::Reduced;
    int jobs = 1;
    std::optional<double> threshold_override; // used by global-max batch passes
};

/// Everything the mediation stage reports for one configuration.
struct MediationReport {
    std::string config_id;
    std::size_t n_pairs = 0;
    SemEstimate estimate;
    ClusterRobust inference; // columns: 1, t, kept mediators
    BootstrapResult bootstrap;
    InteractionTest interaction;
    double threshold = 0.0; // epsilon actually applied
    double threshold_c = 0.5;
    std::string threshold_mode = "per-config";
    std::array<double, kMediatorCount> mamc_values{};
    RqcResult rqc_values;
    RegimeLabel regime;
    std::string a1_code = "design"; // satisfied by construction of the paired design
    double max_s_ab = 0.0;          // NaN when the input came from a CSV without states
    // Baseline (t=0) mediator statistics; feeds the optional cross-seed
    // balance proxy that accompanies, but never gates, the A1 code.
    std::array<double, kMediatorCount> baseline_mean{};
    std::array<double, kMediatorCount> baseline_sd{};
};

MediationReport analyze_pairs(const std::vector<PairedObservation>& pairs,
                              const AnalysisOptions& opts, const std::string& config_id = "");

std::string report_to_json(const MediationReport& report);

/// Summary CSV layout mirrors the per-configuration result tables:
/// identification columns, then thr,dir,ind,tot (percentage points),
/// mamc_s_a..mamc_i_ab (percentage points), a1,a2.
extern const std::vector<std::string> kSummaryHeader;
std::vector<std::string> summary_row(const MediationReport& report);

// Paired-observation CSV: sample_id,t,S_A,gamma_A,L_A,I_AB,Y_dir,y_true.
void write_paired_csv(const std::string& path, const std::vector<PairedObservation>& pairs);
std::vector<PairedObservation> read_paired_csv(const std::string& path);

struct ClassifiedRow {
    std::vector<std::string> cells; // original row
    RegimeLabel label;
    double threshold_used = 0.0;
};

struct ClassifyResult {
    std::vector<std::string> header; // original + regime,excluded
    std::vector<ClassifiedRow> rows;
    std::map<std::string, int> histogram;
    double global_threshold = 0.0;
};

/// Regime per summary row from its thr/dir/ind/tot columns. "global-max"
/// applies the maximum threshold across rows to every row.
ClassifyResult classify_summary(const CsvTable& table, const std::string& threshold_mode);

std::string histogram_to_json(const ClassifyResult& result);

struct BatchSummary {
    int n_configurations = 0;
    int n_validated = 0; // A1 and A2 both pass
    std::map<std::string, int> regime_histogram;
    double mean_abs_direct = 0.0;
    double mean_abs_indirect = 0.0;
    double direct_indirect_ratio = 0.0; // mean|dir| / mean|ind|, 0 when undefined
    double validated_mean_abs_direct = 0.0;
    double validated_mean_abs_indirect = 0.0;
    bool no_validated_configurations = false;
    // Largest standardized difference of baseline mediator means across the
    // batch (diagnostic only; A1 holds by design in the paired setup).
    double a1_balance_proxy = 0.0;
    bool a1_proxy_defined = false;
};

BatchSummary batch_summarize(const std::vector<MediationReport>& reports);
std::string batch_summary_to_json(const BatchSummary& summary);

} // namespace qmediate
