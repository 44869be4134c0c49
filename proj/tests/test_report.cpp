#include "helpers.hpp"

#include "qmediate/errors.hpp"
#include "qmediate/report.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace qmediate;
using testutil::SemTruth;
using testutil::generate_sem_pairs;

namespace {

const std::string kFixtureDir = QMEDIATE_TEST_DATA_DIR;

std::vector<PairedObservation> noisy_pairs(std::uint64_t seed, std::size_t n = 40) {
    Rng rng(seed);
    SemTruth truth;
    truth.shared_m_sd = 0.08;
    truth.arm_m_sd = 0.03;
    truth.arm_y_sd = 0.02;
    return generate_sem_pairs(truth, n, rng);
}

} // namespace

TEST_CASE("classifying the archived validated table rows") {
    const CsvTable table = read_csv(kFixtureDir + "/reference_validated_rows.csv");
    REQUIRE(table.rows.size() == 43);

    const ClassifyResult result = classify_summary(table, "per-config");
    CHECK(result.histogram.at("neutral") == 40);
    CHECK(result.histogram.at("classical-scalable") == 3);
    CHECK(result.histogram.size() == 2);
    CHECK(result.global_threshold == doctest::Approx(10.6));

    // Distribution: 93.0% / 7.0% to one decimal.
    const double neutral_pct = 100.0 * 40 / 43.0;
    const double scalable_pct = 100.0 * 3 / 43.0;
    CHECK(std::round(neutral_pct * 10) / 10 == doctest::Approx(93.0));
    CHECK(std::round(scalable_pct * 10) / 10 == doctest::Approx(7.0));

    // Per-row labels agree with an independent sign-rule evaluation.
    const std::size_t col_thr = table.column("thr");
    const std::size_t col_dir = table.column("dir");
    const std::size_t col_ind = table.column("ind");
    const std::size_t col_tot = table.column("tot");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const double thr = std::stod(table.rows[r][col_thr]);
        const double dir = std::stod(table.rows[r][col_dir]);
        const double ind = std::stod(table.rows[r][col_ind]);
        const double tot = std::stod(table.rows[r][col_tot]);
        auto sgn = [thr](double v) { return v > thr ? 1 : (v < -thr ? -1 : 0); };
        const std::string expected =
            (sgn(dir) == 1 && sgn(ind) == 0 && sgn(tot) == 1) ? "classical-scalable" : "neutral";
        CHECK(result.rows[r].cells.back() == "no"); // none excluded
        CHECK(result.rows[r].cells[result.rows[r].cells.size() - 2] == expected);
    }
}

TEST_CASE("global-max mode applies one threshold everywhere") {
    const CsvTable table = read_csv(kFixtureDir + "/reference_validated_rows.csv");
    const ClassifyResult result = classify_summary(table, "global-max");
    for (const ClassifiedRow& row : result.rows) {
        CHECK(row.threshold_used == doctest::Approx(10.6));
    }
    // Under the single 10.6 threshold only the two largest direct effects
    // stay significant.
    CHECK(result.histogram.at("classical-scalable") == 2);
    CHECK(result.histogram.at("neutral") == 41);

    CHECK_THROWS_AS(classify_summary(table, "bogus"), ConfigError);

    CsvTable missing;
    missing.header = {"dir", "ind", "tot"};
    missing.rows = {{"1", "2", "3"}};
    CHECK_THROWS_AS(classify_summary(missing, "per-config"), IngestError);
}

TEST_CASE("analyze_pairs assembles a full report") {
    const auto pairs = noisy_pairs(21);
    AnalysisOptions opts;
    opts.bootstrap_b = 200;
    opts.seed = 42;
    const MediationReport report = analyze_pairs(pairs, opts, "sem_fixture");

    CHECK(report.n_pairs == pairs.size());
    CHECK(report.estimate.eps_rel < 1e-10);
    CHECK(report.threshold > 0.0);
    CHECK(report.a1_code == "design");
    CHECK(report.bootstrap.b_requested == 200);
    CHECK(report.inference.se.size() == 4); // 1, t, S_A, gamma_A

    const std::string text = report_to_json(report);
    const nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j.at("config_id") == "sem_fixture");
    CHECK(j.at("estimate").at("basis") == "reduced");
    CHECK(j.at("estimate").at("alpha").contains("S_A"));
    CHECK(j.at("regime").contains("label"));
    CHECK(j.at("inference").at("bootstrap").at("ci_total").size() == 2);
    CHECK(j.at("diagnostics").at("a2").contains("code"));
    // RQC defined here because planted products are nonzero.
    CHECK_FALSE(j.at("rqc").is_null());

    // Identical inputs and options serialize identically (determinism).
    const MediationReport again = analyze_pairs(pairs, opts, "sem_fixture");
    CHECK(report_to_json(again) == text);
}

TEST_CASE("summary rows carry percentage-point effects") {
    const auto pairs = noisy_pairs(22);
    AnalysisOptions opts;
    opts.bootstrap_b = 100;
    const MediationReport report = analyze_pairs(pairs, opts, "cfg");
    const std::vector<std::string> row = summary_row(report);
    REQUIRE(row.size() == kSummaryHeader.size());
    CHECK(row[0] == "cfg");
    CHECK(std::stod(row[2]) == doctest::Approx(report.threshold * 100.0));
    CHECK(std::stod(row[3]) == doctest::Approx(report.estimate.tau * 100.0));
    CHECK(std::stod(row[4]) == doctest::Approx(report.estimate.nie * 100.0));
    CHECK(std::stod(row[5]) == doctest::Approx(report.estimate.ate_empirical * 100.0));
    CHECK(row[10] == "pass");
}

TEST_CASE("paired CSV round-trips and rejects missing arms") {
    const auto pairs = noisy_pairs(23, 12);
    const std::string path =
        (std::filesystem::temp_directory_path() / "qmediate_paired_roundtrip.csv").string();
    write_paired_csv(path, pairs);
    const auto loaded = read_paired_csv(path);
    REQUIRE(loaded.size() == pairs.size());
    for (std::size_t s = 0; s < pairs.size(); ++s) {
        CHECK(loaded[s].sample_id == pairs[s].sample_id);
        // Shortest round-trip formatting parses back to the exact value.
        CHECK(loaded[s].m0.s_a == pairs[s].m0.s_a);
        CHECK(loaded[s].m1.i_ab == pairs[s].m1.i_ab);
        CHECK(loaded[s].y0 == pairs[s].y0);
        CHECK(loaded[s].y1 == pairs[s].y1);
    }
    std::remove(path.c_str());

    const std::string broken =
        (std::filesystem::temp_directory_path() / "qmediate_paired_broken.csv").string();
    {
        std::ofstream out(broken);
        out << "sample_id,t,S_A,gamma_A,L_A,I_AB,Y_dir,y_true\n";
        out << "0,0,0.1,0.9,0.1,0.2,0.5,1\n";
        out << "0,1,0.2,0.8,0.2,0.4,0.6,1\n";
        out << "1,0,0.1,0.9,0.1,0.2,0.5,0\n"; // sample 1 missing t=1
    }
    try {
        read_paired_csv(broken);
        FAIL("expected PairingError");
    } catch (const PairingError& err) {
        const std::string what = err.what();
        CHECK(what.find("sample 1") != std::string::npos);
        CHECK(what.find("t=1") != std::string::npos);
    }
    std::remove(broken.c_str());
}

TEST_CASE("batch summary aggregates regimes and effect magnitudes") {
    std::vector<MediationReport> reports;
    for (const std::uint64_t seed : {31, 32, 33}) {
        AnalysisOptions opts;
        opts.bootstrap_b = 50;
        opts.seed = seed;
        reports.push_back(analyze_pairs(noisy_pairs(seed), opts, "cfg" + std::to_string(seed)));
    }
    const BatchSummary summary = batch_summarize(reports);
    CHECK(summary.n_configurations == 3);
    int total = 0;
    for (const auto& [regime, count] : summary.regime_histogram) {
        total += count;
    }
    CHECK(total == 3);
    CHECK(summary.mean_abs_direct > 0.0);
    if (summary.mean_abs_indirect > 0.0) {
        CHECK(summary.direct_indirect_ratio ==
              doctest::Approx(summary.mean_abs_direct / summary.mean_abs_indirect));
    }

    const BatchSummary empty = batch_summarize({});
    CHECK(empty.no_validated_configurations);

    const std::string json_text = batch_summary_to_json(summary);
    CHECK(nlohmann::json::parse(json_text).at("n_configurations") == 3);
}

TEST_CASE("single-row histogram") {
    CsvTable table;
    table.header = {"thr", "dir", "ind", "tot"};
    table.rows = {{"1.0", "5.0", "3.0", "8.0"}};
    const ClassifyResult result = classify_summary(table, "per-config");
    CHECK(result.histogram.size() == 1);
    CHECK(result.histogram.at("quantum-advantage") == 1);
    const nlohmann::json j = nlohmann::json::parse(histogram_to_json(result));
    CHECK(j.at("counts").at("quantum-advantage") == 1);
    CHECK(j.at("percent").at("quantum-advantage") == doctest::Approx(100.0));
}
