#pragma once

#include "qmediate/linalg.hpp"
#include "qmediate/qinfo.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qmediate {

inline constexpr int kMediatorCount = 4;

/// Canonical mediator order: S_A, gamma_A, L_A, I_AB.
const char* mediator_name(int k);
double mediator_component(const MediatorVector& m, int k);

/// Both arms of one test sample.
struct PairedObservation {
    std::size_t sample_id = 0;
    MediatorVector m0;
    MediatorVector m1;
    double y0 = 0.0;
    double y1 = 0.0;
    int y_true = 0;
};

/// For pure states the four mediators span a rank-2 space (I = 2 S_A,
/// L = 1 - gamma_A), so the full-basis outcome regression is singular.
/// Reduced mode (default) regresses on (S_A, gamma_A) and reports composite
/// coefficients in those slots; FullPseudo keeps all four columns and takes
/// the minimum-norm solution. The total indirect effect is invariant to the
/// choice.
enum class BasisMode { Reduced, FullPseudo };

std::string to_string(BasisMode mode);
BasisMode basis_mode_from_string(const std::string& name);

/// Componentwise mean of M_{s,1} - M_{s,0}.
std::array<double, kMediatorCount> estimate_alpha(const std::vector<PairedObservation>& pairs);

struct OutcomeFit {
    double tau0 = 0.0;
    double tau = 0.0;
    std::array<double, kMediatorCount> beta{}; // zeros in unused slots
    std::vector<int> mediator_columns;         // mediator indices kept in the design
    std::vector<int> dropped_mediators;        // constant or collinear, excluded
    BasisMode basis = BasisMode::Reduced;
    Matrix design;                 // rows: (sample 0, t=0), (sample 0, t=1), ...
    std::vector<double> residuals; // same row order
    std::vector<double> fitted;
};

/// Pooled OLS of Y on [1, t, mediators] over the 2N rows, via pivoted normal
/// equations. Mediator columns with near-zero variance (or that the pivoting
/// flags as collinear) are dropped with their indices recorded; a deficient
/// intercept/treatment column is a SingularDesignError.
OutcomeFit fit_outcome_model(const std::vector<PairedObservation>& pairs,
                             BasisMode basis = BasisMode::Reduced);

struct SemEstimate {
    std::array<double, kMediatorCount> alpha{};
    double tau0 = 0.0;
    double tau = 0.0;
    std::array<double, kMediatorCount> beta{};
    double ate_empirical = 0.0;
    double nde = 0.0;
    double nie = 0.0;
    std::array<double, kMediatorCount> per_mediator{}; // alpha_k * beta_k
    double eps_rel = 0.0;
    BasisMode basis = BasisMode::Reduced;
    std::vector<int> dropped_mediators;
};

SemEstimate decompose(const std::vector<PairedObservation>& pairs,
                      BasisMode basis = BasisMode::Reduced);

/// |ATE - (tau + beta.alpha)| / (|ATE| + 1e-12).
double consistency_error(const SemEstimate& est);

struct ClusterRobust {
    Matrix covariance;      // fit column order: 1, t, mediators...
    std::vector<double> se; // sqrt of the diagonal
};

/// Eicker-Huber-White sandwich with one cluster per sample (its two rows).
ClusterRobust cluster_robust_variance(const Matrix& design, const std::vector<double>& residuals,
                                      const std::vector<std::size_t>& cluster_of_row);

ClusterRobust cluster_robust_for_fit(const OutcomeFit& fit, std::size_t n_pairs);

struct BootstrapResult {
    int b_requested = 0;
    int b_used = 0;
    int skipped = 0;
    bool skip_warning = false; // more than 5% of resamples were singular
    std::array<std::pair<double, double>, kMediatorCount> ci_per_mediator{};
    std::pair<double, double> ci_total{0.0, 0.0};
};

/// Percentile bootstrap over complete sample pairs. Replicate b draws its
/// own stream derived from (seed, b), so results do not depend on `jobs`.
BootstrapResult bootstrap_indirect(const std::vector<PairedObservation>& pairs, int b_resamples,
                                   std::uint64_t seed, BasisMode basis = BasisMode::Reduced,
                                   int jobs = 1);

/// Deterministic pair resample used by the bootstrap; exposed so the pairing
/// contract is directly testable.
std::vector<PairedObservation> resample_pairs(const std::vector<PairedObservation>& pairs,
                                              std::uint64_t replicate_seed);

enum class InteractionCode { Pass, Partial, Fail, Untestable };

std::string to_string(InteractionCode code);

struct InteractionTest {
    InteractionCode code = InteractionCode::Untestable;
    double statistic = 0.0;
    double p_value = 1.0;
    std::vector<std::pair<int, double>> term_p; // (mediator index, t-test p)
};

/// F-test of the treatment-by-mediator interaction block added to the
/// outcome model (the Gaussian likelihood-ratio test). Pass when the joint
/// p >= 0.05; Partial when the joint test passes but a single term fails;
/// Untestable when no mediator varies.
InteractionTest test_interaction(const std::vector<PairedObservation>& pairs);

/// |alpha_k beta_k| per mediator.
std::array<double, kMediatorCount> mamc(const SemEstimate& est);

struct RqcResult {
    bool defined = false; // false when every MAMC is zero
    std::array<double, kMediatorCount> pct{};
};

/// Share of each mediator in the total mediated magnitude, in percent.
RqcResult rqc(const std::array<double, kMediatorCount>& mamc_values);

/// epsilon_intra = c * SD(Y_{s,1} - Y_{s,0}), n-1 denominator.
double intra_threshold(const std::vector<PairedObservation>& pairs, double c = 0.5);

enum class Regime {
    QuantumAdvantage,
    MaskedQuantum,
    DoubleDetrimental,
    ClassicalDominated,
    Neutral,
    Compensatory,
    ClassicalScalable,
    QuantumIdle,             // excluded from primary analysis
    ArchitectureDeleterious, // excluded from primary analysis
    Unclassified,
};

std::string to_string(Regime r);
Regime regime_from_string(const std::string& name);

struct RegimeLabel {
    Regime regime = Regime::Unclassified;
    // Thresholded signs of (tau, sum alpha_k beta_k, delta Y): -1, 0, +1,
    // where 0 means within [-epsilon, +epsilon] inclusive.
    int sign_tau = 0;
    int sign_indirect = 0;
    int sign_total = 0;
    bool excluded = false;
};

/// Maps the thresholded sign triple to its regime; triples outside the nine
/// named regions come back Unclassified with the triple attached.
RegimeLabel classify_regime(double tau, double nie, double ate, double epsilon);

} // namespace qmediate
