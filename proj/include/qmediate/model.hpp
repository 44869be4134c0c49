#pragma once

#include "qmediate/circuit.hpp"
#include "qmediate/dataset.hpp"
#include "qmediate/qinfo.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qmediate {

struct TrainOptions {
    double learning_rate = 0.005;
    int batch_size = 16;
    int epochs = 50;
    double validation_fraction = 0.3;
    bool select_best_epoch = false; // default: fixed-epoch parameters
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainedModel {
    CircuitSpec spec;
    ParameterTensor theta_star;
    std::vector<EpochStats> history;
    std::uint64_t seed = 0;
    int selected_epoch = 0; // 1-based; last epoch unless best-epoch selection
};

/// N(0, 0.01^2) draws from the ParamInit stream, in flat tensor order.
ParameterTensor initial_parameters(const CircuitSpec& spec, std::uint64_t seed);

/// p = (1 - <Z_0>)/2 on the encode -> ansatz state.
double predict_prob(const CircuitSpec& spec, const ParameterTensor& theta,
                    const std::vector<double>& x);
double predict_prob(const TrainedModel& model, const std::vector<double>& x);

/// Mean binary cross-entropy with natural log; probabilities are clipped to
/// [1e-10, 1 - 1e-10] before the log.
double bce_loss(const std::vector<double>& probs, const std::vector<int>& labels);

/// Gradient of the minibatch BCE loss by the parameter-shift rule:
/// d<Z0>/dtheta_j = (<Z0>(theta_j + pi/2) - <Z0>(theta_j - pi/2)) / 2,
/// chained through p and the loss analytically. Exact for Pauli rotations.
ParameterTensor parameter_shift_gradient(const CircuitSpec& spec, const ParameterTensor& theta,
                                         const Matrix& features, const std::vector<int>& labels,
                                         std::span<const std::size_t> rows);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
};

void adam_step(ParameterTensor& theta, const ParameterTensor& grad, AdamState& state,
               double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
               double epsilon = 1e-8);

/// Minibatch Adam over a fixed epoch count. The training split is further
/// divided 70/30 into train/validation (stratified, ValidationSplit stream);
/// shuffling uses the Shuffle stream. Deterministic for a given seed.
TrainedModel train(const CircuitSpec& spec, const Matrix& features, const std::vector<int>& labels,
                   std::uint64_t seed, const TrainOptions& opts = {});

struct ArmSample {
    std::size_t sample_id = 0;
    double p = 0.0;
    double y_dir = 0.0; // p when y=1, 1-p when y=0
    int y_true = 0;
    MediatorVector mediators;
};

struct ArmEvaluation {
    int t = 0;
    std::vector<ArmSample> samples; // ordered by position in the test split
    double max_s_ab = 0.0;          // worst pure-state diagnostic seen
};

/// Per-sample probabilities, directional outcomes and mediators on the test
/// split. Sample order is independent of `jobs`.
ArmEvaluation evaluate_arm(const TrainedModel& model, const Matrix& test_features,
                           const std::vector<int>& test_labels,
                           const std::vector<std::size_t>& sample_ids, const Bipartition& part,
                           int t, int jobs = 1);

// Versioned text artifact round-trip.
void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

// Arm CSV: sample_id,t,S_A,gamma_A,L_A,I_AB,p,Y_dir,y_true
void write_arm_csv(const std::string& path, const ArmEvaluation& eval);

} // namespace qmediate
