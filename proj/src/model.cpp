#include "qmediate/model.hpp"

#include "qmediate/csv.hpp"
#include "qmediate/errors.hpp"
#include "qmediate/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qmediate {

namespace {

constexpr double kProbClip = 1e-10;

double clip_prob(double p) {
    return std::min(std::max(p, kProbClip), 1.0 - kProbClip);
}

std::vector<double> feature_row(const Matrix& features, std::size_t row) {
    std::vector<double> x(features.cols());
    for (std::size_t c = 0; c < features.cols(); ++c) {
        x[c] = features.at(row, c);
    }
    return x;
}

double z0_for(const CircuitSpec& spec, const ParameterTensor& theta,
              const std::vector<double>& x) {
    Statevector state = encode_features(x);
    apply_ansatz(state, spec, theta);
    return state.expectation_z0();
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    const auto workers = static_cast<std::size_t>(jobs);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < count; i += workers) {
                body(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace

ParameterTensor initial_parameters(const CircuitSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng = make_stream(seed, RngStream::ParamInit);
    std::vector<double> values(static_cast<std::size_t>(spec.parameter_count()));
    for (double& v : values) {
        v = rng.normal(0.0, 0.01);
    }
    return ParameterTensor(spec.n_layers, spec.n_qubits, spec.rotation_count(),
                           std::move(values));
}

double predict_prob(const CircuitSpec& spec, const ParameterTensor& theta,
                    const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != spec.n_qubits) {
        throw std::invalid_argument("predict_prob: expected " + std::to_string(spec.n_qubits) +
                                    " features, got " + std::to_string(x.size()));
    }
    const double z = z0_for(spec, theta, x);
    double p = 0.5 * (1.0 - z);
    // z is in [-1, 1] up to rounding; keep p inside its contract.
    return std::min(std::max(p, 0.0), 1.0);
}

double predict_prob(const TrainedModel& model, const std::vector<double>& x) {
    return predict_prob(model.spec, model.theta_star, x);
}

double bce_loss(const std::vector<double>& probs, const std::vector<int>& labels) {
    if (probs.size() != labels.size()) {
        throw std::invalid_argument("bce_loss: probs and labels length mismatch");
    }
    if (probs.empty()) {
        throw std::invalid_argument("bce_loss: empty input");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = clip_prob(probs[i]);
        sum += labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    return sum / static_cast<double>(probs.size());
}

ParameterTensor parameter_shift_gradient(const CircuitSpec& spec, const ParameterTensor& theta,
                                         const Matrix& features, const std::vector<int>& labels,
                                         std::span<const std::size_t> rows) {
    if (!theta.matches(spec)) {
        throw std::invalid_argument("parameter_shift_gradient: theta shape mismatch");
    }
    if (rows.empty()) {
        throw std::invalid_argument("parameter_shift_gradient: empty batch");
    }
    ParameterTensor grad = ParameterTensor::zeros(spec);
    ParameterTensor shifted = theta;
    const double half_pi = std::numbers::pi / 2.0;
    const double inv_batch = 1.0 / static_cast<double>(rows.size());

    for (const std::size_t row : rows) {
        const std::vector<double> x = feature_row(features, row);
        const double p = clip_prob(0.5 * (1.0 - z0_for(spec, theta, x)));
        const int y = labels[row];
        // dL/dp for this sample's term of the mean loss, then through
        // p = (1 - z)/2.
        const double dl_dp = (y == 1 ? -1.0 / p : 1.0 / (1.0 - p)) * inv_batch;
        const double dp_dz = -0.5;
        for (std::size_t j = 0; j < shifted.size(); ++j) {
            const double saved = shifted.values()[j];
            shifted.values()[j] = saved + half_pi;
            const double z_plus = z0_for(spec, shifted, x);
            shifted.values()[j] = saved - half_pi;
            const double z_minus = z0_for(spec, shifted, x);
            shifted.values()[j] = saved;
            const double dz = 0.5 * (z_plus - z_minus);
            grad.values()[j] += dl_dp * dp_dz * dz;
        }
    }
    return grad;
}

void adam_step(ParameterTensor& theta, const ParameterTensor& grad, AdamState& state,
               double learning_rate, double beta1, double beta2, double epsilon) {
    if (theta.size() != grad.size()) {
        throw std::invalid_argument("adam_step: theta and gradient shape mismatch");
    }
    if (state.m.empty()) {
        state.m.assign(theta.size(), 0.0);
        state.v.assign(theta.size(), 0.0);
        state.step = 0;
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const double g = grad.values()[j];
        state.m[j] = beta1 * state.m[j] + (1.0 - beta1) * g;
        state.v[j] = beta2 * state.v[j] + (1.0 - beta2) * g * g;
        const double m_hat = state.m[j] / bc1;
        const double v_hat = state.v[j] / bc2;
        theta.values()[j] -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon);
    }
}

namespace {

double dataset_loss(const CircuitSpec& spec, const ParameterTensor& theta, const Matrix& features,
                    const std::vector<int>& labels, const std::vector<std::size_t>& rows) {
    std::vector<double> probs;
    std::vector<int> ys;
    probs.reserve(rows.size());
    ys.reserve(rows.size());
    for (const std::size_t r : rows) {
        probs.push_back(0.5 * (1.0 - z0_for(spec, theta, feature_row(features, r))));
        ys.push_back(labels[r]);
    }
    return bce_loss(probs, ys);
}

} // namespace

TrainedModel train(const CircuitSpec& spec, const Matrix& features, const std::vector<int>& labels,
                   std::uint64_t seed, const TrainOptions& opts) {
    spec.validate();
    if (features.rows() != labels.size()) {
        throw std::invalid_argument("train: features and labels length mismatch");
    }
    if (static_cast<int>(features.cols()) != spec.n_qubits) {
        throw std::invalid_argument("train: expected " + std::to_string(spec.n_qubits) +
                                    " features per sample, got " +
                                    std::to_string(features.cols()));
    }
    if (opts.epochs < 1 || opts.batch_size < 1) {
        throw std::invalid_argument("train: epochs and batch_size must be positive");
    }

    Rng val_rng = make_stream(seed, RngStream::ValidationSplit);
    const IndexSplit split = stratified_index_split(labels, opts.validation_fraction, val_rng);
    const std::vector<std::size_t>& train_rows = split.rest;
    const std::vector<std::size_t>& val_rows = split.held;

    TrainedModel model;
    model.spec = spec;
    model.seed = seed;
    model.theta_star = initial_parameters(spec, seed);

    AdamState adam;
    Rng shuffle_rng = make_stream(seed, RngStream::Shuffle);
    std::vector<std::size_t> order = train_rows;

    ParameterTensor best_theta = model.theta_star;
    double best_val = std::numeric_limits<double>::infinity();
    int best_epoch = 0;

    for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(opts.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(opts.batch_size));
            const std::span<const std::size_t> batch(order.data() + start, stop - start);
            const ParameterTensor grad =
                parameter_shift_gradient(spec, model.theta_star, features, labels, batch);
            adam_step(model.theta_star, grad, adam, opts.learning_rate);
        }
        EpochStats stats;
        stats.train_loss = dataset_loss(spec, model.theta_star, features, labels, train_rows);
        stats.val_loss = dataset_loss(spec, model.theta_star, features, labels, val_rows);
        model.history.push_back(stats);
        if (stats.val_loss < best_val) {
            best_val = stats.val_loss;
            best_theta = model.theta_star;
            best_epoch = epoch;
        }
    }

    if (opts.select_best_epoch) {
        model.theta_star = best_theta;
        model.selected_epoch = best_epoch;
    } else {
        model.selected_epoch = opts.epochs;
    }
    return model;
}

ArmEvaluation evaluate_arm(const TrainedModel& model, const Matrix& test_features,
                           const std::vector<int>& test_labels,
                           const std::vector<std::size_t>& sample_ids, const Bipartition& part,
                           int t, int jobs) {
    if (test_features.rows() != test_labels.size() ||
        test_features.rows() != sample_ids.size()) {
        throw std::invalid_argument("evaluate_arm: test split size mismatch");
    }
    ArmEvaluation eval;
    eval.t = t;
    eval.samples.resize(test_features.rows());
    std::vector<double> s_ab(test_features.rows(), 0.0);

    parallel_for(test_features.rows(), jobs, [&](std::size_t i) {
        const std::vector<double> x = feature_row(test_features, i);
        Statevector state = encode_features(x);
        apply_ansatz(state, model.spec, model.theta_star);

        ArmSample sample;
        sample.sample_id = sample_ids[i];
        sample.y_true = test_labels[i];
        double p = 0.5 * (1.0 - state.expectation_z0());
        p = std::min(std::max(p, 0.0), 1.0);
        sample.p = p;
        sample.y_dir = sample.y_true == 1 ? p : 1.0 - p;

        const MediatorResult mediators = compute_mediators(state, part);
        sample.mediators = mediators.m;
        s_ab[i] = mediators.s_ab;
        eval.samples[i] = sample;
    });

    eval.max_s_ab = 0.0;
    for (const double v : s_ab) {
        eval.max_s_ab = std::max(eval.max_s_ab, v);
    }
    return eval;
}

void save_model(const std::string& path, const TrainedModel& model) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write model file '" + path + "'");
    }
    out << "qmediate-model 1\n";
    out << "topology " << to_string(model.spec.topology) << "\n";
    out << "n_qubits " << model.spec.n_qubits << "\n";
    out << "n_layers " << model.spec.n_layers << "\n";
    out << "rotations_per_qubit " << model.spec.rotation_count() << "\n";
    out << "seed " << model.seed << "\n";
    out << "selected_epoch " << model.selected_epoch << "\n";
    out << "theta";
    for (const double v : model.theta_star.values()) {
        out << ' ' << format_double(v);
    }
    out << "\n";
    out << "history " << model.history.size() << "\n";
    for (const EpochStats& stats : model.history) {
        out << format_double(stats.train_loss) << ' ' << format_double(stats.val_loss) << "\n";
    }
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open model file '" + path + "'");
    }
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (tag != "qmediate-model" || version != 1) {
        throw std::runtime_error("unrecognized model format in '" + path + "'");
    }
    TrainedModel model;
    std::string key;
    std::string topology;
    int rotations = 0;
    std::size_t history_len = 0;
    while (in >> key) {
        if (key == "topology") {
            in >> topology;
            model.spec.topology = topology_from_string(topology);
        } else if (key == "n_qubits") {
            in >> model.spec.n_qubits;
        } else if (key == "n_layers") {
            in >> model.spec.n_layers;
        } else if (key == "rotations_per_qubit") {
            in >> rotations;
        } else if (key == "seed") {
            in >> model.seed;
        } else if (key == "selected_epoch") {
            in >> model.selected_epoch;
        } else if (key == "theta") {
            model.spec.validate();
            std::vector<double> values(static_cast<std::size_t>(model.spec.parameter_count()));
            for (double& v : values) {
                in >> v;
            }
            model.theta_star = ParameterTensor(model.spec.n_layers, model.spec.n_qubits,
                                               model.spec.rotation_count(), std::move(values));
        } else if (key == "history") {
            in >> history_len;
            model.history.resize(history_len);
            for (EpochStats& stats : model.history) {
                in >> stats.train_loss >> stats.val_loss;
            }
        } else {
            throw std::runtime_error("unrecognized model key '" + key + "' in '" + path + "'");
        }
    }
    if (rotations != 0 && rotations != model.spec.rotation_count()) {
        throw std::runtime_error("model file '" + path + "' is inconsistent");
    }
    return model;
}

void write_arm_csv(const std::string& path, const ArmEvaluation& eval) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(eval.samples.size());
    for (const ArmSample& s : eval.samples) {
        rows.push_back({std::to_string(s.sample_id), std::to_string(eval.t),
                        format_double(s.mediators.s_a), format_double(s.mediators.gamma_a),
                        format_double(s.mediators.l_a), format_double(s.mediators.i_ab),
                        format_double(s.p), format_double(s.y_dir), std::to_string(s.y_true)});
    }
    write_csv(path, {"sample_id", "t", "S_A", "gamma_A", "L_A", "I_AB", "p", "Y_dir", "y_true"},
              rows);
}

} // namespace qmediate
