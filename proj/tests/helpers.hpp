#pragma once

// Independent oracles used by the test suites. These deliberately avoid the
// library's statevector kernels: dense Kronecker-product algebra for circuit
// replay, a double-loop partial trace, central finite differences for
// gradients, and a linear-SEM sampler for the mediation estimators.

#include "qmediate/circuit.hpp"
#include "qmediate/mediation.hpp"
#include "qmediate/qinfo.hpp"
#include "qmediate/rng.hpp"

#include <complex>
#include <vector>

namespace testutil {

using qmediate::cplx;
using CMat = std::vector<std::vector<cplx>>;

inline CMat cidentity(std::size_t n) {
    CMat m(n, std::vector<cplx>(n, cplx(0, 0)));
    for (std::size_t i = 0; i < n; ++i) {
        m[i][i] = cplx(1, 0);
    }
    return m;
}

inline CMat kron(const CMat& a, const CMat& b) {
    const std::size_t ar = a.size();
    const std::size_t ac = a[0].size();
    const std::size_t br = b.size();
    const std::size_t bc = b[0].size();
    CMat out(ar * br, std::vector<cplx>(ac * bc, cplx(0, 0)));
    for (std::size_t i = 0; i < ar; ++i) {
        for (std::size_t j = 0; j < ac; ++j) {
            for (std::size_t k = 0; k < br; ++k) {
                for (std::size_t l = 0; l < bc; ++l) {
                    out[i * br + k][j * bc + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    return out;
}

inline CMat gate_matrix(const qmediate::Gate2& g) {
    return {{g.at(0, 0), g.at(0, 1)}, {g.at(1, 0), g.at(1, 1)}};
}

// Qubit 0 is the MSB of the amplitude index, so the lifted operator is
// I_(2^q) (x) g (x) I_(2^(n-1-q)).
inline CMat lift_1q(const qmediate::Gate2& g, int qubit, int n) {
    CMat out = cidentity(std::size_t{1} << qubit);
    out = kron(out, gate_matrix(g));
    out = kron(out, cidentity(std::size_t{1} << (n - 1 - qubit)));
    return out;
}

inline CMat cnot_matrix(int control, int target, int n) {
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t cbit = std::size_t{1} << (n - 1 - control);
    const std::size_t tbit = std::size_t{1} << (n - 1 - target);
    CMat out(dim, std::vector<cplx>(dim, cplx(0, 0)));
    for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t j = (i & cbit) ? (i ^ tbit) : i;
        out[j][i] = cplx(1, 0);
    }
    return out;
}

inline std::vector<cplx> matvec(const CMat& m, const std::vector<cplx>& v) {
    std::vector<cplx> out(m.size(), cplx(0, 0));
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            out[i] += m[i][j] * v[j];
        }
    }
    return out;
}

// Dense replay of a gate sequence on an initial vector.
inline std::vector<cplx> dense_replay(int n, const std::vector<qmediate::GateOp>& ops,
                                      std::vector<cplx> state) {
    using qmediate::GateOp;
    for (const GateOp& op : ops) {
        CMat m;
        switch (op.kind) {
        case GateOp::Kind::Rx: m = lift_1q(qmediate::rx_gate(op.angle), op.qubit, n); break;
        case GateOp::Kind::Ry: m = lift_1q(qmediate::ry_gate(op.angle), op.qubit, n); break;
        case GateOp::Kind::Rz: m = lift_1q(qmediate::rz_gate(op.angle), op.qubit, n); break;
        case GateOp::Kind::Cnot: m = cnot_matrix(op.qubit, op.partner, n); break;
        }
        state = matvec(m, state);
    }
    return state;
}

// Independent partial trace: double loop over full indices keeping rows and
// columns whose B bits agree.
inline qmediate::DensityMatrix partial_trace_oracle(const qmediate::Statevector& state,
                                                    const qmediate::Bipartition& part) {
    const int n = state.n_qubits();
    std::size_t a_mask = 0;
    for (const int q : part.subsystem_a) {
        a_mask |= std::size_t{1} << (n - 1 - q);
    }
    const std::size_t dim = state.dim();
    const std::size_t full_mask = dim - 1;
    const std::size_t b_mask = full_mask & ~a_mask;

    // Compact A index: bits of subsystem A in qubit order.
    auto extract_a = [&](std::size_t full) {
        std::size_t idx = 0;
        for (const int q : part.subsystem_a) {
            idx <<= 1;
            if (full & (std::size_t{1} << (n - 1 - q))) {
                idx |= 1;
            }
        }
        return idx;
    };

    qmediate::DensityMatrix rho(1 << static_cast<int>(part.subsystem_a.size()));
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            if ((i & b_mask) != (j & b_mask)) {
                continue;
            }
            rho.at(static_cast<int>(extract_a(i)), static_cast<int>(extract_a(j))) +=
                state.amplitude(i) * std::conj(state.amplitude(j));
        }
    }
    return rho;
}

inline qmediate::ParameterTensor random_theta(const qmediate::CircuitSpec& spec,
                                              qmediate::Rng& rng, double scale = 1.0) {
    std::vector<double> values(static_cast<std::size_t>(spec.parameter_count()));
    for (double& v : values) {
        v = scale * (2.0 * rng.uniform() - 1.0) * 3.14159265358979323846;
    }
    return qmediate::ParameterTensor(spec.n_layers, spec.n_qubits, spec.rotation_count(),
                                     std::move(values));
}

// Linear-SEM sampler for paired observations. Baselines and effects act on
// (S_A, gamma_A); L_A and I_AB are derived per arm as 1 - gamma and 2 S, so
// the generated data satisfy the pure-state rank-2 constraints exactly.
struct SemTruth {
    double tau0 = 0.4;
    double tau = 0.03;
    double alpha_s = 0.2;   // effect of t on S_A
    double alpha_g = -0.1;  // effect of t on gamma_A
    double beta_s = 0.05;   // composite S_A coefficient
    double beta_g = 0.08;   // composite gamma_A coefficient
    double base_s = 0.8;
    double base_g = 0.6;
    double shared_m_sd = 0.0; // sample-level mediator heterogeneity
    double arm_m_sd = 0.0;    // per-arm mediator noise
    double shared_y_sd = 0.0; // sample-level outcome heterogeneity
    double arm_y_sd = 0.0;    // per-row outcome noise

    double nie() const { return alpha_s * beta_s + alpha_g * beta_g; }
    double ate() const { return tau + nie(); }
};

inline std::vector<qmediate::PairedObservation> generate_sem_pairs(const SemTruth& truth,
                                                                   std::size_t n,
                                                                   qmediate::Rng& rng) {
    std::vector<qmediate::PairedObservation> pairs;
    pairs.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        const double eps_s = truth.shared_m_sd > 0 ? rng.normal(0, truth.shared_m_sd) : 0.0;
        const double eps_g = truth.shared_m_sd > 0 ? rng.normal(0, truth.shared_m_sd) : 0.0;
        const double eps_y = truth.shared_y_sd > 0 ? rng.normal(0, truth.shared_y_sd) : 0.0;

        qmediate::PairedObservation obs;
        obs.sample_id = s;
        obs.y_true = static_cast<int>(s % 2);
        for (int t = 0; t < 2; ++t) {
            double s_a = truth.base_s + truth.alpha_s * t + eps_s;
            double g_a = truth.base_g + truth.alpha_g * t + eps_g;
            if (truth.arm_m_sd > 0) {
                s_a += rng.normal(0, truth.arm_m_sd);
                g_a += rng.normal(0, truth.arm_m_sd);
            }
            qmediate::MediatorVector m;
            m.s_a = s_a;
            m.gamma_a = g_a;
            m.l_a = 1.0 - g_a;
            m.i_ab = 2.0 * s_a;
            double y = truth.tau0 + truth.tau * t + truth.beta_s * s_a + truth.beta_g * g_a +
                       eps_y;
            if (truth.arm_y_sd > 0) {
                y += rng.normal(0, truth.arm_y_sd);
            }
            if (t == 0) {
                obs.m0 = m;
                obs.y0 = y;
            } else {
                obs.m1 = m;
                obs.y1 = y;
            }
        }
        pairs.push_back(obs);
    }
    return pairs;
}

} // namespace testutil
