#include "qmediate/circuit.hpp"

#include "qmediate/errors.hpp"

#include <stdexcept>
#include <string>

namespace qmediate {

Topology topology_from_string(const std::string& name) {
    if (name == "deep") return Topology::Deep;
    if (name == "full") return Topology::Full;
    if (name == "linear") return Topology::Linear;
    if (name == "ring") return Topology::Ring;
    if (name == "pairwise") return Topology::Pairwise;
    throw ConfigError("unknown topology '" + name +
                      "' (expected deep|full|linear|ring|pairwise)");
}

std::string to_string(Topology t) {
    switch (t) {
    case Topology::Deep: return "deep";
    case Topology::Full: return "full";
    case Topology::Linear: return "linear";
    case Topology::Ring: return "ring";
    case Topology::Pairwise: return "pairwise";
    }
    return "?";
}

const std::vector<Topology>& all_topologies() {
    static const std::vector<Topology> list = {Topology::Deep, Topology::Full, Topology::Linear,
                                               Topology::Ring, Topology::Pairwise};
    return list;
}

int rotations_per_qubit(Topology t) {
    switch (t) {
    case Topology::Deep:
    case Topology::Pairwise:
        return 2;
    case Topology::Full:
    case Topology::Linear:
    case Topology::Ring:
        return 3;
    }
    return 0;
}

void CircuitSpec::validate() const {
    if (n_qubits < 1 || n_qubits > 8) {
        throw std::invalid_argument("CircuitSpec: n_qubits must be in [1, 8]");
    }
    if (n_layers < 1) {
        throw std::invalid_argument("CircuitSpec: n_layers must be >= 1");
    }
}

ParameterTensor::ParameterTensor(int n_layers, int n_qubits, int k, std::vector<double> values)
    : layers_(n_layers), qubits_(n_qubits), k_(k), values_(std::move(values)) {
    const std::size_t expected =
        static_cast<std::size_t>(n_layers) * static_cast<std::size_t>(n_qubits) *
        static_cast<std::size_t>(k);
    if (values_.empty()) {
        values_.assign(expected, 0.0);
    }
    if (values_.size() != expected) {
        throw std::invalid_argument("ParameterTensor: expected " + std::to_string(expected) +
                                    " values, got " + std::to_string(values_.size()));
    }
}

ParameterTensor ParameterTensor::zeros(const CircuitSpec& spec) {
    return ParameterTensor(spec.n_layers, spec.n_qubits, spec.rotation_count(), {});
}

double& ParameterTensor::at(int layer, int qubit, int axis) {
    return values_[static_cast<std::size_t>((layer * qubits_ + qubit) * k_ + axis)];
}

double ParameterTensor::at(int layer, int qubit, int axis) const {
    return values_[static_cast<std::size_t>((layer * qubits_ + qubit) * k_ + axis)];
}

bool ParameterTensor::matches(const CircuitSpec& spec) const {
    return layers_ == spec.n_layers && qubits_ == spec.n_qubits && k_ == spec.rotation_count();
}

std::vector<std::pair<int, int>> entangler_pairs(Topology t, int n_qubits, int layer_index) {
    std::vector<std::pair<int, int>> pairs;
    const int n = n_qubits;
    switch (t) {
    case Topology::Deep: {
        // Staggered nearest neighbors with periodic boundaries: even pairs
        // (0,1),(2,3),... on odd layers, odd pairs (1,2),(3,0),... on even
        // layers (1-based). The wrap pair only exists when it has two
        // distinct qubits.
        const int offset = (layer_index % 2 == 1) ? 0 : 1;
        for (int i = offset; i < n; i += 2) {
            const int j = (i + 1) % n;
            if (j != i) {
                pairs.emplace_back(i, j);
            }
        }
        break;
    }
    case Topology::Full:
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                pairs.emplace_back(i, j);
            }
        }
        break;
    case Topology::Linear:
        for (int i = 0; i + 1 < n; ++i) {
            pairs.emplace_back(i, i + 1);
        }
        break;
    case Topology::Ring:
        for (int i = 0; i + 1 < n; ++i) {
            pairs.emplace_back(i, i + 1);
        }
        if (n > 1) {
            pairs.emplace_back(n - 1, 0);
        }
        break;
    case Topology::Pairwise:
        for (int i = 0; i + 1 < n; i += 2) {
            pairs.emplace_back(i, i + 1);
        }
        break;
    }
    return pairs;
}

std::vector<GateOp> ansatz_gate_sequence(const CircuitSpec& spec, const ParameterTensor& theta) {
    spec.validate();
    if (!theta.matches(spec)) {
        throw std::invalid_argument("ansatz: parameter tensor shape does not match circuit spec");
    }
    const int k = spec.rotation_count();
    std::vector<GateOp> ops;
    for (int layer = 0; layer < spec.n_layers; ++layer) {
        for (int q = 0; q < spec.n_qubits; ++q) {
            ops.push_back({GateOp::Kind::Rx, q, -1, theta.at(layer, q, 0)});
            ops.push_back({GateOp::Kind::Ry, q, -1, theta.at(layer, q, 1)});
            if (k == 3) {
                ops.push_back({GateOp::Kind::Rz, q, -1, theta.at(layer, q, 2)});
            }
        }
        for (const auto& [control, target] : entangler_pairs(spec.topology, spec.n_qubits, layer + 1)) {
            ops.push_back({GateOp::Kind::Cnot, control, target, 0.0});
        }
    }
    return ops;
}

Statevector encode_features(const std::vector<double>& x) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("encode_features: non-finite feature value");
        }
    }
    Statevector state(static_cast<int>(x.size()));
    for (int q = 0; q < static_cast<int>(x.size()); ++q) {
        state.apply_ry(q, x[static_cast<std::size_t>(q)]);
    }
    return state;
}

void apply_ansatz(Statevector& state, const CircuitSpec& spec, const ParameterTensor& theta) {
    if (state.n_qubits() != spec.n_qubits) {
        throw std::invalid_argument("apply_ansatz: state has " + std::to_string(state.n_qubits()) +
                                    " qubits but spec expects " + std::to_string(spec.n_qubits));
    }
    for (const GateOp& op : ansatz_gate_sequence(spec, theta)) {
        switch (op.kind) {
        case GateOp::Kind::Rx: state.apply_rx(op.qubit, op.angle); break;
        case GateOp::Kind::Ry: state.apply_ry(op.qubit, op.angle); break;
        case GateOp::Kind::Rz: state.apply_rz(op.qubit, op.angle); break;
        case GateOp::Kind::Cnot: state.apply_cnot(op.qubit, op.partner); break;
        }
    }
}

} // namespace qmediate
