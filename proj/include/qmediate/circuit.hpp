#pragma once

#include "qmediate/statevector.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qmediate {

enum class Topology { Deep, Full, Linear, Ring, Pairwise };

Topology topology_from_string(const std::string& name);
std::string to_string(Topology t);
const std::vector<Topology>& all_topologies();

/// Rotation axes per qubit per layer: Deep and Pairwise use RX,RY (k=2);
/// Linear, Ring and Full add RZ (k=3).
int rotations_per_qubit(Topology t);

struct CircuitSpec {
    Topology topology = Topology::Linear;
    int n_qubits = 0;
    int n_layers = 0;

    int rotation_count() const { return rotations_per_qubit(topology); }
    int parameter_count() const { return n_layers * n_qubits * rotation_count(); }
    void validate() const;
};

/// Rotation angles indexed (layer, qubit, axis), stored flat in that order.
class ParameterTensor {
  public:
    ParameterTensor() = default;
    ParameterTensor(int n_layers, int n_qubits, int k, std::vector<double> values);
    static ParameterTensor zeros(const CircuitSpec& spec);

    double& at(int layer, int qubit, int axis);
    double at(int layer, int qubit, int axis) const;

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    int n_layers() const { return layers_; }
    int n_qubits() const { return qubits_; }
    int k() const { return k_; }

    bool matches(const CircuitSpec& spec) const;

  private:
    int layers_ = 0;
    int qubits_ = 0;
    int k_ = 0;
    std::vector<double> values_;
};

/// CNOT (control, target) pairs of one entangler block. layer_index is
/// 1-based: Deep staggers even pairs (0,1),(2,3),... on odd layers against
/// odd pairs (1,2),(3,0),... on even layers; the other topologies do not
/// depend on the layer.
std::vector<std::pair<int, int>> entangler_pairs(Topology t, int n_qubits, int layer_index);

/// One gate of the flattened ansatz, in application order. Lets dense-matrix
/// replays consume exactly the sequence the statevector kernels execute.
struct GateOp {
    enum class Kind { Rx, Ry, Rz, Cnot };
    Kind kind;
    int qubit;          // rotation target, or CNOT control
    int partner = -1;   // CNOT target
    double angle = 0.0; // rotations only
};

std::vector<GateOp> ansatz_gate_sequence(const CircuitSpec& spec, const ParameterTensor& theta);

/// Product state RY(x_i)|0> on qubit i; no entanglement across any cut.
Statevector encode_features(const std::vector<double>& x);

/// Per layer: RX,RY(,RZ) on every qubit, then the topology's entangler block.
void apply_ansatz(Statevector& state, const CircuitSpec& spec, const ParameterTensor& theta);

} // namespace qmediate
