#pragma once

#include "qmediate/gates.hpp"

#include <cstddef>
#include <vector>

namespace qmediate {

/// Pure n-qubit state as a dense amplitude vector.
///
/// Bit convention, fixed because partial traces and the Z readout depend on
/// it: qubit 0 is the most significant bit of the amplitude index, so
/// |q0 q1 ... q_{n-1}> sits at index q0*2^{n-1} + q1*2^{n-2} + ... + q_{n-1}.
class Statevector {
  public:
    /// |0...0> on n qubits, 1 <= n <= 8.
    explicit Statevector(int n_qubits);

    static Statevector from_amplitudes(int n_qubits, std::vector<cplx> amplitudes);

    int n_qubits() const { return n_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    cplx amplitude(std::size_t index) const { return amps_.at(index); }

    /// Applies an arbitrary 1-qubit gate; rejects matrices that are not
    /// unitary within 1e-12.
    void apply_1q_gate(int qubit, const Gate2& gate);

    void apply_cnot(int control, int target);

    // Rotation fast paths. The matrices are unitary by construction, so the
    // unitarity check is skipped.
    void apply_rx(int qubit, double theta);
    void apply_ry(int qubit, double theta);
    void apply_rz(int qubit, double theta);

    double norm_squared() const;

    /// <Z_q>; warns on stderr when the state norm has drifted beyond 1e-8.
    double expectation_z(int qubit) const;
    double expectation_z0() const { return expectation_z(0); }

  private:
    void apply_1q_unchecked(int qubit, const Gate2& gate);
    void check_qubit(int qubit) const;

    int n_;
    std::vector<cplx> amps_;
};

} // namespace qmediate
