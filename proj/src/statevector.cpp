#include "qmediate/statevector.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace qmediate {

Statevector::Statevector(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 8) {
        throw std::invalid_argument("Statevector: n_qubits must be in [1, 8], got " +
                                    std::to_string(n_qubits));
    }
    amps_.assign(std::size_t{1} << n_qubits, cplx(0, 0));
    amps_[0] = cplx(1, 0);
}

Statevector Statevector::from_amplitudes(int n_qubits, std::vector<cplx> amplitudes) {
    Statevector out(n_qubits);
    if (amplitudes.size() != out.dim()) {
        throw std::invalid_argument("Statevector: expected " + std::to_string(out.dim()) +
                                    " amplitudes, got " + std::to_string(amplitudes.size()));
    }
    out.amps_ = std::move(amplitudes);
    return out;
}

void Statevector::check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= n_) {
        throw std::out_of_range("qubit index " + std::to_string(qubit) + " out of range for " +
                                std::to_string(n_) + " qubits");
    }
}

void Statevector::apply_1q_unchecked(int qubit, const Gate2& gate) {
    // Qubit 0 is the most significant bit of the index.
    const std::size_t bit = std::size_t{1} << (n_ - 1 - qubit);
    const std::size_t size = amps_.size();
    for (std::size_t base = 0; base < size; ++base) {
        if (base & bit) {
            continue;
        }
        const cplx a0 = amps_[base];
        const cplx a1 = amps_[base | bit];
        amps_[base] = gate.at(0, 0) * a0 + gate.at(0, 1) * a1;
        amps_[base | bit] = gate.at(1, 0) * a0 + gate.at(1, 1) * a1;
    }
}

void Statevector::apply_1q_gate(int qubit, const Gate2& gate) {
    check_qubit(qubit);
    if (unitarity_defect(gate) > 1e-12) {
        throw std::invalid_argument("apply_1q_gate: matrix is not unitary within 1e-12");
    }
    apply_1q_unchecked(qubit, gate);
}

void Statevector::apply_cnot(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) {
        throw std::invalid_argument("apply_cnot: control and target must differ (both " +
                                    std::to_string(control) + ")");
    }
    const std::size_t cbit = std::size_t{1} << (n_ - 1 - control);
    const std::size_t tbit = std::size_t{1} << (n_ - 1 - target);
    const std::size_t size = amps_.size();
    for (std::size_t i = 0; i < size; ++i) {
        if ((i & cbit) && !(i & tbit)) {
            std::swap(amps_[i], amps_[i | tbit]);
        }
    }
}

void Statevector::apply_rx(int qubit, double theta) {
    check_qubit(qubit);
    apply_1q_unchecked(qubit, rx_gate(theta));
}

void Statevector::apply_ry(int qubit, double theta) {
    check_qubit(qubit);
    apply_1q_unchecked(qubit, ry_gate(theta));
}

void Statevector::apply_rz(int qubit, double theta) {
    check_qubit(qubit);
    apply_1q_unchecked(qubit, rz_gate(theta));
}

double Statevector::norm_squared() const {
    double sum = 0.0;
    for (const cplx& a : amps_) {
        sum += std::norm(a);
    }
    return sum;
}

double Statevector::expectation_z(int qubit) const {
    check_qubit(qubit);
    const double norm2 = norm_squared();
    if (std::abs(norm2 - 1.0) > 1e-8) {
        std::cerr << "warning: expectation_z on state with |norm^2 - 1| = "
                  << std::abs(norm2 - 1.0) << "\n";
    }
    const std::size_t bit = std::size_t{1} << (n_ - 1 - qubit);
    double value = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const double w = std::norm(amps_[i]);
        value += (i & bit) ? -w : w;
    }
    return value;
}

} // namespace qmediate
