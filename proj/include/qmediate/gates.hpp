#pragma once

#include <array>
#include <complex>

namespace qmediate {

using cplx = std::complex<double>;

/// Row-major 2x2 complex matrix acting on a single qubit.
struct Gate2 {
    std::array<cplx, 4> m{};

    cplx at(int row, int col) const { return m[static_cast<std::size_t>(2 * row + col)]; }
};

Gate2 identity_gate();
Gate2 pauli_x_gate();

// Half-angle convention: R_P(theta) = exp(-i * theta * P / 2) for P in {X,Y,Z}.
Gate2 rx_gate(double theta);
Gate2 ry_gate(double theta);
Gate2 rz_gate(double theta);

/// max_ij |(G^dagger G - I)_ij|; 0 for exactly unitary gates.
double unitarity_defect(const Gate2& g);

} // namespace qmediate
