#pragma once

#include "qmediate/statevector.hpp"

#include <vector>

namespace qmediate {

/// Bipartition A|B of the qubit set. A holds sorted qubit indices; B is the
/// complement. Both sides must be nonempty.
struct Bipartition {
    int n_qubits = 0;
    std::vector<int> subsystem_a;

    /// A = first ceil(n/2) qubits, the default cut everywhere.
    static Bipartition front_half(int n_qubits);

    std::vector<int> subsystem_b() const;
    void validate() const;
};

/// Hermitian, unit-trace, positive semidefinite matrix (within tolerance).
class DensityMatrix {
  public:
    explicit DensityMatrix(int dim);

    int dim() const { return dim_; }
    cplx& at(int row, int col) { return entries_[static_cast<std::size_t>(row) * dim_ + col]; }
    cplx at(int row, int col) const { return entries_[static_cast<std::size_t>(row) * dim_ + col]; }

    double trace_real() const;
    double hermiticity_defect() const; // max |rho_ij - conj(rho_ji)|

  private:
    int dim_;
    std::vector<cplx> entries_;
};

/// rho_A by tracing out B; groups amplitudes by the B-qubit bit pattern.
DensityMatrix reduced_density_matrix(const Statevector& state, const Bipartition& part);

/// rho = |psi><psi| over all qubits.
DensityMatrix full_density_matrix(const Statevector& state);

/// Eigenvalues in descending order via cyclic Jacobi sweeps on the Hermitian
/// matrix; converges when the off-diagonal Frobenius norm drops below 1e-14.
/// Rounding negatives in [-1e-10, 0) are clipped to zero; anything lower
/// throws. Inputs non-Hermitian beyond 1e-10 are rejected.
std::vector<double> hermitian_eigenvalues(const DensityMatrix& rho);

/// -sum lambda log2 lambda over eigenvalues >= 1e-16 (smaller ones are
/// numerical noise and are truncated).
double von_neumann_entropy(const DensityMatrix& rho);

/// Tr[rho^2], evaluated as the squared Frobenius norm.
double purity(const DensityMatrix& rho);

/// 1 - purity, exactly.
double linear_entropy(const DensityMatrix& rho);

/// S_A + S_B - S_AB with S_AB computed from the full density matrix rather
/// than assumed zero; warns when S_AB >= 1e-10.
double mutual_information(const Statevector& state, const Bipartition& part);

/// The four mediators of one state under one cut.
struct MediatorVector {
    double s_a = 0.0;     // entanglement entropy, bits
    double gamma_a = 0.0; // purity of A
    double l_a = 0.0;     // linear entropy of A
    double i_ab = 0.0;    // mutual information, bits
};

struct MediatorResult {
    MediatorVector m;
    double s_ab = 0.0; // entropy of the full state; purity diagnostic
};

MediatorResult compute_mediators(const Statevector& state, const Bipartition& part);

} // namespace qmediate
