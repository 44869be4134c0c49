#include "qmediate/qinfo.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace qmediate {

Bipartition Bipartition::front_half(int n_qubits) {
    Bipartition part;
    part.n_qubits = n_qubits;
    const int half = (n_qubits + 1) / 2;
    for (int q = 0; q < half; ++q) {
        part.subsystem_a.push_back(q);
    }
    part.validate();
    return part;
}

std::vector<int> Bipartition::subsystem_b() const {
    std::vector<int> b;
    std::size_t next = 0;
    for (int q = 0; q < n_qubits; ++q) {
        if (next < subsystem_a.size() && subsystem_a[next] == q) {
            ++next;
        } else {
            b.push_back(q);
        }
    }
    return b;
}

void Bipartition::validate() const {
    if (n_qubits < 2) {
        throw std::invalid_argument("Bipartition: need at least 2 qubits to cut");
    }
    if (subsystem_a.empty() || static_cast<int>(subsystem_a.size()) >= n_qubits) {
        throw std::invalid_argument("Bipartition: both subsystems must be nonempty");
    }
    for (std::size_t i = 0; i < subsystem_a.size(); ++i) {
        const int q = subsystem_a[i];
        if (q < 0 || q >= n_qubits) {
            throw std::invalid_argument("Bipartition: qubit " + std::to_string(q) +
                                        " out of range");
        }
        if (i > 0 && subsystem_a[i] <= subsystem_a[i - 1]) {
            throw std::invalid_argument("Bipartition: subsystem A must be sorted and unique");
        }
    }
}

DensityMatrix::DensityMatrix(int dim) : dim_(dim) {
    if (dim < 1) {
        throw std::invalid_argument("DensityMatrix: dim must be positive");
    }
    entries_.assign(static_cast<std::size_t>(dim) * dim, cplx(0, 0));
}

double DensityMatrix::trace_real() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) {
        t += at(i, i).real();
    }
    return t;
}

double DensityMatrix::hermiticity_defect() const {
    double worst = 0.0;
    for (int r = 0; r < dim_; ++r) {
        for (int c = r; c < dim_; ++c) {
            worst = std::max(worst, std::abs(at(r, c) - std::conj(at(c, r))));
        }
    }
    return worst;
}

namespace {

// Bit position of qubit q inside the amplitude index (qubit 0 = MSB).
std::size_t qubit_bit(int n_qubits, int qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

// Scatters the compact subsystem index onto the full-index bits of the
// subsystem's qubits; the subsystem's first qubit is its own MSB.
std::vector<std::size_t> scatter_table(int n_qubits, const std::vector<int>& qubits) {
    const std::size_t dim = std::size_t{1} << qubits.size();
    std::vector<std::size_t> table(dim, 0);
    for (std::size_t idx = 0; idx < dim; ++idx) {
        std::size_t full = 0;
        for (std::size_t pos = 0; pos < qubits.size(); ++pos) {
            if (idx & (std::size_t{1} << (qubits.size() - 1 - pos))) {
                full |= qubit_bit(n_qubits, qubits[pos]);
            }
        }
        table[idx] = full;
    }
    return table;
}

} // namespace

DensityMatrix reduced_density_matrix(const Statevector& state, const Bipartition& part) {
    part.validate();
    if (part.n_qubits != state.n_qubits()) {
        throw std::invalid_argument("reduced_density_matrix: bipartition is over " +
                                    std::to_string(part.n_qubits) + " qubits, state has " +
                                    std::to_string(state.n_qubits()));
    }
    const auto a_index = scatter_table(state.n_qubits(), part.subsystem_a);
    const auto b_index = scatter_table(state.n_qubits(), part.subsystem_b());
    const auto& amps = state.amplitudes();

    DensityMatrix rho(static_cast<int>(a_index.size()));
    for (std::size_t ia = 0; ia < a_index.size(); ++ia) {
        for (std::size_t ja = 0; ja <= ia; ++ja) {
            cplx sum(0, 0);
            for (const std::size_t b : b_index) {
                sum += amps[a_index[ia] | b] * std::conj(amps[a_index[ja] | b]);
            }
            rho.at(static_cast<int>(ia), static_cast<int>(ja)) = sum;
            rho.at(static_cast<int>(ja), static_cast<int>(ia)) = std::conj(sum);
        }
    }
    return rho;
}

DensityMatrix full_density_matrix(const Statevector& state) {
    const auto& amps = state.amplitudes();
    DensityMatrix rho(static_cast<int>(amps.size()));
    for (std::size_t r = 0; r < amps.size(); ++r) {
        for (std::size_t c = 0; c < amps.size(); ++c) {
            rho.at(static_cast<int>(r), static_cast<int>(c)) = amps[r] * std::conj(amps[c]);
        }
    }
    return rho;
}

namespace {

double offdiagonal_frobenius(const std::vector<cplx>& m, int dim) {
    double sum = 0.0;
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            if (r != c) {
                sum += std::norm(m[static_cast<std::size_t>(r) * dim + c]);
            }
        }
    }
    return std::sqrt(sum);
}

} // namespace

std::vector<double> hermitian_eigenvalues(const DensityMatrix& rho) {
    if (rho.hermiticity_defect() > 1e-10) {
        throw std::invalid_argument("hermitian_eigenvalues: input not Hermitian within 1e-10");
    }
    const int dim = rho.dim();
    std::vector<cplx> h(static_cast<std::size_t>(dim) * dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            h[static_cast<std::size_t>(r) * dim + c] = rho.at(r, c);
        }
    }
    auto entry = [&](int r, int c) -> cplx& { return h[static_cast<std::size_t>(r) * dim + c]; };

    // Cyclic Jacobi sweeps with complex rotations; each rotation zeroes one
    // off-diagonal element of the 2x2 principal block (p, q). The rotation
    // angle is kept in |theta| <= pi/4, the classically convergent choice.
    // Target: off-diagonal Frobenius norm below 1e-14, relaxed by a
    // dim-scaled floor because roundoff alone contributes ~dim * 1e-16.
    const double tol = std::max(1e-14, 2e-16 * dim);
    constexpr int kMaxSweeps = 60;
    for (int sweep = 0; sweep < kMaxSweeps && offdiagonal_frobenius(h, dim) > tol; ++sweep) {
        for (int p = 0; p < dim - 1; ++p) {
            for (int q = p + 1; q < dim; ++q) {
                const cplx c_pq = entry(p, q);
                const double mag = std::abs(c_pq);
                if (mag == 0.0) {
                    continue;
                }
                const double a = entry(p, p).real();
                const double b = entry(q, q).real();
                const double tau = (a - b) / (2.0 * mag);
                const double t_angle =
                    (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t_angle * t_angle);
                const cplx phase = c_pq / mag;
                const cplx s = std::conj(phase) * (t_angle * cs); // column-rotation entry
                const cplx s_conj = std::conj(s);

                // H <- J^dagger H J with J = I except the (p,q) block
                // [[cs, -conj(s)], [s, cs]].
                for (int r = 0; r < dim; ++r) {
                    const cplx hrp = entry(r, p);
                    const cplx hrq = entry(r, q);
                    entry(r, p) = hrp * cs + hrq * s;
                    entry(r, q) = -hrp * s_conj + hrq * cs;
                }
                for (int c = 0; c < dim; ++c) {
                    const cplx hpc = entry(p, c);
                    const cplx hqc = entry(q, c);
                    entry(p, c) = cs * hpc + s_conj * hqc;
                    entry(q, c) = -s * hpc + cs * hqc;
                }
            }
        }
    }
    if (offdiagonal_frobenius(h, dim) > tol * 20) {
        throw std::runtime_error("hermitian_eigenvalues: Jacobi sweeps did not converge");
    }

    std::vector<double> values(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        values[static_cast<std::size_t>(i)] = entry(i, i).real();
    }
    std::sort(values.begin(), values.end(), std::greater<double>());
    return values;
}

double von_neumann_entropy(const DensityMatrix& rho) {
    std::vector<double> values = hermitian_eigenvalues(rho);
    double entropy = 0.0;
    for (double& lambda : values) {
        if (lambda < 0.0) {
            if (lambda < -1e-10) {
                throw std::invalid_argument(
                    "von_neumann_entropy: eigenvalue below -1e-10, not a density matrix");
            }
            lambda = 0.0; // rounding noise
        }
        if (lambda >= 1e-16) {
            entropy -= lambda * std::log2(lambda);
        }
    }
    return entropy;
}

double purity(const DensityMatrix& rho) {
    double sum = 0.0;
    for (int r = 0; r < rho.dim(); ++r) {
        for (int c = 0; c < rho.dim(); ++c) {
            sum += std::norm(rho.at(r, c));
        }
    }
    return sum;
}

double linear_entropy(const DensityMatrix& rho) {
    return 1.0 - purity(rho);
}

double mutual_information(const Statevector& state, const Bipartition& part) {
    const double s_a = von_neumann_entropy(reduced_density_matrix(state, part));
    Bipartition flipped;
    flipped.n_qubits = part.n_qubits;
    flipped.subsystem_a = part.subsystem_b();
    const double s_b = von_neumann_entropy(reduced_density_matrix(state, flipped));
    const double s_ab = von_neumann_entropy(full_density_matrix(state));
    if (s_ab >= 1e-10) {
        std::cerr << "warning: joint entropy S_AB = " << s_ab
                  << " on a supposedly pure state\n";
    }
    return s_a + s_b - s_ab;
}

MediatorResult compute_mediators(const Statevector& state, const Bipartition& part) {
    const DensityMatrix rho_a = reduced_density_matrix(state, part);
    Bipartition flipped;
    flipped.n_qubits = part.n_qubits;
    flipped.subsystem_a = part.subsystem_b();
    const DensityMatrix rho_b = reduced_density_matrix(state, flipped);

    MediatorResult out;
    out.m.s_a = von_neumann_entropy(rho_a);
    out.m.gamma_a = purity(rho_a);
    out.m.l_a = linear_entropy(rho_a);
    out.s_ab = von_neumann_entropy(full_density_matrix(state));
    if (out.s_ab >= 1e-10) {
        std::cerr << "warning: joint entropy S_AB = " << out.s_ab
                  << " on a supposedly pure state\n";
    }
    out.m.i_ab = out.m.s_a + von_neumann_entropy(rho_b) - out.s_ab;
    return out;
}

} // namespace qmediate
