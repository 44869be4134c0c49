#include "qmediate/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qmediate {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m.at(i, i) = 1.0;
    }
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: dimension mismatch");
    }
    Matrix out(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out.at(i, j) += aik * b.at(k, j);
            }
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out.at(j, i) = a.at(i, j);
        }
    }
    return out;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != x.size()) {
        throw std::invalid_argument("matvec: dimension mismatch");
    }
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            sum += a.at(i, j) * x[j];
        }
        out[i] = sum;
    }
    return out;
}

LinearSolve solve_pivoted(Matrix a, std::vector<double> b, double rel_tol) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) {
        throw std::invalid_argument("solve_pivoted: need square system");
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scale = std::max(scale, std::abs(a.at(i, i)));
    }
    if (scale == 0.0) {
        scale = 1.0;
    }
    std::vector<std::size_t> col_of(n);
    std::iota(col_of.begin(), col_of.end(), std::size_t{0});

    LinearSolve result;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot_row = k;
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(a.at(r, k)) > std::abs(a.at(pivot_row, k))) {
                pivot_row = r;
            }
        }
        if (std::abs(a.at(pivot_row, k)) <= rel_tol * scale) {
            result.singular = true;
            result.deficient_column = col_of[k];
            return result;
        }
        if (pivot_row != k) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a.at(pivot_row, c), a.at(k, c));
            }
            std::swap(b[pivot_row], b[k]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double factor = a.at(r, k) / a.at(k, k);
            if (factor == 0.0) {
                continue;
            }
            a.at(r, k) = 0.0;
            for (std::size_t c = k + 1; c < n; ++c) {
                a.at(r, c) -= factor * a.at(k, c);
            }
            b[r] -= factor * b[k];
        }
    }
    result.x.assign(n, 0.0);
    for (std::size_t ik = n; ik-- > 0;) {
        double sum = b[ik];
        for (std::size_t c = ik + 1; c < n; ++c) {
            sum -= a.at(ik, c) * result.x[c];
        }
        result.x[ik] = sum / a.at(ik, ik);
    }
    return result;
}

Matrix invert(Matrix a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) {
        throw std::invalid_argument("invert: matrix must be square");
    }
    Matrix inv = Matrix::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot_row = k;
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(a.at(r, k)) > std::abs(a.at(pivot_row, k))) {
                pivot_row = r;
            }
        }
        const double pivot = a.at(pivot_row, k);
        if (std::abs(pivot) < 1e-300) {
            throw std::invalid_argument("invert: singular matrix");
        }
        if (pivot_row != k) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a.at(pivot_row, c), a.at(k, c));
                std::swap(inv.at(pivot_row, c), inv.at(k, c));
            }
        }
        const double inv_pivot = 1.0 / a.at(k, k);
        for (std::size_t c = 0; c < n; ++c) {
            a.at(k, c) *= inv_pivot;
            inv.at(k, c) *= inv_pivot;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == k) {
                continue;
            }
            const double factor = a.at(r, k);
            if (factor == 0.0) {
                continue;
            }
            for (std::size_t c = 0; c < n; ++c) {
                a.at(r, c) -= factor * a.at(k, c);
                inv.at(r, c) -= factor * inv.at(k, c);
            }
        }
    }
    return inv;
}

SymmetricEigen symmetric_eigen(Matrix a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) {
        throw std::invalid_argument("symmetric_eigen: matrix must be square");
    }
    double asym = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r + 1; c < n; ++c) {
            asym = std::max(asym, std::abs(a.at(r, c) - a.at(c, r)));
        }
    }
    double scale = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            scale = std::max(scale, std::abs(a.at(r, c)));
        }
    }
    if (scale > 0.0 && asym > 1e-9 * scale) {
        throw std::invalid_argument("symmetric_eigen: input not symmetric");
    }

    Matrix v = Matrix::identity(n);
    auto offdiag = [&]() {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = r + 1; c < n; ++c) {
                sum += 2.0 * a.at(r, c) * a.at(r, c);
            }
        }
        return std::sqrt(sum);
    };

    const double tol = std::max(1e-13 * std::max(scale, 1.0), 2e-16 * static_cast<double>(n));
    for (int sweep = 0; sweep < 80 && offdiag() > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double tau = (a.at(p, p) - a.at(q, q)) / (2.0 * apq);
                const double t =
                    (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * cs;
                for (std::size_t r = 0; r < n; ++r) {
                    const double arp = a.at(r, p);
                    const double arq = a.at(r, q);
                    a.at(r, p) = arp * cs + arq * sn;
                    a.at(r, q) = -arp * sn + arq * cs;
                }
                for (std::size_t c = 0; c < n; ++c) {
                    const double apc = a.at(p, c);
                    const double aqc = a.at(q, c);
                    a.at(p, c) = cs * apc + sn * aqc;
                    a.at(q, c) = -sn * apc + cs * aqc;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v.at(r, p);
                    const double vrq = v.at(r, q);
                    v.at(r, p) = vrp * cs + vrq * sn;
                    v.at(r, q) = -vrp * sn + vrq * cs;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t lhs, std::size_t rhs) { return a.at(lhs, lhs) > a.at(rhs, rhs); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a.at(order[j], order[j]);
        for (std::size_t r = 0; r < n; ++r) {
            out.vectors.at(r, j) = v.at(r, order[j]);
        }
    }
    return out;
}

std::vector<double> solve_min_norm(const Matrix& a, const std::vector<double>& b,
                                   double rel_tol) {
    const SymmetricEigen eig = symmetric_eigen(a);
    const std::size_t n = a.rows();
    const double cutoff = rel_tol * std::max(std::abs(eig.values.front()), 1e-300);
    std::vector<double> x(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double lambda = eig.values[j];
        if (std::abs(lambda) <= cutoff) {
            continue;
        }
        double proj = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            proj += eig.vectors.at(r, j) * b[r];
        }
        const double coef = proj / lambda;
        for (std::size_t r = 0; r < n; ++r) {
            x[r] += coef * eig.vectors.at(r, j);
        }
    }
    return x;
}

} // namespace qmediate
