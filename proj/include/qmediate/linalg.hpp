#pragma once

#include <cstddef>
#include <vector>

namespace qmediate {

/// Row-major dense real matrix, sized for small regression designs and
/// covariance blocks.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    static Matrix identity(std::size_t n);

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);

struct LinearSolve {
    std::vector<double> x;
    bool singular = false;
    std::size_t deficient_column = 0; // original column index when singular
};

/// Gaussian elimination with partial pivoting. Reports (instead of solving
/// through) the first column whose pivot falls below rel_tol * max|a_ii|.
LinearSolve solve_pivoted(Matrix a, std::vector<double> b, double rel_tol = 1e-12);

/// Gauss-Jordan inverse; throws std::invalid_argument on singular input.
Matrix invert(Matrix a);

struct SymmetricEigen {
    std::vector<double> values; // descending
    Matrix vectors;             // column j pairs with values[j]
};

/// Cyclic Jacobi on a real symmetric matrix, eigenvectors accumulated.
SymmetricEigen symmetric_eigen(Matrix a);

/// Minimum-norm least-squares solution of a x = b for symmetric a (normal
/// equations), using an eigenvalue pseudo-inverse with cutoff
/// rel_tol * lambda_max.
std::vector<double> solve_min_norm(const Matrix& a, const std::vector<double>& b,
                                   double rel_tol = 1e-10);

} // namespace qmediate
