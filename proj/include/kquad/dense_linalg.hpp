#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kquad {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Throws ParameterError if entries.size() != rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> entries() const noexcept { return data_; }

  Matrix transposed() const;
  bool all_finite() const;

  double norm_one() const;  // max column sum
  double norm_inf() const;  // max row sum

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);
// v^T A v.
double quadratic_form(const Matrix& a, std::span<const double> v);
// u^T A v.
double bilinear_form(std::span<const double> u, const Matrix& a,
                     std::span<const double> v);
double max_abs(std::span<const double> v);

/// PA = LU with partial pivoting. L has an implicit unit diagonal and is
/// stored below the diagonal of `packed`; U occupies the rest.
class LuFactorization {
 public:
  std::size_t size() const noexcept { return n_; }
  const Matrix& packed() const noexcept { return lu_; }
  // perm()[i] is the row of A that ended up in row i of PA.
  const std::vector<std::size_t>& perm() const noexcept { return perm_; }
  int sign() const noexcept { return sign_; }
  double log_abs_det() const noexcept { return log_abs_det_; }
  double determinant() const;
  double norm_one_of_input() const noexcept { return norm_one_; }

  std::vector<double> solve(std::span<const double> b) const;
  // Solves A^T y = b.
  std::vector<double> solve_transposed(std::span<const double> b) const;

  Matrix lower() const;
  Matrix upper() const;

 private:
  friend LuFactorization lu_factor(const Matrix& a, double pivot_ratio);

  std::size_t n_ = 0;
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  double log_abs_det_ = 0.0;
  double norm_one_ = 0.0;
};

// Pivots with |p| < kSingularPivotRatio * max-row-norm(A) are singular.
inline constexpr double kSingularPivotRatio = 1e-12;

// Throws ParameterError for non-square or non-finite input and
// SingularMatrixError (carrying the pivot index) for singular input.
// pivot_ratio = 0 rejects exact zero pivots only.
LuFactorization lu_factor(const Matrix& a, double pivot_ratio = kSingularPivotRatio);

std::vector<double> lu_solve(const LuFactorization& f, std::span<const double> b);

// Estimated 1-norm condition number ||A||_1 ||A^{-1}||_1 (Hager/Higham).
double condition_estimate(const LuFactorization& f);
// Same, but returns +infinity when the matrix is singular.
double condition_estimate(const Matrix& a);

// Adds `jitter` to every diagonal entry.
void add_diagonal(Matrix& a, double jitter);

}  // namespace kquad
