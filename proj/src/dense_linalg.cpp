#include "kquad/dense_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "kquad/errors.hpp"

namespace kquad {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw ParameterError("matrix entry count does not match its shape");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

double Matrix::norm_one() const {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double Matrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (double v : row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ParameterError("matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ParameterError("matrix difference shape mismatch");
  }
  std::vector<double> out(a.entries().begin(), a.entries().end());
  auto rhs = b.entries();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= rhs[i];
  return Matrix(a.rows(), a.cols(), std::move(out));
}

std::vector<double> operator*(const Matrix& a, std::span<const double> v) {
  if (a.cols() != v.size()) throw ParameterError("matrix-vector shape mismatch");
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), v);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ParameterError("dot product length mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double quadratic_form(const Matrix& a, std::span<const double> v) {
  return bilinear_form(v, a, v);
}

double bilinear_form(std::span<const double> u, const Matrix& a,
                     std::span<const double> v) {
  if (a.rows() != u.size() || a.cols() != v.size()) {
    throw ParameterError("bilinear form shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * dot(a.row(i), v);
  return acc;
}

double max_abs(std::span<const double> v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

LuFactorization lu_factor(const Matrix& a, double pivot_ratio) {
  if (!a.square()) throw ParameterError("lu_factor needs a square matrix");
  if (!a.all_finite()) throw ParameterError("lu_factor input has non-finite entries");

  LuFactorization f;
  const std::size_t n = a.rows();
  f.n_ = n;
  f.lu_ = a;
  f.perm_.resize(n);
  std::iota(f.perm_.begin(), f.perm_.end(), std::size_t{0});
  f.norm_one_ = a.norm_one();
  const double threshold = pivot_ratio * a.norm_inf();

  Matrix& lu = f.lu_;
  double log_det = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > best) {
        best = std::abs(lu(i, k));
        p = i;
      }
    }
    if (best == 0.0 || best < threshold) {
      std::ostringstream os;
      os << "singular matrix: pivot " << k << " has magnitude " << best;
      throw SingularMatrixError(k, os.str());
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
      std::swap(f.perm_[k], f.perm_[p]);
      f.sign_ = -f.sign_;
    }
    const double pivot = lu(k, k);
    if (pivot < 0.0) f.sign_ = -f.sign_;
    log_det += std::log(std::abs(pivot));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = lu(i, k) / pivot;
      lu(i, k) = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= l * lu(k, j);
    }
  }
  f.log_abs_det_ = log_det;
  return f;
}

double LuFactorization::determinant() const {
  return sign_ * std::exp(log_abs_det_);
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
  if (b.size() != n_) throw ParameterError("lu_solve right-hand side length mismatch");
  std::vector<double> y(n_);
  for (std::size_t i = 0; i < n_; ++i) y[i] = b[perm_[i]];
  // Forward substitution with unit L.
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = y[i];
    for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * y[j];
    y[i] = acc;
  }
  for (std::size_t i = n_; i-- > 0;) {
    double acc = y[i];
    for (std::size_t j = i + 1; j < n_; ++j) acc -= lu_(i, j) * y[j];
    y[i] = acc / lu_(i, i);
  }
  return y;
}

std::vector<double> LuFactorization::solve_transposed(std::span<const double> b) const {
  if (b.size() != n_) throw ParameterError("lu_solve right-hand side length mismatch");
  // A^T = U^T L^T P, so solve U^T z = b, L^T w = z, then y = P^T w.
  std::vector<double> z(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = z[i];
    for (std::size_t j = 0; j < i; ++j) acc -= lu_(j, i) * z[j];
    z[i] = acc / lu_(i, i);
  }
  for (std::size_t i = n_; i-- > 0;) {
    double acc = z[i];
    for (std::size_t j = i + 1; j < n_; ++j) acc -= lu_(j, i) * z[j];
    z[i] = acc;
  }
  std::vector<double> y(n_);
  for (std::size_t i = 0; i < n_; ++i) y[perm_[i]] = z[i];
  return y;
}

Matrix LuFactorization::lower() const {
  Matrix l = Matrix::identity(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < i; ++j) l(i, j) = lu_(i, j);
  return l;
}

Matrix LuFactorization::upper() const {
  Matrix u(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) u(i, j) = lu_(i, j);
  return u;
}

std::vector<double> lu_solve(const LuFactorization& f, std::span<const double> b) {
  return f.solve(b);
}

namespace {

double norm1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

// Lower bound on ||A^{-1}||_1 by Hager's method with Higham's extra probe.
double inverse_norm_one_estimate(const LuFactorization& f) {
  const std::size_t n = f.size();
  if (n == 0) return 0.0;
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  double est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const auto y = f.solve(x);
    const double candidate = norm1(y);
    if (iter > 0 && candidate <= est) break;
    est = candidate;
    std::vector<double> sgn(n);
    for (std::size_t i = 0; i < n; ++i) sgn[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    const auto z = f.solve_transposed(sgn);
    std::size_t j = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(z[i]) > std::abs(z[j])) j = i;
    if (iter > 0 && std::abs(z[j]) <= dot(z, x)) break;
    std::fill(x.begin(), x.end(), 0.0);
    x[j] = 1.0;
  }
  if (n > 1) {
    std::vector<double> alt(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double mag = 1.0 + static_cast<double>(i) / static_cast<double>(n - 1);
      alt[i] = (i % 2 == 0) ? mag : -mag;
    }
    const double alt_est = 2.0 * norm1(f.solve(alt)) / (3.0 * static_cast<double>(n));
    est = std::max(est, alt_est);
  }
  return est;
}

}  // namespace

double condition_estimate(const LuFactorization& f) {
  const double inv = inverse_norm_one_estimate(f);
  const double cond = f.norm_one_of_input() * inv;
  if (!std::isfinite(cond)) return std::numeric_limits<double>::infinity();
  return std::max(cond, 1.0);
}

double condition_estimate(const Matrix& a) {
  try {
    return condition_estimate(lu_factor(a));
  } catch (const SingularMatrixError&) {
    return std::numeric_limits<double>::infinity();
  }
}

void add_diagonal(Matrix& a, double jitter) {
  const std::size_t n = std::min(a.rows(), a.cols());
  for (std::size_t i = 0; i < n; ++i) a(i, i) += jitter;
}

}  // namespace kquad
