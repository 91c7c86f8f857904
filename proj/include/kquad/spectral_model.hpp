#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace kquad {

class SpectralModel;

// Selects the positive sequence (gamma_m) used by truncated kernels.
class GammaSelector {
 public:
  enum class Kind { Unit, Mercer, Explicit };

  static GammaSelector unit() { return GammaSelector(Kind::Unit, {}); }
  static GammaSelector mercer() { return GammaSelector(Kind::Mercer, {}); }
  // Throws ParameterError if any entry is not strictly positive and finite.
  static GammaSelector explicit_sequence(std::vector<double> values);

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& values() const noexcept { return values_; }

  // gamma_m for m >= 1.
  double at(const SpectralModel& model, std::size_t m) const;

  // Throws ParameterError when an explicit sequence is shorter than m_max.
  void require_length(std::size_t m_max) const;

  std::string describe() const;

 private:
  GammaSelector(Kind kind, std::vector<double> values)
      : kind_(kind), values_(std::move(values)) {}

  Kind kind_;
  std::vector<double> values_;
};

/// Mercer data of the periodic Sobolev kernel of order s on [0,1] with the
/// uniform reference measure:
///
///   k_s(x,y) = 1 + sum_{m>=1} m^{-2s} cos(2 pi m (x - y)).
///
/// Eigenpairs are enumerated as
///   index 1      : sigma = 1,            phi(x) = 1
///   index 2j     : sigma = j^{-2s} / 2,  phi(x) = sqrt(2) cos(2 pi j x)
///   index 2j + 1 : sigma = j^{-2s} / 2,  phi(x) = sqrt(2) sin(2 pi j x)
///
/// For s in {1,2,3} the kernel is evaluated exactly through Bernoulli
/// polynomials. Any other s > 1/2 uses a truncated cosine series whose
/// tail is bounded by `series_tolerance`.
class SpectralModel {
 public:
  explicit SpectralModel(double s, double series_tolerance = 1e-10);

  double s() const noexcept { return s_; }
  bool closed_form() const noexcept { return integer_order_ != 0; }
  // Sum of all eigenvalues, 1 + zeta(2s).
  double trace() const noexcept { return trace_; }

  double eigenvalue(std::size_t m) const;
  double eigenfunction(std::size_t m, double x) const;

  // Writes phi_1(x), ..., phi_{out.size()}(x) into out.
  void features(double x, std::span<double> out) const;
  std::vector<double> features(double x, std::size_t count) const;

  double kernel(double x, double y) const;

  // sum_{m<=order} gamma_m phi_m(x) phi_m(y).
  double truncated_kernel(double x, double y, std::size_t order,
                          const GammaSelector& gamma) const;

  // r_N = sum_{m>=N+1} sigma_m.
  double tail_sum(std::size_t n) const;

  // sum_{m>=1} m^{-2s} cos(2 pi m t), periodic in t.
  double cosine_series(double t) const;

 private:
  double s_;
  int integer_order_ = 0;  // 1, 2 or 3 when the closed form applies
  std::size_t series_terms_ = 0;
  double trace_;
};

// Bernoulli polynomials B_2, B_4, B_6 on [0,1].
double bernoulli_polynomial(int degree, double t);

}  // namespace kquad
