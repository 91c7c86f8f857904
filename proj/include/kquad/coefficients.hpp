#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kquad/spectral_model.hpp"

namespace kquad {

/// g = sum_m c_m phi_m, stored as (c_1, ..., c_{M_g}).
class CoefficientVector {
 public:
  CoefficientVector() = default;
  // Throws ParameterError on non-finite entries.
  explicit CoefficientVector(std::vector<double> coeffs);

  // c * phi_index.
  static CoefficientVector basis(std::size_t index, double c = 1.0);

  std::size_t support() const noexcept { return coeffs_.size(); }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  // c_m for m >= 1; zero beyond the support.
  double operator[](std::size_t m) const;

  // Index of the last non-zero coefficient, 0 for g = 0.
  std::size_t effective_support() const;
  bool is_zero() const { return effective_support() == 0; }

  // ||g||^2_omega = sum c_m^2.
  double norm_squared() const;
  // sum_{m > n} c_m^2, the mass removed by projecting onto E_n.
  double tail_mass(std::size_t n) const;
  // g_n: first n coefficients (zero-padded).
  std::vector<double> head(std::size_t n) const;

  // sum_m c_m phi_m(x).
  double evaluate(const SpectralModel& model, double x) const;

  CoefficientVector& operator+=(const CoefficientVector& other);

  // Canonical "c*e<k>" text, e.g. "e1+2*e8".
  std::string to_string() const;

 private:
  std::vector<double> coeffs_;
};

/// Parses a sum of terms `c*e<k>` (k >= 1), e.g. "e1", "0.5*e3+2*e10",
/// "e1-e2". The literal "0" is the zero function. Repeated indices add.
/// Throws ParameterError on malformed input.
CoefficientVector parse_g_expression(std::string_view text);

}  // namespace kquad
