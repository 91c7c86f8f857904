#include "kquad/spectral_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kquad/errors.hpp"

namespace kquad {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
// Longest cosine series accepted for non-integer orders.
constexpr double kMaxSeriesTerms = 5e7;

void check_point(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << name << " = " << x << " lies outside [0,1]";
    throw DomainError(os.str());
  }
}

void check_index(std::size_t m) {
  if (m == 0) throw IndexError("eigen-index must be >= 1");
}

}  // namespace

GammaSelector GammaSelector::explicit_sequence(std::vector<double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      std::ostringstream os;
      os << "gamma_" << (i + 1) << " = " << values[i] << " is not positive";
      throw ParameterError(os.str());
    }
  }
  return GammaSelector(Kind::Explicit, std::move(values));
}

double GammaSelector::at(const SpectralModel& model, std::size_t m) const {
  check_index(m);
  switch (kind_) {
    case Kind::Unit:
      return 1.0;
    case Kind::Mercer:
      return model.eigenvalue(m);
    case Kind::Explicit:
      if (m > values_.size()) throw IndexError("explicit gamma sequence too short");
      return values_[m - 1];
  }
  return 0.0;
}

void GammaSelector::require_length(std::size_t m_max) const {
  if (kind_ == Kind::Explicit && values_.size() < m_max) {
    std::ostringstream os;
    os << "explicit gamma sequence has " << values_.size() << " entries, need "
       << m_max;
    throw ParameterError(os.str());
  }
}

std::string GammaSelector::describe() const {
  switch (kind_) {
    case Kind::Unit:
      return "unit";
    case Kind::Mercer:
      return "mercer";
    case Kind::Explicit:
      return "explicit";
  }
  return "?";
}

double bernoulli_polynomial(int degree, double t) {
  switch (degree) {
    case 2:
      return t * t - t + 1.0 / 6.0;
    case 4: {
      const double t2 = t * t;
      return t2 * t2 - 2.0 * t2 * t + t2 - 1.0 / 30.0;
    }
    case 6: {
      const double t2 = t * t;
      const double t4 = t2 * t2;
      return t4 * t2 - 3.0 * t4 * t + 2.5 * t4 - 0.5 * t2 + 1.0 / 42.0;
    }
    default:
      throw ParameterError("bernoulli_polynomial supports degrees 2, 4, 6");
  }
}

SpectralModel::SpectralModel(double s, double series_tolerance) : s_(s) {
  if (!(s > 0.5) || !std::isfinite(s)) {
    throw ParameterError("smoothness order s must be a finite real > 1/2");
  }
  if (s == 1.0 || s == 2.0 || s == 3.0) {
    integer_order_ = static_cast<int>(s);
  }
  switch (integer_order_) {
    case 1:
      trace_ = 1.0 + kPi * kPi / 6.0;
      break;
    case 2:
      trace_ = 1.0 + std::pow(kPi, 4) / 90.0;
      break;
    case 3:
      trace_ = 1.0 + std::pow(kPi, 6) / 945.0;
      break;
    default: {
      if (!(series_tolerance > 0.0)) {
        throw ParameterError("series tolerance must be positive");
      }
      // sum_{m>M} m^{-2s} <= M^{1-2s} / (2s-1)
      const double p = 2.0 * s - 1.0;
      const double terms = std::ceil(std::pow(series_tolerance * p, -1.0 / p));
      if (!(terms <= kMaxSeriesTerms)) {
        throw ParameterError("series tolerance unreachable for this order s");
      }
      series_terms_ = static_cast<std::size_t>(std::max(terms, 1.0));
      trace_ = 1.0 + std::riemann_zeta(2.0 * s);
    }
  }
}

double SpectralModel::eigenvalue(std::size_t m) const {
  check_index(m);
  if (m == 1) return 1.0;
  const double j = static_cast<double>(m / 2);
  return 0.5 * std::pow(j, -2.0 * s_);
}

double SpectralModel::eigenfunction(std::size_t m, double x) const {
  check_index(m);
  check_point(x, "x");
  if (m == 1) return 1.0;
  const double arg = 2.0 * kPi * static_cast<double>(m / 2) * x;
  return kSqrt2 * ((m % 2 == 0) ? std::cos(arg) : std::sin(arg));
}

void SpectralModel::features(double x, std::span<double> out) const {
  check_point(x, "x");
  if (out.empty()) return;
  out[0] = 1.0;
  for (std::size_t m = 2; m <= out.size(); ++m) {
    const double arg = 2.0 * kPi * static_cast<double>(m / 2) * x;
    out[m - 1] = kSqrt2 * ((m % 2 == 0) ? std::cos(arg) : std::sin(arg));
  }
}

std::vector<double> SpectralModel::features(double x, std::size_t count) const {
  std::vector<double> out(count);
  features(x, std::span<double>(out));
  return out;
}

double SpectralModel::cosine_series(double t) const {
  const double frac = t - std::floor(t);
  switch (integer_order_) {
    case 1:
      return kPi * kPi * bernoulli_polynomial(2, frac);
    case 2:
      return -std::pow(kPi, 4) / 3.0 * bernoulli_polynomial(4, frac);
    case 3:
      return 2.0 * std::pow(kPi, 6) / 45.0 * bernoulli_polynomial(6, frac);
    default:
      break;
  }
  // Sum smallest terms first.
  double acc = 0.0;
  for (std::size_t m = series_terms_; m >= 1; --m) {
    const double md = static_cast<double>(m);
    acc += std::pow(md, -2.0 * s_) * std::cos(2.0 * kPi * md * frac);
  }
  return acc;
}

double SpectralModel::kernel(double x, double y) const {
  check_point(x, "x");
  check_point(y, "y");
  return 1.0 + cosine_series(x - y);
}

double SpectralModel::truncated_kernel(double x, double y, std::size_t order,
                                       const GammaSelector& gamma) const {
  check_point(x, "x");
  check_point(y, "y");
  if (order == 0) throw ParameterError("truncation order M must be >= 1");
  gamma.require_length(order);
  double acc = 0.0;
  for (std::size_t m = 1; m <= order; ++m) {
    acc += gamma.at(*this, m) * eigenfunction(m, x) * eigenfunction(m, y);
  }
  return acc;
}

double SpectralModel::tail_sum(std::size_t n) const {
  double head = 0.0;
  for (std::size_t m = 1; m <= n; ++m) head += eigenvalue(m);
  return trace_ - head;
}

}  // namespace kquad
