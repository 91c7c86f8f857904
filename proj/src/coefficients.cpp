#include "kquad/coefficients.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "kquad/errors.hpp"

namespace kquad {

CoefficientVector::CoefficientVector(std::vector<double> coeffs)
    : coeffs_(std::move(coeffs)) {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw ParameterError("coefficient vector has a non-finite entry");
  }
}

CoefficientVector CoefficientVector::basis(std::size_t index, double c) {
  if (index == 0) throw IndexError("basis index must be >= 1");
  std::vector<double> v(index, 0.0);
  v[index - 1] = c;
  return CoefficientVector(std::move(v));
}

double CoefficientVector::operator[](std::size_t m) const {
  if (m == 0) throw IndexError("coefficient index must be >= 1");
  return m <= coeffs_.size() ? coeffs_[m - 1] : 0.0;
}

std::size_t CoefficientVector::effective_support() const {
  for (std::size_t m = coeffs_.size(); m > 0; --m)
    if (coeffs_[m - 1] != 0.0) return m;
  return 0;
}

double CoefficientVector::norm_squared() const {
  double acc = 0.0;
  for (double c : coeffs_) acc += c * c;
  return acc;
}

double CoefficientVector::tail_mass(std::size_t n) const {
  double acc = 0.0;
  for (std::size_t m = n + 1; m <= coeffs_.size(); ++m) acc += coeffs_[m - 1] * coeffs_[m - 1];
  return acc;
}

std::vector<double> CoefficientVector::head(std::size_t n) const {
  std::vector<double> out(n, 0.0);
  for (std::size_t m = 1; m <= std::min(n, coeffs_.size()); ++m) out[m - 1] = coeffs_[m - 1];
  return out;
}

double CoefficientVector::evaluate(const SpectralModel& model, double x) const {
  double acc = 0.0;
  for (std::size_t m = 1; m <= coeffs_.size(); ++m) {
    if (coeffs_[m - 1] != 0.0) acc += coeffs_[m - 1] * model.eigenfunction(m, x);
  }
  return acc;
}

CoefficientVector& CoefficientVector::operator+=(const CoefficientVector& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

std::string CoefficientVector::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t m = 1; m <= coeffs_.size(); ++m) {
    const double c = coeffs_[m - 1];
    if (c == 0.0) continue;
    if (!first) os << (c < 0 ? "-" : "+");
    else if (c < 0) os << "-";
    if (std::abs(c) != 1.0) {
      // Shortest representation that round-trips.
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, std::abs(c));
      os << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << "*";
    }
    os << "e" << m;
    first = false;
  }
  return first ? "0" : os.str();
}

namespace {

[[noreturn]] void malformed(std::string_view text, std::size_t pos, const char* why) {
  std::ostringstream os;
  os << "malformed g expression '" << text << "' at position " << pos << ": " << why;
  throw ParameterError(os.str());
}

}  // namespace

CoefficientVector parse_g_expression(std::string_view text) {
  std::string compact;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) compact.push_back(ch);
  if (compact.empty()) malformed(text, 0, "empty");
  if (compact == "0") return CoefficientVector();

  CoefficientVector g;
  const char* const begin = compact.data();
  const char* const end = begin + compact.size();
  const char* p = begin;
  while (p < end) {
    double sign = 1.0;
    if (*p == '+' || *p == '-') {
      sign = (*p == '-') ? -1.0 : 1.0;
      ++p;
    } else if (p != begin) {
      malformed(text, p - begin, "expected '+' or '-'");
    }
    double c = 1.0;
    if (p < end && *p != 'e') {
      auto [next, ec] = std::from_chars(p, end, c);
      if (ec != std::errc() || next == p) malformed(text, p - begin, "expected a number");
      p = next;
      if (p >= end || *p != '*') malformed(text, p - begin, "expected '*'");
      ++p;
    }
    if (p >= end || *p != 'e') malformed(text, p - begin, "expected 'e<k>'");
    ++p;
    std::size_t k = 0;
    auto [next, ec] = std::from_chars(p, end, k);
    if (ec != std::errc() || next == p) malformed(text, p - begin, "expected an integer index");
    if (k == 0) malformed(text, p - begin, "index must be >= 1");
    p = next;
    if (!std::isfinite(c)) malformed(text, p - begin, "non-finite coefficient");
    g += CoefficientVector::basis(k, sign * c);
  }
  return g;
}

}  // namespace kquad
