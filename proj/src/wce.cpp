#include "kquad/wce.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kquad/errors.hpp"

namespace kquad {

double embedding_eval(const SpectralModel& model, const CoefficientVector& g, double x) {
  double acc = 0.0;
  for (std::size_t m = 1; m <= g.support(); ++m) {
    if (g[m] != 0.0) acc += model.eigenvalue(m) * g[m] * model.eigenfunction(m, x);
  }
  return acc;
}

std::vector<double> embedding_vector(const SpectralModel& model, const CoefficientVector& g,
                                     std::span<const double> points) {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = embedding_eval(model, g, points[i]);
  return out;
}

double embedding_norm_squared(const SpectralModel& model, const CoefficientVector& g) {
  double acc = 0.0;
  for (std::size_t m = 1; m <= g.support(); ++m) acc += model.eigenvalue(m) * g[m] * g[m];
  return acc;
}

WceReport wce_squared(const SpectralModel& model, const NodeSet& nodes,
                      std::span<const double> weights, const CoefficientVector& g) {
  if (weights.size() != nodes.size()) {
    throw ParameterError("weight count does not match node count");
  }
  WceReport r;
  r.embedding_norm_squared = embedding_norm_squared(model, g);
  r.cross_term = dot(embedding_vector(model, g, nodes.points), weights);
  r.quad_form = quadratic_form(kernel_matrix(model, nodes.points), weights);
  r.wce_squared = r.embedding_norm_squared - 2.0 * r.cross_term + r.quad_form;
  const double scale = std::max({1.0, r.embedding_norm_squared, std::abs(r.quad_form)});
  if (!(r.wce_squared >= -1e-9 * scale)) {
    std::ostringstream os;
    os << "squared worst-case error is negative (" << r.wce_squared << ")";
    throw ConsistencyError(os.str());
  }
  return r;
}

WceReport wce_squared(const SpectralModel& model, const NodeSet& nodes,
                      const WeightVector& weights, const CoefficientVector& g) {
  return wce_squared(model, nodes, std::span<const double>(weights.weights), g);
}

Matrix mercer_truncated_kernel_matrix(const SpectralModel& model, const NodeSet& nodes) {
  return truncated_kernel_matrix(model, nodes.points, nodes.size(), GammaSelector::mercer());
}

namespace {

void require_in_span(const CoefficientVector& g, std::size_t n, const char* what) {
  if (g.effective_support() > n) {
    std::ostringstream os;
    os << what << " has coefficients beyond index N = " << n;
    throw PreconditionError(os.str());
  }
}

}  // namespace

double error_decomposition(const SpectralModel& model, const NodeSet& nodes,
                           const CoefficientVector& g) {
  const std::size_t n = nodes.size();
  require_in_span(g, n, "g");
  if (g.is_zero()) return 0.0;
  const auto v = lu_factor(nodes.feature_matrix).solve(g.head(n));
  const Matrix k_perp =
      kernel_matrix(model, nodes.points) - mercer_truncated_kernel_matrix(model, nodes);
  return quadratic_form(k_perp, v);
}

Matrix tau_matrix(const SpectralModel& model, const NodeSet& nodes) {
  const std::size_t n = nodes.size();
  const auto lu = lu_factor(mercer_truncated_kernel_matrix(model, nodes));
  const Matrix& phi = nodes.feature_matrix;
  std::vector<double> root_sigma(n);
  for (std::size_t k = 0; k < n; ++k) root_sigma[k] = std::sqrt(model.eigenvalue(k + 1));

  Matrix tau(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    const auto y = lu.solve(phi.row(col));
    for (std::size_t row = 0; row < n; ++row) {
      tau(row, col) = root_sigma[row] * root_sigma[col] * dot(phi.row(row), y);
    }
  }
  return tau;
}

double cross_term(const SpectralModel& model, const NodeSet& nodes,
                  const CoefficientVector& eps, const CoefficientVector& eps_tilde,
                  std::size_t m) {
  const std::size_t n = nodes.size();
  if (m <= n) {
    std::ostringstream os;
    os << "cross_term needs m > N (m = " << m << ", N = " << n << ")";
    throw ParameterError(os.str());
  }
  require_in_span(eps, n, "eps");
  require_in_span(eps_tilde, n, "eps_tilde");
  const auto lu = lu_factor(nodes.feature_matrix);
  std::vector<double> phi_m(n);
  for (std::size_t i = 0; i < n; ++i) phi_m[i] = model.eigenfunction(m, nodes.points[i]);
  const double a = dot(phi_m, lu.solve(eps.head(n)));
  const double b = dot(phi_m, lu.solve(eps_tilde.head(n)));
  return a * b;
}

}  // namespace kquad
