#include "kquad/quadrature_weights.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "kquad/errors.hpp"
#include "kquad/wce.hpp"

namespace kquad {

std::string to_string(RuleKind rule) {
  switch (rule) {
    case RuleKind::Ezq:
      return "ezq";
    case RuleKind::Okq:
      return "okq";
    case RuleKind::Kbiq:
      return "kbiq";
  }
  return "?";
}

RuleKind parse_rule(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ezq") return RuleKind::Ezq;
  if (lower == "okq") return RuleKind::Okq;
  if (lower == "kbiq") return RuleKind::Kbiq;
  throw ParameterError("unknown quadrature rule '" + std::string(text) + "'");
}

void KbiqParams::validate(std::size_t n) const {
  if (!truncation) {
    if (gamma.kind() != GammaSelector::Kind::Mercer) {
      throw ParameterError("M = infinity is only available with gamma = mercer");
    }
    return;
  }
  if (*truncation < n) {
    std::ostringstream os;
    os << "KBIQ truncation M = " << *truncation << " is below N = " << n;
    throw ParameterError(os.str());
  }
  gamma.require_length(*truncation);
}

std::string KbiqParams::describe() const {
  std::ostringstream os;
  os << "KBIQ(gamma=" << gamma.describe() << ",M=";
  if (truncation) os << *truncation;
  else os << "inf";
  os << ")";
  return os.str();
}

Matrix kernel_matrix(const SpectralModel& model, std::span<const double> points) {
  const std::size_t n = points.size();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    k(i, i) = model.kernel(points[i], points[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = model.kernel(points[i], points[j]);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Matrix truncated_kernel_matrix(const SpectralModel& model, std::span<const double> points,
                               std::size_t order, const GammaSelector& gamma) {
  if (order == 0) throw ParameterError("truncation order M must be >= 1");
  gamma.require_length(order);
  const std::size_t n = points.size();
  std::vector<double> g(order);
  for (std::size_t m = 1; m <= order; ++m) g[m - 1] = gamma.at(model, m);
  std::vector<std::vector<double>> psi(n);
  for (std::size_t i = 0; i < n; ++i) psi[i] = model.features(points[i], order);
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t m = 0; m < order; ++m) acc += g[m] * psi[i][m] * psi[j][m];
      k(i, j) = acc;
      k(j, i) = acc;
    }
  }
  return k;
}

WeightVector ez_weights(const NodeSet& nodes, const CoefficientVector& g) {
  const std::size_t n = nodes.size();
  const auto eps = g.head(n);
  const auto lu = lu_factor(nodes.feature_matrix);
  WeightVector out;
  out.weights = lu.solve(eps);
  out.nodes = nodes.points;
  out.rule = RuleKind::Ezq;
  out.label = "EZQ";
  out.discarded_mass = g.tail_mass(n);
  out.condition = nodes.condition_phi;
  return out;
}

namespace {

WeightVector solve_kernel_system(Matrix system, std::span<const double> rhs,
                                 const NodeSet& nodes, const SolveOptions& options) {
  if (options.jitter != 0.0) add_diagonal(system, options.jitter);
  const auto lu = lu_factor(system, 0.0);
  WeightVector out;
  out.weights = lu.solve(rhs);
  out.nodes = nodes.points;
  out.condition = condition_estimate(lu);
  out.ill_conditioned = out.condition > options.ill_condition_threshold;
  return out;
}

}  // namespace

WeightVector okq_weights(const SpectralModel& model, const NodeSet& nodes,
                         const CoefficientVector& g, const SolveOptions& options) {
  const auto mu = embedding_vector(model, g, nodes.points);
  auto out = solve_kernel_system(kernel_matrix(model, nodes.points), mu, nodes, options);
  out.rule = RuleKind::Okq;
  out.label = "OKQ";
  return out;
}

WeightVector kbiq_weights(const SpectralModel& model, const NodeSet& nodes,
                          const CoefficientVector& g, const KbiqParams& params,
                          const SolveOptions& options) {
  params.validate(nodes.size());
  if (!params.truncation) {
    auto out = okq_weights(model, nodes, g, options);
    out.rule = RuleKind::Kbiq;
    out.label = params.describe();
    return out;
  }
  const std::size_t order = *params.truncation;
  std::vector<double> mu(nodes.size(), 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto psi = model.features(nodes.points[i], std::min(order, g.support()));
    for (std::size_t m = 1; m <= psi.size(); ++m) {
      mu[i] += params.gamma.at(model, m) * g[m] * psi[m - 1];
    }
  }
  auto out = solve_kernel_system(
      truncated_kernel_matrix(model, nodes.points, order, params.gamma), mu, nodes, options);
  out.rule = RuleKind::Kbiq;
  out.label = params.describe();
  return out;
}

double apply_quadrature(const WeightVector& weights, const std::function<double(double)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += weights.weights[i] * f(weights.nodes[i]);
  return acc;
}

double apply_quadrature(const SpectralModel& model, const WeightVector& weights,
                        const CoefficientVector& f) {
  return apply_quadrature(weights, [&](double x) { return f.evaluate(model, x); });
}

}  // namespace kquad
