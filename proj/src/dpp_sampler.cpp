#include "kquad/dpp_sampler.hpp"

#include <cmath>
#include <sstream>

#include "kquad/errors.hpp"

namespace kquad {

Matrix feature_matrix(const SpectralModel& model, std::span<const double> points) {
  const std::size_t n = points.size();
  Matrix phi(n, n);
  std::vector<double> column(n);
  for (std::size_t i = 0; i < n; ++i) {
    model.features(points[i], column);
    for (std::size_t k = 0; k < n; ++k) phi(k, i) = column[k];
  }
  return phi;
}

NodeSet make_node_set(const SpectralModel& model, std::vector<double> points) {
  if (points.empty()) throw ParameterError("node set must contain at least one point");
  NodeSet nodes;
  nodes.feature_matrix = feature_matrix(model, points);  // validates the domain
  nodes.points = std::move(points);
  nodes.condition_phi = condition_estimate(lu_factor(nodes.feature_matrix));
  return nodes;
}

double joint_density(const SpectralModel& model, std::span<const double> points) {
  const std::size_t n = points.size();
  if (n == 0) return 1.0;
  try {
    const auto lu = lu_factor(feature_matrix(model, points), 0.0);
    return std::exp(2.0 * lu.log_abs_det() - std::lgamma(static_cast<double>(n) + 1.0));
  } catch (const SingularMatrixError&) {
    return 0.0;
  }
}

double joint_density(const SpectralModel& model, const NodeSet& nodes) {
  return joint_density(model, nodes.points);
}

double projection_kernel_sup(std::size_t n) {
  const double nd = static_cast<double>(n);
  return (n % 2 == 1) ? nd : nd + 1.0;
}

ChainRule::ChainRule(const SpectralModel& model, std::size_t n)
    : model_(&model), n_(n), envelope_(projection_kernel_sup(n)) {
  if (n == 0) throw ParameterError("projection DPP needs N >= 1");
  basis_.reserve(n);
}

std::vector<double> ChainRule::project_out(std::span<const double> psi) const {
  std::vector<double> r(psi.begin(), psi.end());
  for (const auto& e : basis_) {
    const double c = dot(e, r);
    for (std::size_t k = 0; k < n_; ++k) r[k] -= c * e[k];
  }
  return r;
}

double ChainRule::residual(double x) const {
  const auto r = project_out(model_->features(x, n_));
  return dot(r, r);
}

double ChainRule::density(double x) const {
  if (complete()) throw PreconditionError("all points already placed");
  return residual(x) / static_cast<double>(n_ - placed());
}

void ChainRule::push(double x) {
  if (complete()) throw PreconditionError("all points already placed");
  const auto psi = model_->features(x, n_);
  auto r = project_out(psi);
  const double psi_norm = std::sqrt(dot(psi, psi));
  // Second pass restores orthogonality lost to cancellation.
  r = project_out(r);
  const double norm = std::sqrt(dot(r, r));
  if (!(norm > 1e-12 * psi_norm)) {
    std::ostringstream os;
    os << "feature vector of point " << placed() << " (x = " << x
       << ") is dependent on the previous points";
    throw SingularMatrixError(placed(), os.str());
  }
  for (double& v : r) v /= norm;
  basis_.push_back(std::move(r));
}

namespace {

std::vector<double> chain_rule_draw(const SpectralModel& model, std::size_t n,
                                    RngStream& rng, const SamplerOptions& options,
                                    std::size_t& rejections) {
  ChainRule chain(model, n);
  std::vector<double> points;
  points.reserve(n);
  const double envelope = chain.envelope();
  while (!chain.complete()) {
    std::size_t proposals = 0;
    for (;;) {
      if (++proposals > options.max_proposals_per_point) {
        std::ostringstream os;
        os << "rejection sampler stalled at point " << chain.placed() << " of " << n;
        throw SamplerStallError(os.str());
      }
      const double x = rng.uniform();
      const double u = rng.uniform();
      if (u * envelope < chain.residual(x)) {
        chain.push(x);
        points.push_back(x);
        break;
      }
      ++rejections;
    }
  }
  return points;
}

}  // namespace

NodeSet sample_projection_dpp(const SpectralModel& model, std::size_t n,
                              const RngStream& rng, const SamplerOptions& options) {
  if (n == 0) throw ParameterError("projection DPP needs N >= 1");
  NodeSet nodes;
  nodes.seed_used = rng.seed();
  nodes.stream_id = rng.stream_id();
  for (std::size_t attempt = 0; attempt <= options.max_resamples; ++attempt) {
    RngStream stream = attempt == 0 ? rng : rng.split(attempt);
    try {
      auto points = chain_rule_draw(model, n, stream, options, nodes.rejection_count);
      Matrix phi = feature_matrix(model, points);
      const double cond = condition_estimate(phi);
      if (cond <= options.max_condition) {
        nodes.points = std::move(points);
        nodes.feature_matrix = std::move(phi);
        nodes.condition_phi = cond;
        return nodes;
      }
    } catch (const SingularMatrixError&) {
      // Numerically coincident points; redraw.
    }
    nodes.resample_count = attempt + 1;
  }
  std::ostringstream os;
  os << "no well-conditioned configuration after " << options.max_resamples
     << " resamples (N = " << n << ")";
  throw ResampleExhaustedError(os.str());
}

}  // namespace kquad
