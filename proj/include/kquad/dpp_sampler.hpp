#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kquad/dense_linalg.hpp"
#include "kquad/rng.hpp"
#include "kquad/spectral_model.hpp"

namespace kquad {

/// An ordered node configuration x in [0,1]^N with its feature matrix
/// Phi_N(x), whose entry (n, i) is phi_{n+1}(x_i): rows index eigenfunctions,
/// columns index nodes.
struct NodeSet {
  std::vector<double> points;
  Matrix feature_matrix;
  double condition_phi = 1.0;
  std::uint64_t seed_used = 0;
  std::uint64_t stream_id = 0;
  std::size_t rejection_count = 0;
  std::size_t resample_count = 0;

  std::size_t size() const noexcept { return points.size(); }
};

// Phi_N(x) for an arbitrary configuration (may be singular).
Matrix feature_matrix(const SpectralModel& model, std::span<const double> points);

// Wraps user-supplied nodes. Throws DomainError for points outside [0,1]
// and SingularMatrixError when Phi_N(x) is singular (e.g. repeated points).
NodeSet make_node_set(const SpectralModel& model, std::vector<double> points);

// (1/N!) det^2 Phi_N(x); exactly 0 for singular configurations.
double joint_density(const SpectralModel& model, std::span<const double> points);
double joint_density(const SpectralModel& model, const NodeSet& nodes);

// sup_x kappa_N(x,x): N when the top index closes a cos/sin pair, else N+1.
double projection_kernel_sup(std::size_t n);

/// Sequential (chain-rule) construction of the projection DPP with kernel
/// kappa_N(x,y) = sum_{n<=N} phi_n(x) phi_n(y). After i points are placed,
/// the next one has density
///   p(x | x_1..x_i) = || P_i^perp psi(x) ||^2 / (N - i),
/// psi(x) = (phi_1(x), ..., phi_N(x)), P_i^perp the projector onto the
/// orthogonal complement of span{psi(x_1), ..., psi(x_i)}. The complement
/// is tracked through an incrementally built orthonormal basis.
class ChainRule {
 public:
  ChainRule(const SpectralModel& model, std::size_t n);

  std::size_t target_size() const noexcept { return n_; }
  std::size_t placed() const noexcept { return basis_.size(); }
  bool complete() const noexcept { return placed() == n_; }

  // kappa_N(x,x) minus its projection onto the placed feature vectors.
  double residual(double x) const;
  // Conditional density of the next point.
  double density(double x) const;
  double envelope() const noexcept { return envelope_; }

  // Throws SingularMatrixError if psi(x) is (numerically) in the span of
  // the already placed feature vectors.
  void push(double x);

 private:
  std::vector<double> project_out(std::span<const double> psi) const;

  const SpectralModel* model_;
  std::size_t n_;
  double envelope_;
  std::vector<std::vector<double>> basis_;
};

struct SamplerOptions {
  std::size_t max_proposals_per_point = 1'000'000;
  // Configurations with cond(Phi_N) above this are redrawn.
  double max_condition = 1e10;
  std::size_t max_resamples = 10;
};

/// Exact sampler for the projection DPP with density (1/N!) det^2 Phi_N(x)
/// on [0,1]^N: chain rule with uniform proposals and rejection against
/// envelope projection_kernel_sup(N). Ill-conditioned results are redrawn
/// on rng.split(attempt).
/// Throws SamplerStallError, ResampleExhaustedError.
NodeSet sample_projection_dpp(const SpectralModel& model, std::size_t n,
                              const RngStream& rng,
                              const SamplerOptions& options = {});

}  // namespace kquad
