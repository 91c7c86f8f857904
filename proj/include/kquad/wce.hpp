#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kquad/coefficients.hpp"
#include "kquad/dense_linalg.hpp"
#include "kquad/dpp_sampler.hpp"
#include "kquad/quadrature_weights.hpp"
#include "kquad/spectral_model.hpp"

namespace kquad {

// mu_g(x) = sum_m sigma_m c_m phi_m(x).
double embedding_eval(const SpectralModel& model, const CoefficientVector& g, double x);
std::vector<double> embedding_vector(const SpectralModel& model, const CoefficientVector& g,
                                     std::span<const double> points);
// ||mu_g||_F^2 = sum_m sigma_m c_m^2.
double embedding_norm_squared(const SpectralModel& model, const CoefficientVector& g);

/// ||mu_g - sum_i w_i k(x_i, .)||_F^2 expanded as
///   ||mu_g||^2 - 2 mu_g(x)^T w + w^T K(x) w.
struct WceReport {
  double wce_squared = 0.0;
  double embedding_norm_squared = 0.0;
  double cross_term = 0.0;
  double quad_form = 0.0;
  std::optional<double> decomposition_value;
};

// Throws ConsistencyError if the expansion is negative beyond roundoff.
WceReport wce_squared(const SpectralModel& model, const NodeSet& nodes,
                      std::span<const double> weights, const CoefficientVector& g);
WceReport wce_squared(const SpectralModel& model, const NodeSet& nodes,
                      const WeightVector& weights, const CoefficientVector& g);

// K_N(x) = Phi_N(x)^T diag(sigma_1..sigma_N) Phi_N(x).
Matrix mercer_truncated_kernel_matrix(const SpectralModel& model, const NodeSet& nodes);

/// v^T (K(x) - K_N(x)) v with v = Phi_N(x)^{-1} eps, the EZQ error for g in E_N.
/// Throws PreconditionError if g has coefficients beyond N.
double error_decomposition(const SpectralModel& model, const NodeSet& nodes,
                           const CoefficientVector& g);

// tau_{n,n'} = sqrt(sigma_n sigma_n') phi_n(x)^T K_N(x)^{-1} phi_n'(x); the identity.
Matrix tau_matrix(const SpectralModel& model, const NodeSet& nodes);

/// eps^T Phi^{-T} phi_m(x) phi_m(x)^T Phi^{-1} eps_tilde for m > N.
/// Throws ParameterError for m <= N.
double cross_term(const SpectralModel& model, const NodeSet& nodes,
                  const CoefficientVector& eps, const CoefficientVector& eps_tilde,
                  std::size_t m);

}  // namespace kquad
