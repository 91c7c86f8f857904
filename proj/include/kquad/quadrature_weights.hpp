#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kquad/coefficients.hpp"
#include "kquad/dense_linalg.hpp"
#include "kquad/dpp_sampler.hpp"
#include "kquad/spectral_model.hpp"

namespace kquad {

enum class RuleKind { Ezq, Okq, Kbiq };

std::string to_string(RuleKind rule);
// Accepts "ezq", "okq", "kbiq" (case-insensitive).
RuleKind parse_rule(std::string_view text);

// (gamma, M) of a kernel-based interpolation rule; nullopt truncation = M = infinity.
struct KbiqParams {
  GammaSelector gamma = GammaSelector::mercer();
  std::optional<std::size_t> truncation;

  // Throws ParameterError unless M >= n, and M infinite only with gamma = mercer.
  void validate(std::size_t n) const;
  std::string describe() const;
};

struct WeightVector {
  std::vector<double> weights;
  std::vector<double> nodes;
  RuleKind rule = RuleKind::Ezq;
  std::string label;
  // sum_{m>N} c_m^2 dropped by the EZQ projection onto E_N.
  double discarded_mass = 0.0;
  // 1-norm condition estimate of the solved system.
  double condition = 1.0;
  bool ill_conditioned = false;

  std::size_t size() const noexcept { return weights.size(); }
};

struct SolveOptions {
  // Diagonal jitter added to kernel matrices. Off by default.
  double jitter = 0.0;
  // OKQ/KBIQ systems above this condition estimate are flagged.
  double ill_condition_threshold = 1e12;
};

// K(x) = (k(x_i, x_j)) with the exact kernel.
Matrix kernel_matrix(const SpectralModel& model, std::span<const double> points);
// (kappa^{gamma,M}(x_i, x_j)) assembled from the feature vectors.
Matrix truncated_kernel_matrix(const SpectralModel& model, std::span<const double> points,
                               std::size_t order, const GammaSelector& gamma);

/// EZQ weights: Phi_N(x) w = eps with eps_n = <g, phi_n>, n <= N.
/// Coefficients of g beyond N are dropped and reported in discarded_mass.
WeightVector ez_weights(const NodeSet& nodes, const CoefficientVector& g);

/// OKQ weights: K(x) w = mu_g(x).
WeightVector okq_weights(const SpectralModel& model, const NodeSet& nodes,
                         const CoefficientVector& g, const SolveOptions& options = {});

/// KBIQ weights: kappa^{gamma,M}(x) w = mu_g^{gamma,M}(x) with
/// mu_g^{gamma,M}(x) = sum_{m<=M} gamma_m c_m phi_m(x). M = infinity
/// (gamma = mercer) is OKQ.
WeightVector kbiq_weights(const SpectralModel& model, const NodeSet& nodes,
                          const CoefficientVector& g, const KbiqParams& params,
                          const SolveOptions& options = {});

// sum_i w_i f(x_i).
double apply_quadrature(const WeightVector& weights, const std::function<double(double)>& f);
double apply_quadrature(const SpectralModel& model, const WeightVector& weights,
                        const CoefficientVector& f);

}  // namespace kquad
