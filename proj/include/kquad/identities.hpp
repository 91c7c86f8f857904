#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace kquad {

struct IdentitySuiteConfig {
  std::size_t configs = 200;
  std::size_t n_min = 2;
  std::size_t n_max = 12;
  std::vector<double> orders{2.0, 3.0};
  std::size_t gammas_per_config = 5;
  std::uint64_t seed = 20240601;
  // Configurations whose Phi_N or K_N condition exceeds this are redrawn.
  double max_condition = 1e9;
  std::size_t workers = 0;

  double tau_tolerance = 1e-7;
  double decomposition_tolerance = 1e-8;  // relative to 1 + wce^2
  double cross_term_tolerance = 1e-8;
  double gamma_invariance_tolerance = 1e-8;  // relative to max |w|
  double exactness_tolerance = 1e-9;
};

struct IdentityDeviation {
  const char* name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_deviation <= tolerance; }
};

struct IdentitySuiteReport {
  std::size_t configs = 0;
  std::size_t redraws = 0;
  double seconds = 0.0;
  // tau identity, error decomposition, EZQ cross term, gamma invariance, exactness.
  std::vector<IdentityDeviation> deviations;

  bool pass() const;
};

/// Deterministic identity checks on random projection-DPP configurations:
///   tau(x) = I;
///   wce^2(EZQ) equals v^T (K - K_N) v, v = Phi^{-1} eps;
///   mu_g(x)^T w_EZ = ||mu_g||^2 for g in E_N;
///   KBIQ(gamma, M = N) weights equal EZQ weights for random positive gamma;
///   I^{EZ,n}(phi_j) = delta_{jn} for n, j <= N.
IdentitySuiteReport run_identity_suite(const IdentitySuiteConfig& cfg);

void print_identity_report(std::ostream& os, const IdentitySuiteReport& report);

}  // namespace kquad
