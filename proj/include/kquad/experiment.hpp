#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kquad/coefficients.hpp"
#include "kquad/quadrature_weights.hpp"
#include "kquad/statistics.hpp"

namespace kquad {

struct ExperimentConfig {
  double s = 2.0;
  RuleKind rule = RuleKind::Ezq;
  GammaSelector gamma = GammaSelector::mercer();
  // KBIQ truncation M = ceil(m_factor * N).
  double m_factor = 2.0;
  CoefficientVector g = CoefficientVector::basis(1);
  std::vector<std::size_t> n_list;
  std::size_t trials = 1000;
  std::uint64_t master_seed = 0;
  double jitter = 0.0;
  std::size_t workers = 0;  // 0 = hardware concurrency
  std::size_t max_resamples = 10;

  // Throws ParameterError.
  void validate() const;
  std::string rule_label() const;
};

// "5,10,20" or "first:last:step" (inclusive). Throws ParameterError.
std::vector<std::size_t> parse_n_list(std::string_view text);

// Stream id of trial t at size N; independent of every other (N, t).
std::uint64_t trial_stream_id(std::uint64_t master_seed, std::size_t n, std::size_t trial);

struct TrialRecord {
  std::size_t n = 0;
  std::size_t trial_index = 0;
  std::uint64_t seed_stream = 0;
  double wce_squared = 0.0;
  double condition_phi = 0.0;
  std::size_t resample_count = 0;
  bool failed = false;
};

struct RatePoint {
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
  std::size_t failed = 0;
  double ref_r_n = 0.0;         // r_N
  double ref_sigma_next = 0.0;  // sigma_{N+1}
};

struct RateSeries {
  std::string rule;
  std::vector<RatePoint> points;
  // Fits need at least two grid points with positive means.
  std::optional<LogLogFit> fit;
  std::optional<LogLogFit> ref_r_n_fit;
  std::optional<LogLogFit> ref_sigma_fit;
};

struct ExperimentResult {
  ExperimentConfig config;
  RateSeries series;
  std::vector<TrialRecord> trials;  // sorted by (N, trial)
};

/// Runs cfg.trials DPP trials per N, computing the squared worst-case error
/// of the configured rule. Aggregation follows trial order, so the result is
/// bitwise identical for any worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// CSV header `rule,s,g,N,trials,mean_wce2,stderr,ref_rN,ref_sigmaN1,failed_trials`.
void write_rate_csv_header(std::ostream& os);
void write_rate_csv_rows(std::ostream& os, const ExperimentResult& result);
// Trial dump `N,trial,wce2,cond_phi,resamples`.
void write_trial_csv(std::ostream& os, const std::vector<ExperimentResult>& results);

struct VerifyParams {
  double s = 2.0;
  std::size_t n = 5;
  std::size_t trials = 20'000;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  double threshold = 3.0;
};

struct StatReport {
  std::string title;
  std::vector<StatCheck> checks;
  std::size_t samples = 0;
  std::size_t failed_trials = 0;

  bool pass() const;
};

void print_report(std::ostream& os, const StatReport& report);

/// Monte-Carlo check of E I^{EZ,n}(f) = c_n and Var I^{EZ,n}(f) =
/// sum_{m>N} c_m^2, plus the bound Var <= sigma_{N+1} ||f||_F^2.
StatReport verify_theorem1(const VerifyParams& params, const CoefficientVector& f,
                           std::size_t index);

/// Cov(I^{EZ,n}(f), I^{EZ,n'}(f)) = 0 for n != n'. Throws ParameterError if n == n'.
StatReport verify_covariance(const VerifyParams& params, const CoefficientVector& f,
                             std::size_t index, std::size_t other_index);

/// E cross_term(eps, eps_tilde, m) = sum_n eps_n eps_tilde_n for m > N.
StatReport verify_theorem5(const VerifyParams& params, const CoefficientVector& eps,
                           const CoefficientVector& eps_tilde, std::size_t m);

/// Mean squared EZQ error against sum_n c_n^2 r_N (g in E_N), or against
/// the bound 4 ||g||^2 r_N when g has mass above N.
StatReport verify_theorem2(const VerifyParams& params, const CoefficientVector& g);

}  // namespace kquad
