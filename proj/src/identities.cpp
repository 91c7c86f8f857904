#include "kquad/identities.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "kquad/dpp_sampler.hpp"
#include "kquad/errors.hpp"
#include "kquad/experiment.hpp"
#include "kquad/statistics.hpp"
#include "kquad/wce.hpp"

namespace kquad {

namespace {

struct ConfigOutcome {
  double tau = 0.0;
  double decomposition = 0.0;
  double cross = 0.0;
  double gamma = 0.0;
  double exactness = 0.0;
  std::size_t redraws = 0;
};

// Unit-norm g in E_N with Gaussian coefficients.
CoefficientVector random_unit_in_span(RngStream& rng, std::size_t n) {
  std::vector<double> c(n);
  double norm = 0.0;
  for (double& v : c) {
    // Box-Muller; only the direction matters.
    const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
    v = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
    norm += v * v;
  }
  for (double& v : c) v /= std::sqrt(norm);
  return CoefficientVector(std::move(c));
}

ConfigOutcome check_config(const IdentitySuiteConfig& cfg, std::size_t index) {
  const double s = cfg.orders[index % cfg.orders.size()];
  const std::size_t span = cfg.n_max - cfg.n_min + 1;
  const std::size_t n = cfg.n_min + (index / cfg.orders.size()) % span;
  const SpectralModel model(s);
  RngStream rng(cfg.seed, trial_stream_id(cfg.seed, n, index));
  RngStream aux = rng.split(0xA5A5);

  SamplerOptions options;
  options.max_condition = cfg.max_condition;
  ConfigOutcome out;
  NodeSet nodes;
  for (std::size_t attempt = 0;; ++attempt) {
    if (attempt > 50) throw ResampleExhaustedError("identity suite could not draw a usable configuration");
    nodes = sample_projection_dpp(model, n, attempt == 0 ? rng : rng.split(attempt), options);
    out.redraws += nodes.resample_count;
    if (condition_estimate(mercer_truncated_kernel_matrix(model, nodes)) <= cfg.max_condition) break;
    ++out.redraws;
  }

  const Matrix tau = tau_matrix(model, nodes);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.tau = std::max(out.tau, std::abs(tau(i, j) - (i == j ? 1.0 : 0.0)));

  const auto g = random_unit_in_span(aux, n);
  const auto ez = ez_weights(nodes, g);
  const auto report = wce_squared(model, nodes, ez, g);
  out.decomposition = std::abs(report.wce_squared - error_decomposition(model, nodes, g)) /
                      (1.0 + report.wce_squared);
  out.cross = std::abs(report.cross_term - report.embedding_norm_squared);

  const double scale = max_abs(ez.weights);
  for (std::size_t rep = 0; rep < cfg.gammas_per_config; ++rep) {
    std::vector<double> gamma(n);
    // Log-uniform on [0.1, 10].
    for (double& v : gamma) v = std::pow(10.0, 2.0 * aux.uniform() - 1.0);
    const auto w = kbiq_weights(model, nodes, g,
                                KbiqParams{GammaSelector::explicit_sequence(gamma), n});
    for (std::size_t i = 0; i < n; ++i) {
      out.gamma = std::max(out.gamma, std::abs(w.weights[i] - ez.weights[i]) / scale);
    }
  }

  for (std::size_t k = 1; k <= n; ++k) {
    const auto w = ez_weights(nodes, CoefficientVector::basis(k));
    for (std::size_t j = 1; j <= n; ++j) {
      const double v = apply_quadrature(model, w, CoefficientVector::basis(j));
      out.exactness = std::max(out.exactness, std::abs(v - (j == k ? 1.0 : 0.0)));
    }
  }
  return out;
}

}  // namespace

bool IdentitySuiteReport::pass() const {
  for (const auto& d : deviations)
    if (!d.pass()) return false;
  return configs > 0;
}

IdentitySuiteReport run_identity_suite(const IdentitySuiteConfig& cfg) {
  if (cfg.orders.empty() || cfg.n_min < 1 || cfg.n_max < cfg.n_min) {
    throw ParameterError("identity suite needs orders and 1 <= n_min <= n_max");
  }
  const auto start = std::chrono::steady_clock::now();
  const auto outcomes = parallel_map<ConfigOutcome>(
      cfg.configs, cfg.workers, [&](std::size_t i) { return check_config(cfg, i); });

  IdentitySuiteReport report;
  report.configs = cfg.configs;
  IdentityDeviation tau{"tau matrix = identity", 0.0, cfg.tau_tolerance};
  IdentityDeviation dec{"wce^2(EZQ) = error decomposition (rel)", 0.0, cfg.decomposition_tolerance};
  IdentityDeviation cross{"mu_g(x)^T w_EZ = ||mu_g||^2", 0.0, cfg.cross_term_tolerance};
  IdentityDeviation gam{"KBIQ(gamma, M=N) = EZQ (rel)", 0.0, cfg.gamma_invariance_tolerance};
  IdentityDeviation exact{"I^{EZ,n}(phi_j) = delta_jn", 0.0, cfg.exactness_tolerance};
  for (const auto& o : outcomes) {
    tau.max_deviation = std::max(tau.max_deviation, o.tau);
    dec.max_deviation = std::max(dec.max_deviation, o.decomposition);
    cross.max_deviation = std::max(cross.max_deviation, o.cross);
    gam.max_deviation = std::max(gam.max_deviation, o.gamma);
    exact.max_deviation = std::max(exact.max_deviation, o.exactness);
    report.redraws += o.redraws;
  }
  report.deviations = {tau, dec, cross, gam, exact};
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void print_identity_report(std::ostream& os, const IdentitySuiteReport& report) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "identity suite: %zu configs, %zu redraws, %.2f s\n",
                report.configs, report.redraws, report.seconds);
  os << buf;
  for (const auto& d : report.deviations) {
    std::snprintf(buf, sizeof buf, "  %s  %-42s max_dev=%.3e tol=%.1e\n",
                  d.pass() ? "PASS" : "FAIL", d.name, d.max_deviation, d.tolerance);
    os << buf;
  }
}

}  // namespace kquad
