#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kquad/errors.hpp"
#include "kquad/quadrature_weights.hpp"
#include "kquad/wce.hpp"

using namespace kquad;

namespace {

double max_rel_dev(const std::vector<double>& a, const std::vector<double>& b) {
  const double scale = std::max(max_abs(a), 1e-300);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  return worst;
}

CoefficientVector random_in_span(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> z;
  std::vector<double> c(n);
  for (double& v : c) v = z(gen);
  return CoefficientVector(std::move(c));
}

}  // namespace

TEST_CASE("EZQ examples") {
  SpectralModel model(2.0);
  const auto one = make_node_set(model, {0.37});
  const auto w1 = ez_weights(one, CoefficientVector::basis(1));
  REQUIRE(w1.size() == 1);
  CHECK(w1.weights[0] == doctest::Approx(1.0));
  CHECK(w1.rule == RuleKind::Ezq);

  const auto nodes = make_node_set(model, {0.0, 0.25});
  const auto zero = ez_weights(nodes, CoefficientVector());
  CHECK(zero.weights[0] == 0.0);
  CHECK(zero.weights[1] == 0.0);

  // Hand elimination: w1 + w2 = 0, sqrt2 w1 = 1.
  const auto w = ez_weights(nodes, CoefficientVector::basis(2));
  CHECK(w.weights[0] == doctest::Approx(1.0 / std::numbers::sqrt2));
  CHECK(w.weights[1] == doctest::Approx(-1.0 / std::numbers::sqrt2));
  CHECK(apply_quadrature(model, w, CoefficientVector::basis(2)) == doctest::Approx(1.0));
  CHECK(apply_quadrature(model, w, CoefficientVector::basis(1)) == doctest::Approx(0.0));

  const auto projected = ez_weights(nodes, parse_g_expression("e2+3*e5"));
  CHECK(projected.discarded_mass == doctest::Approx(9.0));
  CHECK(projected.weights[0] == doctest::Approx(w.weights[0]));
}

TEST_CASE("OKQ examples") {
  SpectralModel model(2.0);
  const auto one = make_node_set(model, {0.2});
  const auto w = okq_weights(model, one, CoefficientVector::basis(1));
  // Oracle: mu_{phi_1} = 1 divided by k(x,x) = 1 + pi^4/90.
  CHECK(w.weights[0] == doctest::Approx(0.4802328398448446).epsilon(1e-14));
  CHECK_FALSE(w.ill_conditioned);

  const auto zero = okq_weights(model, make_node_set(model, {0.1, 0.5, 0.7}), CoefficientVector());
  for (double v : zero.weights) CHECK(v == 0.0);

  SolveOptions jitter;
  jitter.jitter = 1.0;
  const auto wj = okq_weights(model, one, CoefficientVector::basis(1), jitter);
  CHECK(wj.weights[0] == doctest::Approx(1.0 / (2.0 + std::pow(std::numbers::pi, 4) / 90.0)));
}

TEST_CASE("interpolation exactness on DPP nodes") {
  SpectralModel model(2.0);
  for (std::size_t n = 1; n <= 12; ++n) {
    const auto nodes = sample_projection_dpp(model, n, RngStream(77, n));
    for (std::size_t k = 1; k <= n; ++k) {
      const auto w = ez_weights(nodes, CoefficientVector::basis(k));
      for (std::size_t j = 1; j <= n; ++j) {
        const double v = apply_quadrature(model, w, CoefficientVector::basis(j));
        CHECK(std::abs(v - (j == k ? 1.0 : 0.0)) <= 1e-9);
      }
    }
  }
  WeightVector empty;
  empty.weights = {0.0, 0.0};
  empty.nodes = {0.1, 0.2};
  CHECK(apply_quadrature(empty, [](double x) { return std::exp(x); }) == 0.0);
}

TEST_CASE("KBIQ reduces to EZQ at M = N for any gamma") {
  SpectralModel model(2.0);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  double worst_unit = 0.0, worst_random = 0.0;
  for (int config = 0; config < 100; ++config) {
    const std::size_t n = 2 + config % 9;
    const auto nodes = sample_projection_dpp(model, n, RngStream(501, config));
    const auto g = random_in_span(gen, n + 3);
    const auto ez = ez_weights(nodes, g);

    KbiqParams unit{GammaSelector::unit(), n};
    worst_unit = std::max(worst_unit, max_rel_dev(ez.weights, kbiq_weights(model, nodes, g, unit).weights));
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> gamma(n);
      for (double& v : gamma) v = u(gen);
      KbiqParams p{GammaSelector::explicit_sequence(gamma), n};
      worst_random = std::max(worst_random, max_rel_dev(ez.weights, kbiq_weights(model, nodes, g, p).weights));
    }
  }
  CHECK(worst_unit <= 1e-10);
  CHECK(worst_random <= 1e-8);
}

TEST_CASE("KBIQ parameter handling") {
  SpectralModel model(2.0);
  const auto nodes = sample_projection_dpp(model, 5, RngStream(9, 9));
  const auto g = CoefficientVector::basis(1);

  const auto okq = okq_weights(model, nodes, g);
  const auto inf = kbiq_weights(model, nodes, g, KbiqParams{GammaSelector::mercer(), std::nullopt});
  for (std::size_t i = 0; i < 5; ++i) CHECK(inf.weights[i] == okq.weights[i]);
  CHECK(inf.label == "KBIQ(gamma=mercer,M=inf)");

  CHECK_THROWS_AS(kbiq_weights(model, nodes, g, KbiqParams{GammaSelector::unit(), std::nullopt}), ParameterError);
  CHECK_THROWS_AS(kbiq_weights(model, nodes, g, KbiqParams{GammaSelector::mercer(), 4}), ParameterError);
  CHECK_THROWS_AS(kbiq_weights(model, nodes, g,
                               KbiqParams{GammaSelector::explicit_sequence({1, 1, 1, 1, 1}), 6}),
                  ParameterError);
}

TEST_CASE("KBIQ with mercer weights approaches OKQ as M grows") {
  SpectralModel model(2.0);
  const auto g = CoefficientVector::basis(1);
  for (std::size_t n : {3u, 6u, 10u}) {
    const auto nodes = sample_projection_dpp(model, n, RngStream(31, n));
    const auto okq = okq_weights(model, nodes, g);
    double prev = 1e300;
    for (std::size_t m : {n, 2 * n, 8 * n}) {
      const auto w = kbiq_weights(model, nodes, g, KbiqParams{GammaSelector::mercer(), m});
      double dev = 0.0;
      for (std::size_t i = 0; i < n; ++i) dev = std::max(dev, std::abs(w.weights[i] - okq.weights[i]));
      CHECK(dev <= prev * (1 + 1e-9));
      prev = dev;
    }
    const auto far = kbiq_weights(model, nodes, g, KbiqParams{GammaSelector::mercer(), 10'000});
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) dev = std::max(dev, std::abs(far.weights[i] - okq.weights[i]));
    CHECK(dev <= 1e-4);
  }
}

TEST_CASE("EZQ weights through the K_N route") {
  SpectralModel model(2.0);
  std::mt19937_64 gen(12);
  for (int config = 0; config < 50; ++config) {
    const std::size_t n = 2 + config % 9;
    const auto nodes = sample_projection_dpp(model, n, RngStream(610, config));
    const auto g = random_in_span(gen, n);
    const auto direct = ez_weights(nodes, g).weights;
    const auto alt = lu_factor(mercer_truncated_kernel_matrix(model, nodes))
                         .solve(embedding_vector(model, g, nodes.points));
    CHECK(max_rel_dev(direct, alt) <= 1e-8);
  }
}

TEST_CASE("OKQ is optimal for its nodes") {
  SpectralModel model(2.0);
  std::mt19937_64 gen(21);
  std::normal_distribution<double> z;
  const auto g = CoefficientVector::basis(1);
  for (int config = 0; config < 20; ++config) {
    const std::size_t n = 3 + config % 6;
    const auto nodes = sample_projection_dpp(model, n, RngStream(77, config));
    const auto okq = okq_weights(model, nodes, g);
    const double best = wce_squared(model, nodes, okq, g).wce_squared;
    CHECK(best <= wce_squared(model, nodes, ez_weights(nodes, g), g).wce_squared + 1e-12);
    for (int k = 0; k < 50; ++k) {
      auto w = okq.weights;
      for (double& v : w) v += 1e-2 * z(gen);
      CHECK(best <= wce_squared(model, nodes, std::span<const double>(w), g).wce_squared + 1e-12);
    }
  }
}

TEST_CASE("rule names") {
  CHECK(parse_rule("EZQ") == RuleKind::Ezq);
  CHECK(parse_rule("okq") == RuleKind::Okq);
  CHECK(parse_rule("kbiq") == RuleKind::Kbiq);
  CHECK(to_string(RuleKind::Kbiq) == "kbiq");
  CHECK_THROWS_AS(parse_rule("bq"), ParameterError);
}
