#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "kquad/errors.hpp"
#include "kquad/experiment.hpp"
#include "kquad/spectral_model.hpp"

using namespace kquad;

namespace {

std::string rate_csv(const ExperimentResult& r) {
  std::ostringstream os;
  write_rate_csv_header(os);
  write_rate_csv_rows(os, r);
  write_trial_csv(os, {r});
  return os.str();
}

ExperimentConfig small_config(RuleKind rule) {
  ExperimentConfig cfg;
  cfg.rule = rule;
  cfg.n_list = {3, 6};
  cfg.trials = 64;
  cfg.master_seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("N lists") {
  CHECK(parse_n_list("5") == std::vector<std::size_t>{5});
  CHECK(parse_n_list("5,10,20") == std::vector<std::size_t>{5, 10, 20});
  CHECK(parse_n_list("5:20:5") == std::vector<std::size_t>{5, 10, 15, 20});
  CHECK(parse_n_list("5:22:5") == std::vector<std::size_t>{5, 10, 15, 20});
  for (const char* bad : {"", "0", "5,5", "10,5", "a", "5,", "1:2", "1:5:0", "5:1:1", "-3"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_n_list(bad), ParameterError);
  }
}

TEST_CASE("log-log slope fits") {
  std::vector<double> n{5, 10, 20}, pow3;
  for (double v : n) pow3.push_back(std::pow(v, -3.0));
  const auto fit = fit_loglog_slope(n, pow3);
  CHECK(fit.slope == doctest::Approx(-3.0).epsilon(1e-9));
  CHECK(fit.residual < 1e-12);

  const std::vector<double> flat{0.7, 0.7, 0.7};
  CHECK(std::abs(fit_loglog_slope(n, flat).slope) < 1e-12);

  const SpectralModel model(2.0);
  std::vector<double> grid{10, 20, 40, 80}, rn;
  for (double v : grid) rn.push_back(model.tail_sum(static_cast<std::size_t>(v)));
  const double slope = fit_loglog_slope(grid, rn).slope;
  CHECK(slope >= -3.2);
  CHECK(slope <= -2.8);

  CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{5}, std::vector<double>{1}),
                  ParameterError);
  CHECK_THROWS_AS(fit_loglog_slope(n, std::vector<double>{1, 0, 1}), ParameterError);
  CHECK_THROWS_AS(fit_loglog_slope(n, std::vector<double>{1, 1}), ParameterError);
}

TEST_CASE("trial streams are distinct") {
  std::set<std::uint64_t> ids;
  for (std::size_t n = 1; n <= 50; ++n)
    for (std::size_t t = 0; t < 200; ++t) ids.insert(trial_stream_id(7, n, t));
  CHECK(ids.size() == 50 * 200);
  CHECK(trial_stream_id(7, 5, 3) == trial_stream_id(7, 5, 3));
  CHECK(trial_stream_id(7, 5, 3) != trial_stream_id(8, 5, 3));
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = small_config(RuleKind::Ezq);
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.n_list = {};
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = cfg;
  bad.n_list = {6, 3};
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = cfg;
  bad.trials = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = cfg;
  bad.rule = RuleKind::Kbiq;
  bad.m_factor = 0.5;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = cfg;
  bad.jitter = -1.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("output is identical for any worker count") {
  for (RuleKind rule : {RuleKind::Ezq, RuleKind::Okq, RuleKind::Kbiq}) {
    CAPTURE(to_string(rule));
    auto cfg = small_config(rule);
    cfg.workers = 1;
    const auto serial = rate_csv(run_experiment(cfg));
    cfg.workers = 4;
    CHECK(rate_csv(run_experiment(cfg)) == serial);
  }
}

TEST_CASE("extending the grid leaves existing trials unchanged") {
  auto cfg = small_config(RuleKind::Ezq);
  const auto base = run_experiment(cfg);
  cfg.n_list = {2, 3, 6, 9};
  cfg.trials = 80;
  const auto wide = run_experiment(cfg);
  for (const auto& t : base.trials) {
    bool found = false;
    for (const auto& u : wide.trials) {
      if (u.n == t.n && u.trial_index == t.trial_index) {
        CHECK(u.wce_squared == t.wce_squared);
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("zero integrand gives zero error") {
  for (RuleKind rule : {RuleKind::Ezq, RuleKind::Okq, RuleKind::Kbiq}) {
    auto cfg = small_config(rule);
    cfg.g = CoefficientVector{};
    const auto res = run_experiment(cfg);
    for (const auto& t : res.trials) CHECK(t.wce_squared == 0.0);
  }
}

TEST_CASE("rate series carries references and fits") {
  auto cfg = small_config(RuleKind::Ezq);
  cfg.n_list = {4, 8, 16};
  const auto res = run_experiment(cfg);
  const SpectralModel model(2.0);
  REQUIRE(res.series.points.size() == 3);
  for (const auto& p : res.series.points) {
    CHECK(p.ref_r_n == model.tail_sum(p.n));
    CHECK(p.ref_sigma_next == model.eigenvalue(p.n + 1));
    CHECK(p.count + p.failed == cfg.trials);
  }
  REQUIRE(res.series.fit);
  REQUIRE(res.series.ref_r_n_fit);
  REQUIRE(res.series.ref_sigma_fit);
  CHECK(std::isfinite(res.series.fit->slope));
  CHECK(res.trials.size() == 3 * cfg.trials);
}

TEST_CASE("standard error shrinks like 1/sqrt(trials)") {
  auto cfg = small_config(RuleKind::Ezq);
  cfg.n_list = {5};
  cfg.trials = 4000;
  const double se1 = run_experiment(cfg).series.points[0].std_error;
  cfg.trials = 8000;
  const double se2 = run_experiment(cfg).series.points[0].std_error;
  const double ratio = se1 / se2;
  CHECK(ratio > std::sqrt(2.0) * 0.85);
  CHECK(ratio < std::sqrt(2.0) * 1.15);
}

TEST_CASE("constant estimator for f = phi_1") {
  VerifyParams p;
  p.trials = 500;
  const auto report = verify_theorem1(p, CoefficientVector::basis(1), 1);
  REQUIRE(report.checks.size() == 3);
  CHECK(report.checks[0].estimate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(report.checks[1].estimate) < 1e-9);
  CHECK(report.pass());
}

TEST_CASE("covariance vanishes identically inside E_N") {
  VerifyParams p;
  p.trials = 500;
  const auto report = verify_covariance(p, parse_g_expression("e2+0.5*e4"), 1, 3);
  REQUIRE(report.checks.size() == 1);
  CHECK(std::abs(report.checks[0].estimate) < 1e-12);
  CHECK(report.pass());
}

TEST_CASE("covariance with mass above N") {
  VerifyParams p;
  p.trials = 8000;
  p.seed = 3;
  CHECK(verify_covariance(p, parse_g_expression("e6+e9"), 1, 3).pass());
}

TEST_CASE("cross term mean with overlapping supports") {
  VerifyParams p;
  p.trials = 4000;
  p.seed = 5;
  const auto report =
      verify_theorem5(p, parse_g_expression("e1+e2"), CoefficientVector::basis(2), 9);
  CHECK(report.checks[0].target == 1.0);
  CHECK(report.pass());
}

TEST_CASE("mean error is linear in the squared coefficients") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const double a = coef(gen), b = coef(gen);
  CoefficientVector g(std::vector<double>{a, 0.0, b});
  VerifyParams p;
  p.trials = 6000;
  p.seed = 11;
  const auto report = verify_theorem2(p, g);
  REQUIRE(report.checks.size() == 2);
  const SpectralModel model(2.0);
  CHECK(report.checks[0].target == doctest::Approx((a * a + b * b) * model.tail_sum(5)));
  CHECK(report.pass());
}

TEST_CASE("general integrand respects the 4 r_N bound") {
  VerifyParams p;
  p.trials = 4000;
  p.seed = 13;
  const auto report = verify_theorem2(p, CoefficientVector::basis(p.n + 2));
  REQUIRE(report.checks.size() == 1);
  CHECK(report.checks[0].upper_bound_only);
  CHECK(report.pass());
}

TEST_CASE("verification parameter errors") {
  VerifyParams p;
  p.trials = 10;
  const auto f = CoefficientVector::basis(7);
  CHECK_THROWS_AS(verify_theorem1(p, f, 0), ParameterError);
  CHECK_THROWS_AS(verify_theorem1(p, f, 6), ParameterError);
  CHECK_THROWS_AS(verify_covariance(p, f, 2, 2), ParameterError);
  CHECK_THROWS_AS(verify_covariance(p, f, 1, 6), ParameterError);
  CHECK_THROWS_AS(verify_theorem5(p, CoefficientVector::basis(1), CoefficientVector::basis(1), 5),
                  ParameterError);
  CHECK_THROWS_AS(verify_theorem5(p, CoefficientVector::basis(6), CoefficientVector::basis(1), 8),
                  PreconditionError);
}
