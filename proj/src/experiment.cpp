#include "kquad/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "kquad/dpp_sampler.hpp"
#include "kquad/errors.hpp"
#include "kquad/wce.hpp"

namespace kquad {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<NodeSet> sample_trial(const SpectralModel& model, std::size_t n,
                                    std::uint64_t seed, std::size_t trial,
                                    std::size_t max_resamples) {
  SamplerOptions options;
  options.max_resamples = max_resamples;
  try {
    return sample_projection_dpp(model, n, RngStream(seed, trial_stream_id(seed, n, trial)),
                                 options);
  } catch (const ResampleExhaustedError&) {
    return std::nullopt;
  }
}

std::size_t kbiq_truncation(double m_factor, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(m_factor * static_cast<double>(n) - 1e-9));
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(s > 0.5)) throw ParameterError("s must be > 1/2");
  if (n_list.empty()) throw ParameterError("N list is empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw ParameterError("every N must be >= 1");
    if (i > 0 && n_list[i] <= n_list[i - 1]) {
      throw ParameterError("N list must be strictly ascending");
    }
  }
  if (trials < 1) throw ParameterError("trials must be >= 1");
  if (rule == RuleKind::Kbiq && !(m_factor >= 1.0)) {
    throw ParameterError("m-factor must be >= 1 for kbiq");
  }
  if (!std::isfinite(jitter) || jitter < 0.0) throw ParameterError("jitter must be >= 0");
}

std::string ExperimentConfig::rule_label() const {
  if (rule != RuleKind::Kbiq) return to_string(rule);
  std::ostringstream os;
  os << "kbiq(gamma=" << gamma.describe() << ";M=" << m_factor << "N)";
  return os.str();
}

std::vector<std::size_t> parse_n_list(std::string_view text) {
  auto parse_count = [&](std::string_view part) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || p != part.data() + part.size() || part.empty()) {
      throw ParameterError("malformed N list '" + std::string(text) + "'");
    }
    return v;
  };
  std::vector<std::size_t> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::size_t> parts;
    std::size_t start = 0;
    for (;;) {
      const auto pos = text.find(':', start);
      parts.push_back(parse_count(text.substr(start, pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    if (parts.size() != 3 || parts[2] == 0 || parts[1] < parts[0]) {
      throw ParameterError("N range must be first:last:step with step > 0");
    }
    for (std::size_t n = parts[0]; n <= parts[1]; n += parts[2]) out.push_back(n);
  } else {
    std::size_t start = 0;
    for (;;) {
      const auto pos = text.find(',', start);
      out.push_back(parse_count(text.substr(start, pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == 0 || (i > 0 && out[i] <= out[i - 1])) {
      throw ParameterError("N values must be >= 1 and strictly ascending");
    }
  }
  return out;
}

std::uint64_t trial_stream_id(std::uint64_t master_seed, std::size_t n, std::size_t trial) {
  return hash_combine(hash_combine(master_seed, n), trial);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const SpectralModel model(cfg.s);
  ExperimentResult result;
  result.config = cfg;
  result.series.rule = cfg.rule_label();
  SolveOptions solve;
  solve.jitter = cfg.jitter;

  for (std::size_t n : cfg.n_list) {
    auto records = parallel_map<TrialRecord>(cfg.trials, cfg.workers, [&](std::size_t t) {
      TrialRecord rec;
      rec.n = n;
      rec.trial_index = t;
      rec.seed_stream = trial_stream_id(cfg.master_seed, n, t);
      const auto nodes = sample_trial(model, n, cfg.master_seed, t, cfg.max_resamples);
      if (!nodes) {
        rec.failed = true;
        rec.resample_count = cfg.max_resamples;
        return rec;
      }
      rec.condition_phi = nodes->condition_phi;
      rec.resample_count = nodes->resample_count;
      try {
        WeightVector w;
        switch (cfg.rule) {
          case RuleKind::Ezq:
            w = ez_weights(*nodes, cfg.g);
            break;
          case RuleKind::Okq:
            w = okq_weights(model, *nodes, cfg.g, solve);
            break;
          case RuleKind::Kbiq:
            w = kbiq_weights(model, *nodes, cfg.g,
                             KbiqParams{cfg.gamma, kbiq_truncation(cfg.m_factor, n)}, solve);
            break;
        }
        rec.wce_squared = wce_squared(model, *nodes, w, cfg.g).wce_squared;
      } catch (const SingularMatrixError&) {
        rec.failed = true;
      }
      return rec;
    });

    std::vector<double> values;
    values.reserve(records.size());
    RatePoint point;
    point.n = n;
    for (const auto& r : records) {
      if (r.failed) ++point.failed;
      else values.push_back(r.wce_squared);
    }
    const auto summary = summarize(values);
    point.mean = summary.mean;
    point.std_error = summary.std_error;
    point.count = summary.count;
    point.ref_r_n = model.tail_sum(n);
    point.ref_sigma_next = model.eigenvalue(n + 1);
    result.series.points.push_back(point);
    result.trials.insert(result.trials.end(), records.begin(), records.end());
  }

  auto& pts = result.series.points;
  if (pts.size() >= 2) {
    std::vector<double> ns, means, rn, sig;
    bool positive = true;
    for (const auto& p : pts) {
      ns.push_back(static_cast<double>(p.n));
      means.push_back(p.mean);
      rn.push_back(p.ref_r_n);
      sig.push_back(p.ref_sigma_next);
      positive = positive && p.mean > 0.0 && p.count > 0;
    }
    if (positive) result.series.fit = fit_loglog_slope(ns, means);
    result.series.ref_r_n_fit = fit_loglog_slope(ns, rn);
    result.series.ref_sigma_fit = fit_loglog_slope(ns, sig);
  }
  return result;
}

void write_rate_csv_header(std::ostream& os) {
  os << "rule,s,g,N,trials,mean_wce2,stderr,ref_rN,ref_sigmaN1,failed_trials\n";
}

void write_rate_csv_rows(std::ostream& os, const ExperimentResult& result) {
  const auto& cfg = result.config;
  for (const auto& p : result.series.points) {
    os << result.series.rule << ',' << fmt(cfg.s) << ',' << cfg.g.to_string() << ',' << p.n
       << ',' << cfg.trials << ',' << fmt(p.mean) << ',' << fmt(p.std_error) << ','
       << fmt(p.ref_r_n) << ',' << fmt(p.ref_sigma_next) << ',' << p.failed << '\n';
  }
}

void write_trial_csv(std::ostream& os, const std::vector<ExperimentResult>& results) {
  os << "rule,N,trial,wce2,cond_phi,resamples\n";
  for (const auto& res : results) {
    for (const auto& t : res.trials) {
      os << res.series.rule << ',' << t.n << ',' << t.trial_index << ','
         << (t.failed ? std::string("nan") : fmt(t.wce_squared)) << ',' << fmt(t.condition_phi)
         << ',' << t.resample_count << '\n';
    }
  }
}

bool StatReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

void print_report(std::ostream& os, const StatReport& report) {
  os << report.title << " (samples=" << report.samples << ", failed=" << report.failed_trials
     << ")\n";
  for (const auto& c : report.checks) {
    os << "  " << (c.pass ? "PASS" : "FAIL") << "  " << c.name << ": estimate=" << fmt(c.estimate)
       << (c.upper_bound_only ? " bound=" : " target=") << fmt(c.target)
       << " se=" << fmt(c.std_error) << " z=" << fmt(c.z) << " (|z|<=" << c.threshold << ")\n";
  }
}

namespace {

// Runs fn(nodes) on every successful trial; returns per-trial values in order.
template <typename F>
std::vector<std::vector<double>> collect(const VerifyParams& params, const SpectralModel& model,
                                         std::size_t width, StatReport& report, F&& fn) {
  auto rows = parallel_map<std::optional<std::vector<double>>>(
      params.trials, params.workers, [&](std::size_t t) -> std::optional<std::vector<double>> {
        const auto nodes = sample_trial(model, params.n, params.seed, t, 10);
        if (!nodes) return std::nullopt;
        return fn(*nodes);
      });
  std::vector<std::vector<double>> columns(width);
  for (auto& row : rows) {
    if (!row) {
      ++report.failed_trials;
      continue;
    }
    for (std::size_t k = 0; k < width; ++k) columns[k].push_back((*row)[k]);
  }
  report.samples = params.trials - report.failed_trials;
  return columns;
}

std::string describe_setup(const VerifyParams& p) {
  std::ostringstream os;
  os << "s=" << p.s << ", N=" << p.n << ", trials=" << p.trials << ", seed=" << p.seed;
  return os.str();
}

}  // namespace

StatReport verify_theorem1(const VerifyParams& params, const CoefficientVector& f,
                           std::size_t index) {
  if (index < 1 || index > params.n) throw ParameterError("rule index n must lie in [1, N]");
  const SpectralModel model(params.s);
  StatReport report;
  report.title = "EZQ estimator I^{EZ," + std::to_string(index) + "}(" + f.to_string() + "), " +
                 describe_setup(params);
  const auto cols = collect(params, model, 1, report, [&](const NodeSet& nodes) {
    const auto w = ez_weights(nodes, CoefficientVector::basis(index));
    return std::vector<double>{apply_quadrature(model, w, f)};
  });
  const auto& values = cols[0];
  const auto summary = summarize(values);
  report.checks.push_back(
      make_check("mean = <f, phi_n>", summary.mean, f[index], summary.std_error, params.threshold));
  const double variance_target = f.tail_mass(params.n);
  auto var = variance_check("variance = sum_{m>N} <f, phi_m>^2", values, variance_target,
                            params.threshold);
  report.checks.push_back(var);

  // ||f||_F^2 = sum c_m^2 / sigma_m.
  double rkhs_norm = 0.0;
  for (std::size_t m = 1; m <= f.support(); ++m) rkhs_norm += f[m] * f[m] / model.eigenvalue(m);
  report.checks.push_back(make_check("variance <= sigma_{N+1} ||f||_F^2", var.estimate,
                                     model.eigenvalue(params.n + 1) * rkhs_norm, var.std_error,
                                     params.threshold, true));
  return report;
}

StatReport verify_covariance(const VerifyParams& params, const CoefficientVector& f,
                             std::size_t index, std::size_t other_index) {
  if (index == other_index) throw ParameterError("covariance check needs n != n'");
  if (index < 1 || index > params.n || other_index < 1 || other_index > params.n) {
    throw ParameterError("rule indices must lie in [1, N]");
  }
  const SpectralModel model(params.s);
  StatReport report;
  report.title = "Cov(I^{EZ," + std::to_string(index) + "}, I^{EZ," +
                 std::to_string(other_index) + "}) of " + f.to_string() + ", " +
                 describe_setup(params);
  const auto cols = collect(params, model, 2, report, [&](const NodeSet& nodes) {
    const auto a = ez_weights(nodes, CoefficientVector::basis(index));
    const auto b = ez_weights(nodes, CoefficientVector::basis(other_index));
    return std::vector<double>{apply_quadrature(model, a, f), apply_quadrature(model, b, f)};
  });
  report.checks.push_back(
      covariance_check("covariance = 0", cols[0], cols[1], 0.0, params.threshold));
  return report;
}

StatReport verify_theorem5(const VerifyParams& params, const CoefficientVector& eps,
                           const CoefficientVector& eps_tilde, std::size_t m) {
  if (m <= params.n) throw ParameterError("theorem5 needs m > N");
  const SpectralModel model(params.s);
  StatReport report;
  report.title = "cross term eps=" + eps.to_string() + ", eps~=" + eps_tilde.to_string() +
                 ", m=" + std::to_string(m) + ", " + describe_setup(params);
  const auto cols = collect(params, model, 1, report, [&](const NodeSet& nodes) {
    return std::vector<double>{cross_term(model, nodes, eps, eps_tilde, m)};
  });
  double target = 0.0;
  for (std::size_t k = 1; k <= params.n; ++k) target += eps[k] * eps_tilde[k];
  const auto summary = summarize(cols[0]);
  report.checks.push_back(make_check("mean = sum eps_n eps~_n", summary.mean, target,
                                     summary.std_error, params.threshold));
  return report;
}

StatReport verify_theorem2(const VerifyParams& params, const CoefficientVector& g) {
  const SpectralModel model(params.s);
  StatReport report;
  report.title = "EZQ mean squared error for g=" + g.to_string() + ", " + describe_setup(params);
  const auto cols = collect(params, model, 1, report, [&](const NodeSet& nodes) {
    return std::vector<double>{wce_squared(model, nodes, ez_weights(nodes, g), g).wce_squared};
  });
  const auto summary = summarize(cols[0]);
  const double r_n = model.tail_sum(params.n);
  if (g.effective_support() <= params.n) {
    report.checks.push_back(make_check("mean = sum_n <g, phi_n>^2 r_N", summary.mean,
                                       g.norm_squared() * r_n, summary.std_error,
                                       params.threshold));
  }
  report.checks.push_back(make_check("mean <= 4 ||g||^2 r_N", summary.mean,
                                     4.0 * g.norm_squared() * r_n, summary.std_error,
                                     params.threshold, true));
  return report;
}

}  // namespace kquad
