#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kquad/coefficients.hpp"
#include "kquad/dpp_sampler.hpp"
#include "kquad/errors.hpp"
#include "kquad/experiment.hpp"
#include "kquad/identities.hpp"
#include "kquad/quadrature_weights.hpp"
#include "kquad/svg_plot.hpp"
#include "kquad/wce.hpp"

namespace {

using namespace kquad;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitStatistical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Common {
  double s = 2.0;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::string out;
};

struct RuleOptions {
  std::string rule = "ezq";
  std::string gamma = "mercer";
  std::string m_factor = "2";
  std::string g = "e1";
  double jitter = 0.0;
};

struct NodeOptions {
  std::string n = "5";
  std::string nodes_path;
  std::size_t trial = 0;
};

GammaSelector parse_gamma(const std::string& text) {
  if (text == "mercer") return GammaSelector::mercer();
  if (text == "unit") return GammaSelector::unit();
  throw ParameterError("--gamma must be 'unit' or 'mercer', got '" + text + "'");
}

// Returns nullopt for "inf".
std::optional<double> parse_m_factor(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v) || v < 1.0) {
    throw ParameterError("--m-factor must be a number >= 1 or 'inf', got '" + text + "'");
  }
  return v;
}

std::size_t parse_single_n(const std::string& text) {
  const auto list = parse_n_list(text);
  if (list.size() != 1) throw ParameterError("--n must be a single value here");
  return list.front();
}

// Output sink: --out path or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw UsageError("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// Accepts one x per line, or `trial,point_index,x` rows filtered by trial.
std::vector<double> read_nodes(const std::string& path, std::size_t trial) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open nodes file '" + path + "'");
  std::vector<double> xs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    try {
      if (cells.size() == 1) {
        xs.push_back(std::stod(cells[0]));
      } else if (cells.size() == 3) {
        if (std::stoull(cells[0]) == trial) xs.push_back(std::stod(cells[2]));
      } else {
        throw ParameterError("");
      }
    } catch (const std::invalid_argument&) {
      if (line_no == 1) continue;  // header
      throw ParameterError("malformed nodes line " + std::to_string(line_no) + ": " + line);
    } catch (const ParameterError&) {
      throw ParameterError("malformed nodes line " + std::to_string(line_no) + ": " + line);
    }
  }
  if (xs.empty()) throw ParameterError("no nodes read from '" + path + "'");
  return xs;
}

NodeSet obtain_nodes(const SpectralModel& model, const Common& common, const NodeOptions& opt) {
  if (!opt.nodes_path.empty()) return make_node_set(model, read_nodes(opt.nodes_path, opt.trial));
  const std::size_t n = parse_single_n(opt.n);
  return sample_projection_dpp(
      model, n, RngStream(common.seed, trial_stream_id(common.seed, n, opt.trial)));
}

WeightVector compute_weights(const SpectralModel& model, const NodeSet& nodes,
                             const CoefficientVector& g, const RuleOptions& opt) {
  SolveOptions solve;
  solve.jitter = opt.jitter;
  switch (parse_rule(opt.rule)) {
    case RuleKind::Ezq:
      return ez_weights(nodes, g);
    case RuleKind::Okq:
      return okq_weights(model, nodes, g, solve);
    case RuleKind::Kbiq: {
      KbiqParams params{parse_gamma(opt.gamma), std::nullopt};
      if (const auto mf = parse_m_factor(opt.m_factor)) {
        params.truncation = static_cast<std::size_t>(
            std::ceil(*mf * static_cast<double>(nodes.size()) - 1e-9));
      }
      return kbiq_weights(model, nodes, g, params, solve);
    }
  }
  throw ParameterError("unknown rule");
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--s", c.s, "Sobolev order s > 1/2")->capture_default_str();
  app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app->add_option("--workers", c.workers, "Worker threads (0 = all cores)")->capture_default_str();
  app->add_option("--out", c.out, "Output path (default stdout)");
}

void add_rule(CLI::App* app, RuleOptions& r) {
  app->add_option("--rule", r.rule, "ezq | okq | kbiq")->capture_default_str();
  app->add_option("--gamma", r.gamma, "KBIQ gamma: unit | mercer")->capture_default_str();
  app->add_option("--m-factor", r.m_factor, "KBIQ truncation M = ceil(factor*N), or inf")
      ->capture_default_str();
  app->add_option("--g", r.g, "Integrand weight, e.g. e1 or 0.5*e3+2*e10")->capture_default_str();
  app->add_option("--jitter", r.jitter, "Diagonal jitter for OKQ/KBIQ solves")
      ->capture_default_str();
}

void add_nodes(CLI::App* app, NodeOptions& n) {
  app->add_option("--n", n.n, "Number of nodes when sampling")->capture_default_str();
  app->add_option("--nodes", n.nodes_path, "Nodes CSV (x per line, or trial,point_index,x)");
  app->add_option("--trial", n.trial, "Trial index selecting the node set")->capture_default_str();
}

int cmd_sample(const Common& c, const std::string& n_text, std::size_t trials) {
  const SpectralModel model(c.s);
  const std::size_t n = parse_single_n(n_text);
  if (trials < 1) throw ParameterError("--trials must be >= 1");
  const auto sets = parallel_map<NodeSet>(trials, c.workers, [&](std::size_t t) {
    return sample_projection_dpp(model, n, RngStream(c.seed, trial_stream_id(c.seed, n, t)));
  });
  Sink sink(c.out);
  auto& os = sink.stream();
  os << "trial,point_index,x\n";
  for (std::size_t t = 0; t < sets.size(); ++t)
    for (std::size_t i = 0; i < sets[t].size(); ++i)
      os << t << ',' << i << ',' << fmt(sets[t].points[i]) << '\n';
  return kExitOk;
}

int cmd_weights(const Common& c, const RuleOptions& r, const NodeOptions& n) {
  const SpectralModel model(c.s);
  const auto g = parse_g_expression(r.g);
  const auto nodes = obtain_nodes(model, c, n);
  const auto w = compute_weights(model, nodes, g, r);
  Sink sink(c.out);
  auto& os = sink.stream();
  os << "# rule=" << w.label << " s=" << fmt(c.s) << " g=" << g.to_string() << '\n';
  if (w.ill_conditioned) os << "# warning: condition estimate " << fmt(w.condition) << '\n';
  os << "i,x_i,w_i\n";
  for (std::size_t i = 0; i < w.weights.size(); ++i)
    os << i << ',' << fmt(nodes.points[i]) << ',' << fmt(w.weights[i]) << '\n';
  return kExitOk;
}

int cmd_wce(const Common& c, const RuleOptions& r, const NodeOptions& n, bool as_json) {
  const SpectralModel model(c.s);
  const auto g = parse_g_expression(r.g);
  const auto nodes = obtain_nodes(model, c, n);
  const auto w = compute_weights(model, nodes, g, r);
  auto report = wce_squared(model, nodes, w, g);
  if (w.rule == RuleKind::Ezq && g.effective_support() <= nodes.size()) {
    report.decomposition_value = error_decomposition(model, nodes, g);
  }
  Sink sink(c.out);
  auto& os = sink.stream();
  if (as_json) {
    nlohmann::json j;
    j["rule"] = w.label;
    j["s"] = c.s;
    j["g"] = g.to_string();
    j["N"] = nodes.size();
    j["wce_squared"] = report.wce_squared;
    j["embedding_norm_squared"] = report.embedding_norm_squared;
    j["cross_term"] = report.cross_term;
    j["quad_form"] = report.quad_form;
    j["condition_phi"] = nodes.condition_phi;
    if (report.decomposition_value) j["decomposition"] = *report.decomposition_value;
    os << j.dump(2) << '\n';
  } else {
    os << "rule=" << w.label << '\n'
       << "s=" << fmt(c.s) << '\n'
       << "g=" << g.to_string() << '\n'
       << "N=" << nodes.size() << '\n'
       << "wce_squared=" << fmt(report.wce_squared) << '\n'
       << "embedding_norm_squared=" << fmt(report.embedding_norm_squared) << '\n'
       << "cross_term=" << fmt(report.cross_term) << '\n'
       << "quad_form=" << fmt(report.quad_form) << '\n'
       << "condition_phi=" << fmt(nodes.condition_phi) << '\n';
    if (report.decomposition_value) os << "decomposition=" << fmt(*report.decomposition_value) << '\n';
  }
  return kExitOk;
}

int cmd_identities(const Common& c, std::size_t configs) {
  IdentitySuiteConfig cfg;
  cfg.configs = configs;
  cfg.workers = c.workers;
  if (c.seed != 0) cfg.seed = c.seed;
  const auto report = run_identity_suite(cfg);
  Sink sink(c.out);
  print_identity_report(sink.stream(), report);
  return report.pass() ? kExitOk : kExitStatistical;
}

int cmd_experiment(const Common& c, const RuleOptions& r, const std::string& n_text,
                   std::size_t trials, const std::string& svg, const std::string& dump) {
  std::vector<ExperimentResult> results;
  std::stringstream rules(r.rule);
  for (std::string rule; std::getline(rules, rule, ',');) {
    ExperimentConfig cfg;
    cfg.s = c.s;
    cfg.rule = parse_rule(rule);
    cfg.gamma = parse_gamma(r.gamma);
    const auto mf = parse_m_factor(r.m_factor);
    if (!mf) throw ParameterError("experiment needs a finite --m-factor");
    cfg.m_factor = *mf;
    cfg.g = parse_g_expression(r.g);
    cfg.n_list = parse_n_list(n_text);
    cfg.trials = trials;
    cfg.master_seed = c.seed;
    cfg.jitter = r.jitter;
    cfg.workers = c.workers;
    results.push_back(run_experiment(cfg));
  }
  if (results.empty()) throw ParameterError("--rule is empty");

  Sink sink(c.out);
  auto& os = sink.stream();
  write_rate_csv_header(os);
  for (const auto& res : results) write_rate_csv_rows(os, res);
  for (const auto& res : results) {
    const auto& sr = res.series;
    if (!sr.fit) continue;
    std::cerr << sr.rule << ": slope=" << fmt(sr.fit->slope);
    if (sr.ref_r_n_fit) std::cerr << " ref_rN_slope=" << fmt(sr.ref_r_n_fit->slope);
    if (sr.ref_sigma_fit) std::cerr << " ref_sigma_slope=" << fmt(sr.ref_sigma_fit->slope);
    std::cerr << '\n';
  }
  if (!svg.empty()) {
    std::ofstream f(svg);
    if (!f) throw UsageError("cannot open '" + svg + "' for writing");
    write_rate_svg(f, results);
  }
  if (!dump.empty()) {
    std::ofstream f(dump);
    if (!f) throw UsageError("cannot open '" + dump + "' for writing");
    write_trial_csv(f, results);
  }
  return kExitOk;
}

struct VerifyOptions {
  std::string which;
  std::size_t n = 5;
  std::size_t trials = 20'000;
  double threshold = 3.0;
  std::string f = "e6+2*e8";
  std::size_t index = 1;
  std::size_t index2 = 2;
  std::string eps = "e1";
  std::string eps_tilde = "e1";
  std::size_t m = 6;
  std::string g = "e1";
};

int cmd_verify(const Common& c, const VerifyOptions& v) {
  VerifyParams params;
  params.s = c.s;
  params.n = v.n;
  params.trials = v.trials;
  params.seed = c.seed;
  params.workers = c.workers;
  params.threshold = v.threshold;
  if (params.trials < 2) throw ParameterError("--trials must be >= 2");
  StatReport report;
  if (v.which == "theorem1") {
    report = verify_theorem1(params, parse_g_expression(v.f), v.index);
  } else if (v.which == "covariance") {
    report = verify_covariance(params, parse_g_expression(v.f), v.index, v.index2);
  } else if (v.which == "theorem5") {
    report = verify_theorem5(params, parse_g_expression(v.eps), parse_g_expression(v.eps_tilde),
                             v.m);
  } else if (v.which == "theorem2") {
    report = verify_theorem2(params, parse_g_expression(v.g));
  } else {
    throw ParameterError("unknown verification '" + v.which + "'");
  }
  Sink sink(c.out);
  print_report(sink.stream(), report);
  return report.pass() ? kExitOk : kExitStatistical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel interpolation quadrature with projection-DPP nodes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kquad 1.0");

  Common common;
  RuleOptions rule;
  NodeOptions nodes;

  auto* sample = app.add_subcommand("sample", "Draw projection-DPP node sets");
  std::string sample_n = "5";
  std::size_t sample_trials = 1;
  add_common(sample, common);
  sample->add_option("--n", sample_n, "Number of nodes")->capture_default_str();
  sample->add_option("--trials", sample_trials, "Number of node sets")->capture_default_str();

  auto* weights = app.add_subcommand("weights", "Print quadrature weights");
  add_common(weights, common);
  add_rule(weights, rule);
  add_nodes(weights, nodes);

  auto* wce = app.add_subcommand("wce", "Squared worst-case error of one rule");
  bool as_json = false;
  add_common(wce, common);
  add_rule(wce, rule);
  add_nodes(wce, nodes);
  wce->add_flag("--json", as_json, "Emit JSON instead of key=value lines");

  auto* identities = app.add_subcommand("check-identities", "Deterministic identity suite");
  std::size_t configs = 200;
  add_common(identities, common);
  identities->add_option("--configs", configs, "Number of random configurations")
      ->capture_default_str();

  auto* experiment = app.add_subcommand("experiment", "Monte-Carlo convergence experiment");
  std::string exp_n = "5,10,20,40,80";
  std::size_t exp_trials = 1000;
  std::string svg, dump;
  add_common(experiment, common);
  add_rule(experiment, rule);
  experiment->add_option("--n", exp_n, "N values: comma list or first:last:step")
      ->capture_default_str();
  experiment->add_option("--trials", exp_trials, "Trials per N")->capture_default_str();
  experiment->add_option("--svg", svg, "Write a log-log SVG plot");
  experiment->add_option("--dump", dump, "Write per-trial CSV");

  auto* verify = app.add_subcommand("verify", "Statistical verification of expectation identities");
  VerifyOptions vopt;
  add_common(verify, common);
  verify->add_option("which", vopt.which, "theorem1 | theorem2 | theorem5 | covariance")
      ->required()
      ->check(CLI::IsMember({"theorem1", "theorem2", "theorem5", "covariance"}));
  verify->add_option("--n", vopt.n, "Number of nodes")->capture_default_str();
  verify->add_option("--trials", vopt.trials, "Number of DPP samples")->capture_default_str();
  verify->add_option("--threshold", vopt.threshold, "|z| pass threshold")->capture_default_str();
  verify->add_option("--f", vopt.f, "Test function (theorem1, covariance)")->capture_default_str();
  verify->add_option("--index", vopt.index, "Rule index n")->capture_default_str();
  verify->add_option("--index2", vopt.index2, "Second rule index n' (covariance)")
      ->capture_default_str();
  verify->add_option("--eps", vopt.eps, "eps (theorem5)")->capture_default_str();
  verify->add_option("--eps-tilde", vopt.eps_tilde, "eps tilde (theorem5)")->capture_default_str();
  verify->add_option("--m", vopt.m, "Truncation m > N (theorem5)")->capture_default_str();
  verify->add_option("--g", vopt.g, "Integrand weight (theorem2)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sample) return cmd_sample(common, sample_n, sample_trials);
    if (*weights) return cmd_weights(common, rule, nodes);
    if (*wce) return cmd_wce(common, rule, nodes, as_json);
    if (*identities) return cmd_identities(common, configs);
    if (*experiment) return cmd_experiment(common, rule, exp_n, exp_trials, svg, dump);
    if (*verify) return cmd_verify(common, vopt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IndexError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
