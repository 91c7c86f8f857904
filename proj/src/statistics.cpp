#include "kquad/statistics.hpp"

#include <cmath>
#include <limits>

#include "kquad/errors.hpp"

namespace kquad {

SampleSummary summarize(std::span<const double> values) {
  SampleSummary s;
  s.count = values.size();
  if (s.count == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / static_cast<double>(s.count - 1);
  s.std_error = std::sqrt(s.variance / static_cast<double>(s.count));
  return s;
}

StatCheck make_check(std::string name, double estimate, double target, double std_error,
                     double threshold, bool upper_bound_only, double absolute_floor) {
  StatCheck c;
  c.name = std::move(name);
  c.estimate = estimate;
  c.target = target;
  c.std_error = std_error;
  c.threshold = threshold;
  c.upper_bound_only = upper_bound_only;
  const double diff = estimate - target;
  if (std_error > 0.0) {
    c.z = diff / std_error;
  } else {
    c.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  const double excess = upper_bound_only ? diff : std::abs(diff);
  c.pass = excess <= threshold * std_error || excess <= absolute_floor;
  return c;
}

StatCheck variance_check(std::string name, std::span<const double> values, double target,
                         double threshold) {
  const auto base = summarize(values);
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    dev[i] = (values[i] - base.mean) * (values[i] - base.mean);
  }
  const auto d = summarize(dev);
  return make_check(std::move(name), base.variance, target, d.std_error, threshold);
}

StatCheck covariance_check(std::string name, std::span<const double> xs,
                           std::span<const double> ys, double target, double threshold) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw ParameterError("covariance needs two equally long samples of size >= 2");
  }
  const double mx = summarize(xs).mean, my = summarize(ys).mean;
  std::vector<double> prod(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) prod[i] = (xs[i] - mx) * (ys[i] - my);
  const auto p = summarize(prod);
  const double n = static_cast<double>(xs.size());
  const double cov = p.mean * n / (n - 1.0);
  return make_check(std::move(name), cov, target, p.std_error, threshold);
}

LogLogFit fit_loglog_slope(std::span<const double> n, std::span<const double> mean) {
  if (n.size() != mean.size() || n.size() < 2) {
    throw ParameterError("log-log fit needs at least two (N, mean) pairs");
  }
  const std::size_t k = n.size();
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(n[i] > 0.0) || !(mean[i] > 0.0)) {
      throw ParameterError("log-log fit needs positive N and mean values");
    }
    lx[i] = std::log(n[i]);
    ly[i] = std::log(mean[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw ParameterError("log-log fit needs at least two distinct N");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / static_cast<double>(k));
  return fit;
}

std::size_t default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace kquad
