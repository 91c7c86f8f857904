#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace kquad {

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;
};

// Two-pass summary in the order given.
SampleSummary summarize(std::span<const double> values);

/// One statistical assertion. Two-sided checks pass when
/// |estimate - target| <= threshold * std_error; one-sided (upper bound)
/// checks pass when estimate <= target + threshold * std_error. A
/// difference below `absolute_floor` always passes, which covers
/// estimators that are constant up to roundoff.
struct StatCheck {
  std::string name;
  double estimate = 0.0;
  double target = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double threshold = 3.0;
  bool upper_bound_only = false;
  bool pass = false;
};

StatCheck make_check(std::string name, double estimate, double target, double std_error,
                     double threshold = 3.0, bool upper_bound_only = false,
                     double absolute_floor = 1e-9);

// Sample variance with the standard error of (x - mean)^2.
StatCheck variance_check(std::string name, std::span<const double> values, double target,
                         double threshold = 3.0);
// Sample covariance with the standard error of (x - xbar)(y - ybar).
StatCheck covariance_check(std::string name, std::span<const double> xs,
                           std::span<const double> ys, double target, double threshold = 3.0);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of ln-residuals
};

// Least squares of ln(mean) on ln(N). Throws ParameterError for fewer than
// two points or non-positive values.
LogLogFit fit_loglog_slope(std::span<const double> n, std::span<const double> mean);

// Worker count used when 0 is requested.
std::size_t default_workers();

/// Evaluates fn(i) for i in [0, count) on `workers` threads and returns the
/// results by index, so downstream reductions do not depend on scheduling.
/// The first exception thrown by fn is rethrown after all workers stop.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t count, std::size_t workers, F&& fn) {
  std::vector<R> out(count);
  if (workers == 0) workers = default_workers();
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
        return;
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace kquad
