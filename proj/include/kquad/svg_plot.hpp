#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kquad/experiment.hpp"

namespace kquad {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;  // reference curves
};

// Log-log line plot with decade grid lines. Non-positive points are skipped.
void write_loglog_svg(std::ostream& os, const std::string& title,
                      const std::vector<PlotSeries>& series,
                      const std::string& x_label = "N",
                      const std::string& y_label = "mean squared worst-case error");

// One series per experiment plus dashed r_N and sigma_{N+1} references.
void write_rate_svg(std::ostream& os, const std::vector<ExperimentResult>& results);

}  // namespace kquad
