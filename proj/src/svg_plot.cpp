#include "kquad/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace kquad {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 90, kRight = 190, kTop = 40, kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void write_loglog_svg(std::ostream& os, const std::string& title,
                      const std::vector<PlotSeries>& series, const std::string& x_label,
                      const std::string& y_label) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  xmin = std::floor(xmin * 10) / 10;
  xmax = std::ceil(xmax * 10) / 10;
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log10(x) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (ymax - std::log10(y)) / (ymax - ymin) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title) << "</text>\n";

  for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e) {
    const double y = py(std::pow(10.0, e));
    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + pw)
       << "\" y2=\"" << num(y) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4)
       << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  for (int e = static_cast<int>(std::floor(xmin)); e <= static_cast<int>(std::ceil(xmax)); ++e) {
    for (int k = 1; k <= 9; ++k) {
      const double x = k * std::pow(10.0, e);
      const double lx = std::log10(x);
      if (lx < xmin - 1e-12 || lx > xmax + 1e-12) continue;
      os << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(x))
         << "\" y2=\"" << num(kTop + ph) << "\" stroke=\"" << (k == 1 ? "#ccc" : "#f0f0f0")
         << "\"/>\n";
      if (k == 1 || k == 2 || k == 5) {
        os << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + ph + 16)
           << "\" text-anchor=\"middle\">" << static_cast<long long>(std::llround(x)) << "</text>\n";
      }
    }
  }
  os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
     << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 18)
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(20," << num(kTop + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  std::size_t color_index = 0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = s.dashed ? "#555" : kPalette[color_index++ % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (s.dashed) os << " stroke-dasharray=\"6,4\"";
    os << " points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      os << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    }
    os << "\"/>\n";
    if (!s.dashed) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
        os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
           << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    const double ly = kTop + 12 + 20.0 * static_cast<double>(k);
    os << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
       << num(kLeft + pw + 36) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    os << "<text x=\"" << num(kLeft + pw + 42) << "\" y=\"" << num(ly + 4) << "\">"
       << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
}

void write_rate_svg(std::ostream& os, const std::vector<ExperimentResult>& results) {
  std::vector<PlotSeries> series;
  PlotSeries rn{"r_N", {}, {}, true}, sigma{"sigma_{N+1}", {}, {}, true};
  std::string title = "squared worst-case error vs N";
  for (const auto& r : results) {
    PlotSeries s{r.series.rule, {}, {}, false};
    for (const auto& p : r.series.points) {
      s.x.push_back(static_cast<double>(p.n));
      s.y.push_back(p.mean);
    }
    series.push_back(std::move(s));
  }
  if (!results.empty()) {
    const auto& first = results.front();
    char buf[120];
    std::snprintf(buf, sizeof buf, " (s=%g, g=%s, %zu trials)", first.config.s,
                  first.config.g.to_string().c_str(), first.config.trials);
    title += buf;
    for (const auto& p : first.series.points) {
      rn.x.push_back(static_cast<double>(p.n));
      rn.y.push_back(p.ref_r_n);
      sigma.x.push_back(static_cast<double>(p.n));
      sigma.y.push_back(p.ref_sigma_next);
    }
    series.push_back(std::move(rn));
    series.push_back(std::move(sigma));
  }
  write_loglog_svg(os, title, series);
}

}  // namespace kquad
