#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "hopcap/error.hpp"
#include "hopcap/report.hpp"

namespace hopcap {

namespace {

constexpr double kMarginLeft = 90.0;
constexpr double kMarginRight = 170.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 60.0;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string label_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void push_unique(std::vector<double>& v, double x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

PlotFrame plot_frame(const std::vector<CapacityPoint>& points, const PlotOptions& options) {
  if (!(options.capacity_slope > 0.0)) throw DomainError("capacity slope must be positive");
  PlotFrame f;
  std::map<std::string, PlotSeries> groups;
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  double y_top = 0.0;
  for (const auto& p : points) {
    push_unique(f.entropy_lines, p.entropy_bits);
    push_unique(f.baseline_lines, p.baseline_bits);
    y_top = std::max({y_top, p.entropy_bits, p.baseline_bits, p.content_bits});
    if (!p.param_count || !(*p.param_count > 0.0)) {
      f.skipped.push_back(p.label);
      continue;
    }
    auto& g = groups[p.model_kind];
    g.name = p.model_kind;
    g.points.emplace_back(*p.param_count, p.content_bits);
    const double lx = std::log10(*p.param_count);
    lo = any ? std::min(lo, lx) : lx;
    hi = any ? std::max(hi, lx) : lx;
    any = true;
  }
  std::sort(f.entropy_lines.begin(), f.entropy_lines.end());
  std::sort(f.baseline_lines.begin(), f.baseline_lines.end());
  if (!any) {
    lo = 4.0;
    hi = 7.0;
  } else if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  } else {
    const double pad = 0.1 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  f.log_x_min = lo;
  f.log_x_max = hi;
  f.y_min = 0.0;
  f.y_max = y_top > 0.0 ? 1.1 * y_top : 1.0;
  for (auto& [name, g] : groups) {
    std::sort(g.points.begin(), g.points.end());
    f.series.push_back(std::move(g));
  }
  return f;
}

std::string scaling_plot(const std::vector<CapacityPoint>& points, const PlotOptions& options) {
  const auto f = plot_frame(points, options);
  const double w = options.width;
  const double h = options.height;
  const double x0 = kMarginLeft;
  const double x1 = w - kMarginRight;
  const double y0 = h - kMarginBottom;
  const double y1 = kMarginTop;
  auto sx = [&](double params) {
    return x0 + (std::log10(params) - f.log_x_min) / (f.log_x_max - f.log_x_min) * (x1 - x0);
  };
  auto sy = [&](double bits) { return y0 - (bits - f.y_min) / (f.y_max - f.y_min) * (y0 - y1); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
       "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"white\"/>\n";
  s += "<defs><clipPath id=\"plot-area\"><rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" +
       num(x1 - x0) + "\" height=\"" + num(y0 - y1) + "\"/></clipPath></defs>\n";

  // axes
  s += "<g stroke=\"black\" fill=\"none\">\n";
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y0) + "\"/>\n";
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(y1) + "\"/>\n";
  s += "</g>\n<g fill=\"black\">\n";
  for (int d = static_cast<int>(std::ceil(f.log_x_min)); d <= static_cast<int>(std::floor(f.log_x_max)); ++d) {
    const double x = sx(std::pow(10.0, d));
    s += "<line x1=\"" + num(x) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x) + "\" y2=\"" + num(y0 + 5) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(x) + "\" y=\"" + num(y0 + 20) + "\" text-anchor=\"middle\">1e" + std::to_string(d) +
         "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = f.y_min + (f.y_max - f.y_min) * i / 5.0;
    const double y = sy(v);
    s += "<line x1=\"" + num(x0 - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(y) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + label_num(v) + "</text>\n";
  }
  s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(h - 15) +
       "\" text-anchor=\"middle\">parameters (log scale)</text>\n";
  s += "<text x=\"20\" y=\"" + num((y0 + y1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
       num((y0 + y1) / 2) + ")\">information content (bits)</text>\n";
  s += "</g>\n";

  s += "<g clip-path=\"url(#plot-area)\" fill=\"none\" stroke-width=\"1.5\">\n";
  for (double e : f.entropy_lines) {
    s += "<path class=\"ref-entropy\" stroke=\"#555555\" d=\"M" + num(x0) + " " + num(sy(e)) + " H" + num(x1) +
         "\"/>\n";
  }
  for (double b : f.baseline_lines) {
    s += "<path class=\"ref-baseline\" stroke=\"#999999\" stroke-dasharray=\"2 3\" d=\"M" + num(x0) + " " +
         num(sy(b)) + " H" + num(x1) + "\"/>\n";
  }
  auto capacity_path = [&](const char* cls, double slope, const char* dash) {
    std::string d;
    constexpr int kSteps = 64;
    for (int i = 0; i <= kSteps; ++i) {
      const double lx = f.log_x_min + (f.log_x_max - f.log_x_min) * i / kSteps;
      const double params = std::pow(10.0, lx);
      d += (i == 0 ? "M" : " L") + num(sx(params)) + " " + num(sy(slope * params));
    }
    s += std::string("<path class=\"") + cls + "\" stroke=\"black\" stroke-dasharray=\"" + dash + "\" d=\"" + d +
         "\"/>\n";
  };
  capacity_path("ref-capacity", options.capacity_slope, "6 4");
  if (options.observed_slope) capacity_path("ref-capacity-observed", *options.observed_slope, "1 3");

  std::size_t colour = 0;
  for (const auto& series : f.series) {
    const char* c = kPalette[colour++ % std::size(kPalette)];
    std::string d;
    for (std::size_t i = 0; i < series.points.size(); ++i) {
      d += (i == 0 ? "M" : " L") + num(sx(series.points[i].first)) + " " + num(sy(series.points[i].second));
    }
    s += "<path class=\"series\" data-series=\"" + escape_xml(series.name) + "\" stroke=\"" + c + "\" d=\"" + d +
         "\"/>\n";
    for (const auto& [px, py] : series.points) {
      s += "<circle class=\"marker\" cx=\"" + num(sx(px)) + "\" cy=\"" + num(sy(py)) + "\" r=\"3\" fill=\"" + c +
           "\"/>\n";
    }
  }
  s += "</g>\n";

  // legend
  s += "<g font-size=\"11\">\n";
  double ly = y1 + 10;
  colour = 0;
  for (const auto& series : f.series) {
    const char* c = kPalette[colour++ % std::size(kPalette)];
    s += "<text x=\"" + num(x1 + 12) + "\" y=\"" + num(ly) + "\" fill=\"" + c + "\">" + escape_xml(series.name) +
         "</text>\n";
    ly += 16;
  }
  s += "<text x=\"" + num(x1 + 12) + "\" y=\"" + num(ly) + "\">dataset entropy</text>\n";
  ly += 16;
  s += "<text x=\"" + num(x1 + 12) + "\" y=\"" + num(ly) + "\">uniform baseline</text>\n";
  ly += 16;
  s += "<text x=\"" + num(x1 + 12) + "\" y=\"" + num(ly) + "\">" + label_num(options.capacity_slope) +
       " bits/param</text>\n";
  if (options.observed_slope) {
    ly += 16;
    s += "<text x=\"" + num(x1 + 12) + "\" y=\"" + num(ly) + "\">" + label_num(*options.observed_slope) +
         " bits/param</text>\n";
  }
  s += "</g>\n</svg>\n";
  return s;
}

std::string scaling_plot_from_csv(std::string_view csv, const PlotOptions& options) {
  return scaling_plot(parse_capacity_table(csv), options);
}

}  // namespace hopcap
