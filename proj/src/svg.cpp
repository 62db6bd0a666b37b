#include "qsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <stdexcept>

namespace qsim {

namespace {

constexpr double kWidth = 800.0, kHeight = 500.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 42.0, kBottom = 52.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

std::string fmt2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt3g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  void fit(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (hi <= lo) {
      const double pad = (lo == 0.0) ? 1.0 : std::abs(lo) * 0.1;
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

void emit_plot(const std::vector<ResultRow>& rows, PlotKind kind,
               const std::string& title, std::ostream& out) {
  std::vector<Series> series;
  std::vector<std::string> categories;  // categorical x tick labels
  std::string x_label, y_label;

  const auto series_for = [&](const std::string& name) -> Series& {
    for (auto& s : series) {
      if (s.name == name) return s;
    }
    series.push_back(Series{name, {}, {}});
    return series.back();
  };

  switch (kind) {
    case PlotKind::rate_vs_time:
      x_label = "t (s)";
      y_label = "rate per photon";
      for (const auto& r : rows) {
        if (std::isnan(r.rate_mean)) continue;
        Series& s = series_for(r.param);
        s.x.push_back(r.t_s);
        s.y.push_back(r.rate_mean);
      }
      break;
    case PlotKind::rate_vs_param: {
      x_label = "swept value";
      y_label = "best rate per photon";
      // Best rate per param, in first-seen param order.
      std::vector<std::string> order;
      std::map<std::string, double> best;
      bool numeric = true;
      for (const auto& r : rows) {
        if (std::isnan(r.rate_mean)) continue;
        if (!best.count(r.param)) {
          order.push_back(r.param);
          best[r.param] = r.rate_mean;
        } else {
          best[r.param] = std::max(best[r.param], r.rate_mean);
        }
        char* end = nullptr;
        std::strtod(r.param.c_str(), &end);
        if (end == r.param.c_str() || *end != '\0') numeric = false;
      }
      Series& s = series_for("");
      for (std::size_t i = 0; i < order.size(); ++i) {
        s.x.push_back(numeric ? std::strtod(order[i].c_str(), nullptr)
                              : static_cast<double>(i));
        s.y.push_back(best[order[i]]);
      }
      if (!numeric) categories = order;
      break;
    }
    case PlotKind::elevation_vs_time:
      x_label = "t (s)";
      y_label = "elevation (deg)";
      for (const auto& r : rows) {
        if (!std::isnan(r.elev_a_deg)) {
          Series& s = series_for("station A");
          s.x.push_back(r.t_s);
          s.y.push_back(r.elev_a_deg);
        }
        if (!std::isnan(r.elev_b_deg)) {
          Series& s = series_for("station B");
          s.x.push_back(r.t_s);
          s.y.push_back(r.elev_b_deg);
        }
      }
      break;
  }

  series.erase(std::remove_if(series.begin(), series.end(),
                              [](const Series& s) { return s.x.empty(); }),
               series.end());
  if (series.empty()) throw std::invalid_argument("emit_plot: nothing to plot");

  Axis ax, ay;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        ax.lo = ax.hi = s.x[i];
        ay.lo = ay.hi = s.y[i];
        first = false;
      }
      ax.fit(s.x[i]);
      ay.fit(s.y[i]);
    }
  }
  ax.finish();
  ay.finish();

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double v) { return kLeft + (v - ax.lo) / (ax.hi - ax.lo) * pw; };
  const auto py = [&](double v) { return kHeight - kBottom - (v - ay.lo) / (ay.hi - ay.lo) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\">\n";
  out << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  out << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << escape(title) << "</text>\n";

  // frame
  out << "<rect x=\"" << fmt2(kLeft) << "\" y=\"" << fmt2(kTop) << "\" width=\"" << fmt2(pw)
      << "\" height=\"" << fmt2(ph) << "\" fill=\"none\" stroke=\"#333333\"/>\n";

  // x ticks: even subdivisions, or one tick per category
  constexpr int kTicks = 5;
  const auto x_tick = [&](double gx, const std::string& label) {
    out << "<line x1=\"" << fmt2(gx) << "\" y1=\"" << fmt2(kHeight - kBottom) << "\" x2=\""
        << fmt2(gx) << "\" y2=\"" << fmt2(kHeight - kBottom + 5) << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << fmt2(gx) << "\" y=\"" << fmt2(kHeight - kBottom + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape(label) << "</text>\n";
  };
  if (categories.empty()) {
    for (int i = 0; i < kTicks; ++i) {
      const double fx = ax.lo + (ax.hi - ax.lo) * i / (kTicks - 1);
      x_tick(px(fx), fmt3g(fx));
    }
  } else {
    for (std::size_t i = 0; i < categories.size(); ++i) {
      x_tick(px(static_cast<double>(i)), categories[i]);
    }
  }
  for (int i = 0; i < kTicks; ++i) {
    const double fy = ay.lo + (ay.hi - ay.lo) * i / (kTicks - 1);
    const double gy = py(fy);
    out << "<line x1=\"" << fmt2(kLeft - 5) << "\" y1=\"" << fmt2(gy) << "\" x2=\"" << fmt2(kLeft)
        << "\" y2=\"" << fmt2(gy) << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << fmt2(kLeft - 8) << "\" y=\"" << fmt2(gy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape(fmt3g(fy)) << "</text>\n";
  }

  // axis labels
  out << "<text x=\"" << fmt2(kLeft + pw / 2) << "\" y=\"" << fmt2(kHeight - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << fmt2(kTop + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 16 "
      << fmt2(kTop + ph / 2) << ")\">" << escape(y_label) << "</text>\n";

  // series
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (i) out << ' ';
      out << fmt2(px(series[s].x[i])) << ',' << fmt2(py(series[s].y[i]));
    }
    out << "\"/>\n";
    if (series[s].x.size() == 1) {
      out << "<circle cx=\"" << fmt2(px(series[s].x[0])) << "\" cy=\""
          << fmt2(py(series[s].y[0])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
  }

  // legend (only when series are named)
  std::size_t legend_row = 0;
  for (std::size_t s = 0; s < series.size(); ++s) {
    if (series[s].name.empty()) continue;
    const double ly = kTop + 14.0 + 16.0 * static_cast<double>(legend_row++);
    const double lx = kWidth - kRight - 150.0;
    out << "<line x1=\"" << fmt2(lx) << "\" y1=\"" << fmt2(ly - 4) << "\" x2=\"" << fmt2(lx + 18)
        << "\" y2=\"" << fmt2(ly - 4) << "\" stroke=\"" << kPalette[s % kPaletteSize]
        << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << fmt2(lx + 24) << "\" y=\"" << fmt2(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(series[s].name)
        << "</text>\n";
  }

  out << "</svg>\n";
}

}  // namespace qsim
