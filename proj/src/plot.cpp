#include "lcd/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lcd {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 80.0;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Axis {
  double lo;
  double hi;
  double map(double v, double from, double to) const { return from + (v - lo) / (hi - lo) * (to - from); }
};

Axis padded_axis(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = std::max(std::abs(lo) * 0.1, 0.05);
    return {lo - pad, hi + pad};
  }
  const double pad = 0.08 * (hi - lo);
  return {lo - pad, hi + pad};
}

void header(std::ostringstream& svg, const PlotText& text) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  svg << "<desc>" << escape(text.footer) << "</desc>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kLeft) << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" << escape(text.title)
      << "</text>\n";
}

void axes(std::ostringstream& svg, const PlotText& text, const Axis& y, const std::vector<std::pair<double, std::string>>& xticks) {
  const double x0 = kLeft;
  const double x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom;
  const double y1 = kTop;
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y0) << "\"/>\n";
  svg << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y1) << "\"/>\n";
  svg << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = y.lo + (y.hi - y.lo) * i / 5.0;
    const double py = y.map(v, y0, y1);
    svg << "<line x1=\"" << num(x0 - 4) << "\" y1=\"" << num(py) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(py)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << tick(v) << "</text>\n";
  }
  for (const auto& [px, label] : xticks) {
    svg << "<line x1=\"" << num(px) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px) << "\" y2=\"" << num(y0 + 4)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(px) << "\" y=\"" << num(y0 + 18) << "\" text-anchor=\"middle\">" << escape(label)
        << "</text>\n";
  }
  svg << "<text x=\"" << num(0.5 * (x0 + x1)) << "\" y=\"" << num(y0 + 38) << "\" text-anchor=\"middle\">"
      << escape(text.x_label) << "</text>\n";
  svg << "<text transform=\"translate(18," << num(0.5 * (y0 + y1)) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(text.y_label) << "</text>\n";
  svg << "<text x=\"10\" y=\"" << num(kHeight - 10) << "\" font-size=\"9\" fill=\"#555\">" << escape(text.footer)
      << "</text>\n</g>\n";
}

void legend(std::ostringstream& svg, const std::vector<Series>& series) {
  const double lx = kWidth - kRight + 16;
  svg << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
    svg << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly - 9) << "\" width=\"12\" height=\"12\" fill=\""
        << kPalette[i % kPalette.size()] << "\"/>\n";
    svg << "<text x=\"" << num(lx + 18) << "\" y=\"" << num(ly + 1) << "\">" << escape(series[i].name) << "</text>\n";
  }
  svg << "</g>\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void write_line_plot_svg(const std::filesystem::path& path, const PlotText& text, const std::vector<Series>& series) {
  double xlo = std::numeric_limits<double>::infinity();
  double xhi = -xlo;
  double ylo = xlo;
  double yhi = -xlo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double e = i < s.err.size() ? s.err[i] : 0.0;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i] - e);
      yhi = std::max(yhi, s.y[i] + e);
    }
  }
  if (!std::isfinite(xlo)) throw std::invalid_argument("plot: no data points");
  const Axis xa = padded_axis(xlo, xhi);
  const Axis ya = padded_axis(ylo, yhi);
  const double x0 = kLeft;
  const double x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom;
  const double y1 = kTop;

  std::vector<std::pair<double, std::string>> xticks;
  for (const auto& s : series) {
    for (double x : s.x) {
      const double px = xa.map(x, x0, x1);
      if (std::none_of(xticks.begin(), xticks.end(), [&](const auto& t) { return std::abs(t.first - px) < 1e-9; })) {
        xticks.emplace_back(px, tick(x));
      }
    }
  }

  std::ostringstream svg;
  header(svg, text);
  axes(svg, text, ya, xticks);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % kPalette.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << (i ? " " : "") << num(xa.map(s.x[i], x0, x1)) << ',' << num(ya.map(s.y[i], y0, y1));
    }
    svg << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double px = xa.map(s.x[i], x0, x1) + 3.0 * (static_cast<double>(k) - 0.5 * (series.size() - 1));
      const double py = ya.map(s.y[i], y0, y1);
      if (i < s.err.size() && s.err[i] > 0.0) {
        svg << "<line x1=\"" << num(px) << "\" y1=\"" << num(ya.map(s.y[i] - s.err[i], y0, y1)) << "\" x2=\"" << num(px)
            << "\" y2=\"" << num(ya.map(s.y[i] + s.err[i], y0, y1)) << "\" stroke=\"" << color << "\"/>\n";
      }
      svg << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
    }
  }
  legend(svg, series);
  svg << "</svg>\n";
  write_file(path, svg.str());
}

void write_bar_chart_svg(const std::filesystem::path& path, const PlotText& text, const std::vector<std::string>& categories,
                         const std::vector<Series>& series) {
  if (categories.empty() || series.empty()) throw std::invalid_argument("bar chart: nothing to draw");
  double ylo = 0.0;
  double yhi = 0.0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      const double e = i < s.err.size() ? s.err[i] : 0.0;
      if (std::isfinite(s.y[i])) {
        ylo = std::min(ylo, s.y[i] - e);
        yhi = std::max(yhi, s.y[i] + e);
      }
    }
  }
  const Axis ya = padded_axis(ylo, yhi);
  const double x0 = kLeft;
  const double x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom;
  const double y1 = kTop;
  const double group = (x1 - x0) / static_cast<double>(categories.size());
  const double bar = 0.8 * group / static_cast<double>(series.size());

  std::vector<std::pair<double, std::string>> xticks;
  for (std::size_t c = 0; c < categories.size(); ++c) xticks.emplace_back(x0 + group * (c + 0.5), categories[c]);

  std::ostringstream svg;
  header(svg, text);
  axes(svg, text, ya, xticks);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % kPalette.size()];
    for (std::size_t c = 0; c < categories.size() && c < series[k].y.size(); ++c) {
      const double v = series[k].y[c];
      if (!std::isfinite(v)) continue;
      const double left = x0 + group * c + 0.1 * group + bar * k;
      const double top = ya.map(std::max(v, 0.0), y0, y1);
      const double bottom = ya.map(std::min(v, 0.0), y0, y1);
      svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(bar) << "\" height=\""
          << num(bottom - top) << "\" fill=\"" << color << "\"/>\n";
      if (c < series[k].err.size() && series[k].err[c] > 0.0) {
        const double mid = left + 0.5 * bar;
        svg << "<line x1=\"" << num(mid) << "\" y1=\"" << num(ya.map(v - series[k].err[c], y0, y1)) << "\" x2=\""
            << num(mid) << "\" y2=\"" << num(ya.map(v + series[k].err[c], y0, y1)) << "\" stroke=\"black\"/>\n";
      }
    }
  }
  legend(svg, series);
  svg << "</svg>\n";
  write_file(path, svg.str());
}

}  // namespace lcd
