#pragma once

// CSV tables and minimal SVG line plots.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace snspec {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size()) throw std::logic_error("Table::add_row: column count mismatch");
    for (double v : row)
      if (!std::isfinite(v)) throw std::logic_error("Table::add_row: non-finite value");
    rows.push_back(std::move(row));
  }

  [[nodiscard]] std::vector<double> column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("Table::column: " + name);
    const auto j = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[j]);
    return out;
  }
};

/// 17 significant digits round-trip every double.
inline std::string format_value(double v) { return fmt::format("{:.17g}", v); }

inline std::string to_csv(const Table& t) {
  std::string s;
  for (std::size_t j = 0; j < t.columns.size(); ++j) s += (j ? "," : "") + t.columns[j];
  s += '\n';
  for (const auto& r : t.rows) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) s += ',';
      s += format_value(r[j]);
    }
    s += '\n';
  }
  return s;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<PlotSeries> series;
};

inline std::string xml_escape(const std::string& s) {
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

inline std::string render_svg(const PlotSpec& plot) {
  constexpr double W = 640, H = 420, left = 70, right = 160, top = 40, bottom = 50;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      W, H);
  s += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", left + pw / 2,
                   xml_escape(plot.title));
  s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left, top,
                   pw, ph);
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n", px(xv), top + ph + 18,
                     xv);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.5g}</text>\n", left - 6, py(yv) + 4, yv);
    s += fmt::format("<line x1=\"{:.1f}\" y1=\"{}\" x2=\"{:.1f}\" y2=\"{}\" stroke=\"#ddd\"/>\n", px(xv), top, px(xv),
                     top + ph);
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2, H - 10,
                   xml_escape(plot.xlabel));
  s += fmt::format("<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
                   top + ph / 2, top + ph / 2, xml_escape(plot.ylabel));
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& ser = plot.series[k];
    const char* color = colors[k % std::size(colors)];
    std::string pts;
    for (std::size_t i = 0; i < ser.x.size(); ++i) pts += fmt::format("{:.2f},{:.2f} ", px(ser.x[i]), py(ser.y[i]));
    s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>\n", color, pts);
    for (std::size_t i = 0; i < ser.x.size(); ++i)
      s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", px(ser.x[i]), py(ser.y[i]),
                       color);
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                     left + pw + 10, ly, left + pw + 30, ly, color);
    s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", left + pw + 36, ly + 4, xml_escape(ser.name));
  }
  s += "</svg>\n";
  return s;
}

}  // namespace snspec
