#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "specwave/errors.hpp"
#include "specwave/io.hpp"

// Deterministic SVG renderers: fixed canvas, fixed palette, locale-independent
// number formatting, so re-rendering the same data reproduces the file byte
// for byte.
namespace specwave {

enum class PlotKind { lines, heatmap, spectrum, gamma, dispersion };

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotData {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;          // lines, spectrum, gamma, dispersion
  std::vector<double> x;                   // heatmap column positions
  std::vector<double> times;               // heatmap row times
  std::vector<std::vector<double>> field;  // heatmap values, field[row][column]
};

namespace plot_detail {

inline constexpr int canvas_w = 800;
inline constexpr int canvas_h = 500;
inline constexpr int margin_left = 80;
inline constexpr int margin_right = 24;
inline constexpr int margin_top = 48;
inline constexpr int margin_bottom = 56;
inline constexpr double log_floor = 1e-18;

inline const char* palette(std::size_t index) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return colors[index % 6];
}

inline std::string num(double v) { return format_fixed(v, 2); }

inline std::string tick_label(double v) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, v, std::chars_format::general, 4);
  return std::string(buffer, result.ptr);
}

struct Frame {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double px(double x) const {
    const double t = (x - x_min) / (x_max - x_min);
    return margin_left + t * (canvas_w - margin_left - margin_right);
  }
  double py(double y) const {
    const double t = (y - y_min) / (y_max - y_min);
    return canvas_h - margin_bottom - t * (canvas_h - margin_top - margin_bottom);
  }
};

inline void open_svg(std::ofstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << canvas_w << "\" height=\"" << canvas_h
      << "\" viewBox=\"0 0 " << canvas_w << " " << canvas_h << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << canvas_w << "\" height=\"" << canvas_h
      << "\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"" << canvas_w / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"16\">" << title << "</text>\n";
}

inline void draw_axes(std::ofstream& out, const std::string& x_label, const std::string& y_label) {
  const double x0 = margin_left;
  const double x1 = canvas_w - margin_right;
  const double y0 = canvas_h - margin_bottom;
  const double y1 = margin_top;
  out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\""
      << num(y0) << "\" stroke=\"#000000\"/>\n";
  out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\""
      << num(y1) << "\" stroke=\"#000000\"/>\n";
  out << "<text x=\"" << num(0.5 * (x0 + x1)) << "\" y=\"" << canvas_h - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << num(0.5 * (y0 + y1))
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << num(0.5 * (y0 + y1)) << ")\">" << y_label << "</text>\n";
}

inline void draw_x_ticks(std::ofstream& out, const Frame& frame) {
  for (int i = 0; i <= 5; ++i) {
    const double v = frame.x_min + (frame.x_max - frame.x_min) * static_cast<double>(i) / 5.0;
    const double p = frame.px(v);
    const double base = canvas_h - margin_bottom;
    out << "<line x1=\"" << num(p) << "\" y1=\"" << num(base) << "\" x2=\"" << num(p) << "\" y2=\""
        << num(base + 5.0) << "\" stroke=\"#000000\"/>\n";
    out << "<text x=\"" << num(p) << "\" y=\"" << num(base + 20.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(v)
        << "</text>\n";
  }
}

inline void draw_y_ticks_linear(std::ofstream& out, const Frame& frame) {
  for (int i = 0; i <= 5; ++i) {
    const double v = frame.y_min + (frame.y_max - frame.y_min) * static_cast<double>(i) / 5.0;
    const double p = frame.py(v);
    out << "<line x1=\"" << num(margin_left - 5.0) << "\" y1=\"" << num(p) << "\" x2=\""
        << num(static_cast<double>(margin_left)) << "\" y2=\"" << num(p) << "\" stroke=\"#000000\"/>\n";
    out << "<text x=\"" << num(margin_left - 9.0) << "\" y=\"" << num(p + 4.0)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(v)
        << "</text>\n";
  }
}

// For log axes the frame's y coordinates are decimal exponents; ticks sit on
// integer decades labeled 1e<d>.
inline void draw_y_ticks_decades(std::ofstream& out, const Frame& frame) {
  const int bottom = static_cast<int>(std::ceil(frame.y_min - 1e-9));
  const int top = static_cast<int>(std::floor(frame.y_max + 1e-9));
  const int span = std::max(1, top - bottom);
  const int step = std::max(1, (span + 7) / 8);
  for (int d = bottom; d <= top; d += step) {
    const double p = frame.py(static_cast<double>(d));
    out << "<line x1=\"" << num(margin_left - 5.0) << "\" y1=\"" << num(p) << "\" x2=\""
        << num(static_cast<double>(margin_left)) << "\" y2=\"" << num(p) << "\" stroke=\"#000000\"/>\n";
    out << "<text x=\"" << num(margin_left - 9.0) << "\" y=\"" << num(p + 4.0)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << d << "</text>\n";
  }
}

inline void draw_polyline(std::ofstream& out, const Frame& frame, const PlotSeries& series,
                          const char* color, bool log_y) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t j = 0; j < series.x.size(); ++j) {
    if (!std::isfinite(series.x[j]) || !std::isfinite(series.y[j])) continue;
    double y = series.y[j];
    if (log_y) y = std::log10(std::max(std::abs(y), log_floor));
    out << num(frame.px(series.x[j])) << ',' << num(frame.py(y)) << ' ';
  }
  out << "\"/>\n";
}

inline void draw_legend(std::ofstream& out, const std::vector<PlotSeries>& series) {
  double y = margin_top + 14.0;
  for (std::size_t s = 0; s < series.size(); ++s) {
    if (series[s].label.empty()) continue;
    const double x = canvas_w - margin_right - 150.0;
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9.0)
        << "\" width=\"10\" height=\"10\" fill=\"" << palette(s) << "\"/>\n";
    out << "<text x=\"" << num(x + 16.0) << "\" y=\"" << num(y)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[s].label << "</text>\n";
    y += 16.0;
  }
}

inline void render_line_plot(const PlotData& data, bool log_y, const std::filesystem::path& path) {
  if (data.series.empty()) throw ConfigError("series", "nothing to plot");
  for (const PlotSeries& s : data.series) {
    if (s.x.empty() || s.x.size() != s.y.size()) {
      throw ConfigError("series", "each plotted series needs matching non-empty x and y");
    }
  }
  Frame frame;
  bool first_x = true;
  bool first_y = true;
  for (const PlotSeries& s : data.series) {
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (!std::isfinite(s.x[j]) || !std::isfinite(s.y[j])) continue;
      if (first_x) {
        frame.x_min = frame.x_max = s.x[j];
        first_x = false;
      } else {
        frame.x_min = std::min(frame.x_min, s.x[j]);
        frame.x_max = std::max(frame.x_max, s.x[j]);
      }
      const double y = log_y ? std::log10(std::max(std::abs(s.y[j]), log_floor)) : s.y[j];
      if (first_y) {
        frame.y_min = frame.y_max = y;
        first_y = false;
      } else {
        frame.y_min = std::min(frame.y_min, y);
        frame.y_max = std::max(frame.y_max, y);
      }
    }
  }
  if (first_y) throw ConfigError("series", "no finite data to plot");
  if (frame.x_max == frame.x_min) frame.x_max = frame.x_min + 1.0;
  if (frame.y_max == frame.y_min) frame.y_max = frame.y_min + 1.0;

  std::ofstream out = detail::open_for_write(path);
  open_svg(out, data.title);
  draw_axes(out, data.x_label, data.y_label);
  draw_x_ticks(out, frame);
  if (log_y) {
    draw_y_ticks_decades(out, frame);
  } else {
    draw_y_ticks_linear(out, frame);
  }
  for (std::size_t s = 0; s < data.series.size(); ++s) {
    draw_polyline(out, frame, data.series[s], palette(s), log_y);
  }
  draw_legend(out, data.series);
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::string heat_color(double value, double peak) {
  // Diverging blue to white to red around zero.
  if (!std::isfinite(value)) value = 0.0;
  double t = peak == 0.0 ? 0.0 : value / peak;
  t = std::clamp(t, -1.0, 1.0);
  int r = 255;
  int g = 255;
  int b = 255;
  if (t >= 0.0) {
    g = static_cast<int>(std::lround(255.0 * (1.0 - t)));
    b = g;
  } else {
    r = static_cast<int>(std::lround(255.0 * (1.0 + t)));
    g = r;
  }
  char buffer[8];
  std::snprintf(buffer, sizeof buffer, "#%02x%02x%02x", r, g, b);
  return std::string(buffer);
}

inline void render_heatmap_plot(const PlotData& data, const std::filesystem::path& path) {
  if (data.field.empty() || data.x.empty() || data.times.size() != data.field.size()) {
    throw ConfigError("field", "heatmap needs rows aligned with times and a non-empty x axis");
  }
  for (const std::vector<double>& row : data.field) {
    if (row.size() != data.x.size()) {
      throw ConfigError("field", "heatmap rows must match the x axis length");
    }
  }
  const std::size_t col_stride = (data.x.size() + 255) / 256;
  const std::size_t row_stride = (data.field.size() + 127) / 128;
  double peak = 0.0;
  for (const std::vector<double>& row : data.field) {
    for (double v : row) {
      if (std::isfinite(v)) peak = std::max(peak, std::abs(v));
    }
  }

  std::ofstream out = detail::open_for_write(path);
  open_svg(out, data.title);
  const double plot_w = canvas_w - margin_left - margin_right;
  const double plot_h = canvas_h - margin_top - margin_bottom;
  const std::size_t cols = (data.x.size() + col_stride - 1) / col_stride;
  const std::size_t rows = (data.field.size() + row_stride - 1) / row_stride;
  const double cell_w = plot_w / static_cast<double>(cols);
  const double cell_h = plot_h / static_cast<double>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::vector<double>& row = data.field[r * row_stride];
    // Time increases upward: the first row sits at the bottom of the panel.
    const double y = canvas_h - margin_bottom - cell_h * static_cast<double>(r + 1);
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = row[c * col_stride];
      out << "<rect x=\"" << num(margin_left + cell_w * static_cast<double>(c)) << "\" y=\"" << num(y)
          << "\" width=\"" << num(cell_w + 0.5) << "\" height=\"" << num(cell_h + 0.5) << "\" fill=\""
          << heat_color(v, peak) << "\"/>\n";
    }
  }
  Frame frame{data.x.front(), data.x.back(), data.times.front(), data.times.back()};
  if (frame.y_max == frame.y_min) frame.y_max = frame.y_min + 1.0;
  draw_axes(out, data.x_label, data.y_label);
  draw_x_ticks(out, frame);
  draw_y_ticks_linear(out, frame);
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace plot_detail

inline void render_plot(PlotKind kind, const PlotData& data, const std::filesystem::path& path) {
  switch (kind) {
    case PlotKind::lines:
    case PlotKind::gamma:
    case PlotKind::dispersion:
      plot_detail::render_line_plot(data, false, path);
      return;
    case PlotKind::spectrum:
      plot_detail::render_line_plot(data, true, path);
      return;
    case PlotKind::heatmap:
      plot_detail::render_heatmap_plot(data, path);
      return;
  }
  throw ConfigError("kind", "unknown plot kind");
}

}  // namespace specwave
