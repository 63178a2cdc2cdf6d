#pragma once

// Flat-file output: CSV with 17 significant digits and standalone SVG line
// plots. No external renderer.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "csdyn/error.hpp"

namespace csdyn::io {

// Shortest round-trip is not what we want here: fixed 17 significant digits
// keeps columns byte-stable across platforms with IEEE doubles.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw NumericalError("format_double: to_chars failed");
  return std::string(buf, res.ptr);
}

class CsvWriter {
public:
  CsvWriter(std::ostream& os, std::vector<std::string> header) : os_(os), columns_(header.size()) {
    if (header.empty()) throw InvalidArgument("csv header must not be empty");
    write_fields(header);
  }

  // Fields are written verbatim; callers format numbers with format_double.
  void row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) throw InvalidArgument("csv row has wrong number of fields");
    write_fields(fields);
  }

  void row(std::initializer_list<double> values) {
    std::vector<std::string> f;
    f.reserve(values.size());
    for (double v : values) f.push_back(format_double(v));
    row(f);
  }

  std::size_t columns() const noexcept { return columns_; }

private:
  void write_fields(const std::vector<std::string>& f) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i) os_ << ',';
      os_ << f[i];
    }
    os_ << '\n';
  }

  std::ostream& os_;
  std::size_t columns_;
};

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;  // NaN breaks the polyline
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

namespace detail {

inline std::string escape_xml(std::string_view s) {
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

inline std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

inline std::string tick_label(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, res.ptr);
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return colors[i % 6];
}

} // namespace detail

// One plot per document, linear axes, five ticks per axis, legend top-right.
inline std::string render_svg(const Plot& plot) {
  constexpr double width = 720, height = 480, left = 80, right = 20, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) throw InvalidArgument("series x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || !std::isfinite(s.x[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) {
    const double pad = ymin == 0.0 ? 1.0 : 0.1 * std::abs(ymin);
    ymin -= pad;
    ymax += pad;
  }
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
     << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << detail::escape_xml(plot.title) << "</text>\n"
     << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0, yv = ymin + (ymax - ymin) * k / 4.0;
    os << "<line x1=\"" << detail::num(sx(xv)) << "\" y1=\"" << top + ph << "\" x2=\"" << detail::num(sx(xv))
       << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << detail::num(sx(xv)) << "\" y=\"" << top + ph + 20
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << detail::tick_label(xv)
       << "</text>\n"
       << "<line x1=\"" << left - 5 << "\" y1=\"" << detail::num(sy(yv)) << "\" x2=\"" << left << "\" y2=\""
       << detail::num(sy(yv)) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << left - 8 << "\" y=\"" << detail::num(sy(yv) + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::tick_label(yv)
       << "</text>\n";
  }
  if (ymin < 0.0 && ymax > 0.0)
    os << "<line x1=\"" << left << "\" y1=\"" << detail::num(sy(0.0)) << "\" x2=\"" << left + pw << "\" y2=\""
       << detail::num(sy(0.0)) << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << detail::escape_xml(plot.x_label)
     << "</text>\n"
     << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "font-size=\"13\" transform=\"rotate(-90 18 " << top + ph / 2 << ")\">" << detail::escape_xml(plot.y_label)
     << "</text>\n";

  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const Series& s = plot.series[si];
    std::string pts;
    auto flush = [&] {
      if (!pts.empty())
        os << "<polyline fill=\"none\" stroke=\"" << detail::palette(si) << "\" stroke-width=\"1.5\" points=\""
           << pts << "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += ' ';
      pts += detail::num(sx(s.x[i])) + "," + detail::num(sy(s.y[i]));
    }
    flush();
    const double ly = top + 16 + 18 * static_cast<double>(si);
    os << "<line x1=\"" << left + pw - 150 << "\" y1=\"" << ly << "\" x2=\"" << left + pw - 125 << "\" y2=\"" << ly
       << "\" stroke=\"" << detail::palette(si) << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << left + pw - 118 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
       << detail::escape_xml(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace csdyn::io
