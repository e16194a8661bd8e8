#include "fpp/report/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fpp/error.hpp"

namespace fpp {

namespace {

constexpr std::array<std::array<int, 3>, 9> kViridis{{{68, 1, 84},
                                                      {71, 45, 123},
                                                      {59, 82, 139},
                                                      {44, 114, 142},
                                                      {33, 145, 140},
                                                      {40, 174, 128},
                                                      {94, 201, 98},
                                                      {173, 220, 48},
                                                      {253, 231, 37}}};

constexpr std::array<std::array<int, 3>, 10> kTab10{{{31, 119, 180},
                                                     {255, 127, 14},
                                                     {44, 160, 44},
                                                     {214, 39, 40},
                                                     {148, 103, 189},
                                                     {140, 86, 75},
                                                     {227, 119, 194},
                                                     {127, 127, 127},
                                                     {188, 189, 34},
                                                     {23, 190, 207}}};

std::string fmt(double v, int digits = 2) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string short_number(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad(double fraction) {
    if (!(hi > lo)) {
      lo -= 1.0;
      hi += 1.0;
      return;
    }
    const double d = (hi - lo) * fraction;
    lo -= d;
    hi += d;
  }
  double unit(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.5; }
};

class Canvas {
 public:
  Canvas(double width, double height) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width, 0) << "\" height=\"" << fmt(height, 0)
         << "\" viewBox=\"0 0 " << fmt(width, 0) << ' ' << fmt(height, 0) << "\" font-family=\"sans-serif\">\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width, 0) << "\" height=\"" << fmt(height, 0)
         << "\" fill=\"white\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 12, const char* anchor = "middle",
            double rotate = 0.0) {
    out_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << size << "\" text-anchor=\""
         << anchor << '"';
    if (rotate != 0.0) out_ << " transform=\"rotate(" << fmt(rotate, 0) << ' ' << fmt(x) << ' ' << fmt(y) << ")\"";
    out_ << '>' << xml_escape(s) << "</text>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill, const char* stroke = nullptr) {
    out_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
         << "\" fill=\"" << fill << '"';
    if (stroke) out_ << " stroke=\"" << stroke << '"';
    out_ << "/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const char* stroke, double width = 1.0) {
    out_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2) << "\" y2=\"" << fmt(y2)
         << "\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(width, 1) << "\"/>\n";
  }

  void circle(double x, double y, double r, const std::string& fill) {
    out_ << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"" << fmt(r, 1) << "\" fill=\"" << fill
         << "\"/>\n";
  }

  void raw(const std::string& s) { out_ << s; }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

constexpr double kPanel = 400.0;
constexpr double kLeft = 70.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 80.0;
constexpr double kGap = 40.0;
constexpr double kLegend = 130.0;

void colour_legend(Canvas& c, double x, double y, const Response& colour, const Range& range) {
  if (colour.is_categorical()) {
    c.text(x, y - 8, colour.name(), 12, "start");
    for (int k = 0; k < colour.class_count(); ++k) {
      const double yy = y + 18.0 * k;
      c.rect(x, yy, 12, 12, css_hex(tab10(static_cast<std::size_t>(k))));
      const auto uk = static_cast<std::size_t>(k);
      const std::string label = uk < colour.class_names().size() ? colour.class_names()[uk] : std::to_string(k);
      c.text(x + 18, yy + 10, label, 11, "start");
    }
    return;
  }
  c.text(x, y - 8, colour.name(), 12, "start");
  constexpr int steps = 32;
  constexpr double height = 240.0;
  for (int s = 0; s < steps; ++s) {
    const double t = 1.0 - (s + 0.5) / steps;
    c.rect(x, y + height * s / steps, 16, height / steps + 0.5, css_hex(viridis(t)));
  }
  c.text(x + 22, y + 10, short_number(range.hi), 11, "start");
  c.text(x + 22, y + height, short_number(range.lo), 11, "start");
}

}  // namespace

Rgb viridis(double t) {
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0) * 8.0;
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), 7);
  const double f = t - static_cast<double>(i);
  const auto& a = kViridis[i];
  const auto& b = kViridis[i + 1];
  auto mix = [f](int x, int y) { return ((1.0 - f) * x + f * y) / 255.0; };
  return {mix(a[0], b[0]), mix(a[1], b[1]), mix(a[2], b[2])};
}

Rgb tab10(std::size_t index) {
  const auto& c = kTab10[index % kTab10.size()];
  return {c[0] / 255.0, c[1] / 255.0, c[2] / 255.0};
}

std::string css_hex(const Rgb& c) {
  auto byte = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", byte(c.r), byte(c.g), byte(c.b));
  return buf;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string axis_caption(const std::vector<AxisWeight>& weights) {
  std::string out;
  for (const auto& w : weights) {
    if (!out.empty()) out += ", ";
    out += (w.weight < 0 ? "-" : "+") + fmt(std::abs(w.weight)) + " " + w.feature;
  }
  return out;
}

std::string scatter_svg(const ScatterPanel& panel, const AxisCaptions& axes) {
  return panels_svg({panel}, axes);
}

std::string panels_svg(const std::vector<ScatterPanel>& panels, const AxisCaptions& axes) {
  if (panels.empty()) throw ValidationError("scatter plot needs at least one panel");
  Range xr, yr, cr;
  for (const auto& p : panels) {
    if (p.colour.size() != static_cast<std::size_t>(p.points.rows())) {
      throw ValidationError("scatter plot: colour values do not match the point count");
    }
    if (!p.points.allFinite()) throw ValidationError("scatter plot: non-finite coordinates");
    for (Eigen::Index i = 0; i < p.points.rows(); ++i) {
      xr.add(p.points(i, 0));
      yr.add(p.points(i, 1));
      cr.add(p.colour.values()[i]);
    }
  }
  xr.pad(0.05);
  yr.pad(0.05);
  const bool categorical = panels.front().colour.is_categorical();

  const auto count = static_cast<double>(panels.size());
  const double width = kLeft + count * kPanel + (count - 1.0) * kGap + kLegend;
  const double height = kTop + kPanel + kBottom;
  Canvas c(width, height);

  for (std::size_t k = 0; k < panels.size(); ++k) {
    const auto& p = panels[k];
    const double x0 = kLeft + static_cast<double>(k) * (kPanel + kGap);
    c.rect(x0, kTop, kPanel, kPanel, "none", "#444444");
    c.text(x0 + kPanel / 2, kTop - 14, p.title, 14);
    for (int t = 0; t <= 4; ++t) {
      const double u = t / 4.0;
      c.text(x0 + u * kPanel, kTop + kPanel + 16, short_number(xr.lo + u * (xr.hi - xr.lo)), 10);
      if (k == 0) c.text(x0 - 6, kTop + kPanel - u * kPanel + 4, short_number(yr.lo + u * (yr.hi - yr.lo)), 10, "end");
    }
    c.text(x0 + kPanel / 2, kTop + kPanel + 40, axes.x, 12);
    if (k == 0) c.text(18, kTop + kPanel / 2, axes.y, 12, "middle", -90.0);

    const double radius = p.points.rows() > 5000 ? 1.2 : (p.points.rows() > 1000 ? 1.8 : 2.5);
    c.raw("<g fill-opacity=\"0.8\">\n");
    for (Eigen::Index i = 0; i < p.points.rows(); ++i) {
      const double px = x0 + xr.unit(p.points(i, 0)) * kPanel;
      const double py = kTop + kPanel - yr.unit(p.points(i, 1)) * kPanel;
      const Rgb colour = categorical ? tab10(static_cast<std::size_t>(p.colour.labels()[static_cast<std::size_t>(i)]))
                                     : viridis(cr.unit(p.colour.values()[i]));
      c.circle(px, py, radius, css_hex(colour));
    }
    c.raw("</g>\n");
  }
  colour_legend(c, width - kLegend + 20, kTop + 20, panels.front().colour, cr);
  return c.finish();
}

std::string histogram_svg(const std::vector<double>& samples, double observed, const std::string& title,
                          const std::string& x_label, std::size_t bins) {
  if (samples.empty()) throw ValidationError("histogram needs samples");
  if (bins == 0) throw ValidationError("histogram needs at least one bin");
  Range r;
  for (double v : samples) {
    if (std::isfinite(v)) r.add(v);
  }
  if (std::isfinite(observed)) r.add(observed);
  r.pad(0.05);

  std::vector<std::size_t> counts(bins, 0);
  for (double v : samples) {
    if (!std::isfinite(v)) continue;
    const auto b = std::min(bins - 1, static_cast<std::size_t>(r.unit(v) * static_cast<double>(bins)));
    ++counts[b];
  }
  const double peak = static_cast<double>(*std::max_element(counts.begin(), counts.end()));

  Canvas c(kLeft + kPanel + 40, kTop + kPanel + kBottom);
  c.text(kLeft + kPanel / 2, kTop - 14, title, 14);
  c.rect(kLeft, kTop, kPanel, kPanel, "none", "#444444");
  const double bw = kPanel / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double h = peak > 0 ? kPanel * 0.95 * static_cast<double>(counts[b]) / peak : 0.0;
    c.rect(kLeft + bw * static_cast<double>(b), kTop + kPanel - h, bw, h, "#7f9fbf", "white");
  }
  for (int t = 0; t <= 4; ++t) {
    const double u = t / 4.0;
    c.text(kLeft + u * kPanel, kTop + kPanel + 16, short_number(r.lo + u * (r.hi - r.lo)), 10);
    c.text(kLeft - 6, kTop + kPanel - u * kPanel * 0.95 + 4, short_number(u * peak), 10, "end");
  }
  if (std::isfinite(observed)) {
    const double x = kLeft + r.unit(observed) * kPanel;
    c.line(x, kTop, x, kTop + kPanel, "red", 2.0);
    c.text(x + 4, kTop + 14, "observed " + short_number(observed), 11, "start");
  }
  c.text(kLeft + kPanel / 2, kTop + kPanel + 40, x_label, 12);
  c.text(18, kTop + kPanel / 2, "count", 12, "middle", -90.0);
  return c.finish();
}

std::string heatmap_svg(const HeatmapSpec& spec) {
  const auto rows = spec.values.rows();
  const auto cols = spec.values.cols();
  if (rows == 0 || cols == 0) throw ValidationError("heatmap needs at least one cell");
  if (!(spec.hi > spec.lo)) throw ValidationError("heatmap colour limits must satisfy lo < hi");
  constexpr double cw = 70.0, ch = 40.0;
  const double width = kLeft + 20 + cw * static_cast<double>(cols) + kLegend;
  const double height = kTop + ch * static_cast<double>(rows) + kBottom;
  Canvas c(width, height);
  const double x0 = kLeft + 20;
  c.text(x0 + cw * static_cast<double>(cols) / 2, kTop - 14, spec.title, 14);
  const Range range{spec.lo, spec.hi};
  for (Eigen::Index i = 0; i < rows; ++i) {
    // First row at the bottom so the row axis grows upward.
    const double y = kTop + ch * static_cast<double>(rows - 1 - i);
    const auto ui = static_cast<std::size_t>(i);
    if (ui < spec.row_labels.size()) c.text(x0 - 6, y + ch / 2 + 4, spec.row_labels[ui], 11, "end");
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double v = spec.values(i, j);
      const double x = x0 + cw * static_cast<double>(j);
      const std::string fill = std::isfinite(v) ? css_hex(viridis(range.unit(std::clamp(v, spec.lo, spec.hi))))
                                                : std::string("#cccccc");
      c.rect(x, y, cw, ch, fill, "white");
      const bool dark = std::isfinite(v) && range.unit(std::clamp(v, spec.lo, spec.hi)) < 0.6;
      c.raw("<text x=\"" + fmt(x + cw / 2) + "\" y=\"" + fmt(y + ch / 2 + 4) +
            "\" font-size=\"10\" text-anchor=\"middle\" fill=\"" + (dark ? "white" : "black") + "\">" +
            short_number(v) + "</text>\n");
    }
  }
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    if (uj < spec.col_labels.size()) {
      c.text(x0 + cw * (static_cast<double>(j) + 0.5), kTop + ch * static_cast<double>(rows) + 16,
             spec.col_labels[uj], 11);
    }
  }
  c.text(x0 + cw * static_cast<double>(cols) / 2, kTop + ch * static_cast<double>(rows) + 40, spec.col_axis, 12);
  c.text(18, kTop + ch * static_cast<double>(rows) / 2, spec.row_axis, 12, "middle", -90.0);

  const double lx = width - kLegend + 20;
  constexpr int steps = 32;
  const double lh = std::max(80.0, ch * static_cast<double>(rows));
  for (int s = 0; s < steps; ++s) {
    c.rect(lx, kTop + lh * s / steps, 16, lh / steps + 0.5, css_hex(viridis(1.0 - (s + 0.5) / steps)));
  }
  c.text(lx + 22, kTop + 10, short_number(spec.hi), 11, "start");
  c.text(lx + 22, kTop + lh, short_number(spec.lo), 11, "start");
  return c.finish();
}

}  // namespace fpp
