#include "semnet/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semnet/graph_io.hpp"

namespace semnet {
namespace {

// ColorBrewer Blues-8 (sequential) and Dark2-8 (categorical).
const char* const kRamp[8] = {"#f7fbff", "#deebf7", "#c6dbef", "#9ecae1",
                              "#6baed6", "#4292c6", "#2171b5", "#084594"};
const char* const kPalette[8] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                 "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

class Svg {
 public:
  Svg(double width, double height) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << format_double(width)
          << ' ' << format_double(height) << "\" width=\"" << format_double(width)
          << "\" height=\"" << format_double(height) << "\" font-family=\"monospace\">\n";
    body_ << "<rect x=\"0\" y=\"0\" width=\"" << format_double(width) << "\" height=\""
          << format_double(height) << "\" fill=\"#ffffff\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    body_ << "<rect x=\"" << format_double(x) << "\" y=\"" << format_double(y) << "\" width=\""
          << format_double(w) << "\" height=\"" << format_double(h) << "\" fill=\"" << fill
          << "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0, bool dashed = false) {
    body_ << "<line x1=\"" << format_double(x1) << "\" y1=\"" << format_double(y1) << "\" x2=\""
          << format_double(x2) << "\" y2=\"" << format_double(y2) << "\" stroke=\"" << stroke
          << "\" stroke-width=\"" << format_double(width) << '"';
    if (dashed) body_ << " stroke-dasharray=\"4 3\"";
    body_ << "/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill,
              const std::string& stroke = "none") {
    body_ << "<circle cx=\"" << format_double(cx) << "\" cy=\"" << format_double(cy) << "\" r=\""
          << format_double(r) << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& points, const std::string& stroke) {
    if (points.size() < 2) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i) body_ << ' ';
      body_ << format_double(points[i].first) << ',' << format_double(points[i].second);
    }
    body_ << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 10,
            const std::string& anchor = "start", const std::string& transform = "",
            const std::string& fill = "#000000") {
    body_ << "<text x=\"" << format_double(x) << "\" y=\"" << format_double(y)
          << "\" font-size=\"" << size << "\" text-anchor=\"" << anchor << "\" fill=\"" << fill
          << '"';
    if (!transform.empty()) body_ << " transform=\"" << transform << '"';
    body_ << '>' << xml_escape(s) << "</text>\n";
  }

  std::string finish() {
    body_ << "</svg>\n";
    return body_.str();
  }

 private:
  std::ostringstream body_;
};

int ramp_bucket(double value, double lo, double hi) {
  if (!(hi > lo)) return 0;
  double t = (value - lo) / (hi - lo);
  int bucket = static_cast<int>(t * 8.0);
  return std::clamp(bucket, 0, 7);
}

}  // namespace

std::string render_heatmap(const ActivationMatrix& m, const HeatmapStyle& style) {
  const std::size_t rows = m.primes.size();
  const std::size_t cols = m.targets.size();
  if (rows == 0 || cols == 0 || m.values.size() == 0)
    throw Error(ErrorCode::EmptyMatrix, "heatmap needs a non-empty matrix");

  double lo = m.values.minCoeff();
  double hi = m.values.maxCoeff();

  const double cell = style.cell;
  const double gap = 6.0;
  const double left = 110.0, top = 96.0, right = 20.0, bottom = 64.0;
  const bool split = style.group_split_row > 0 && style.group_split_row < rows;
  const double width = left + cell * static_cast<double>(cols) + right;
  const double height =
      top + cell * static_cast<double>(rows) + (split ? gap : 0.0) + bottom;

  Svg svg(width, height);
  if (!style.title.empty()) svg.text(left, 20.0, style.title, 13);

  auto row_y = [&](std::size_t r) {
    return top + cell * static_cast<double>(r) + (split && r >= style.group_split_row ? gap : 0.0);
  };

  for (std::size_t c = 0; c < cols; ++c) {
    const double x = left + cell * static_cast<double>(c) + cell / 2.0;
    svg.text(x, top - 6.0, m.targets[c], 9, "start",
             "rotate(-60 " + format_double(x) + " " + format_double(top - 6.0) + ")");
  }
  for (std::size_t r = 0; r < rows; ++r)
    svg.text(left - 6.0, row_y(r) + cell / 2.0 + 3.0, m.primes[r], 10, "end");

  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      svg.rect(left + cell * static_cast<double>(c), row_y(r), cell - 1.0, cell - 1.0,
               kRamp[ramp_bucket(v, lo, hi)]);
    }

  // Color legend: the 8 ramp steps with the data range at the ends.
  const double ly = height - bottom + 24.0;
  for (int i = 0; i < 8; ++i) svg.rect(left + 18.0 * i, ly, 17.0, 12.0, kRamp[i]);
  svg.text(left - 6.0, ly + 10.0, format_double(lo), 9, "end");
  svg.text(left + 18.0 * 8 + 6.0, ly + 10.0, format_double(hi), 9);
  return svg.finish();
}

std::string render_effect_plot(const EffectPlotData& data) {
  if (data.panels.empty() || data.layers.empty())
    throw Error(ErrorCode::EmptyReport, "effect plot needs at least one panel and one layer");
  for (const auto& panel : data.panels)
    if (panel.series.empty())
      throw Error(ErrorCode::EmptyReport, "effect panel '" + panel.name + "' has no series");

  const double panel_w = 300.0, panel_h = 260.0;
  const double left = 52.0, top = 48.0, gap = 28.0, bottom = 46.0;
  std::size_t n_series = 0;
  for (const auto& p : data.panels) n_series = std::max(n_series, p.series.size());
  const double legend_w = 150.0;
  const double width =
      left + (panel_w + gap) * static_cast<double>(data.panels.size()) - gap + legend_w + 20.0;
  const double height = top + panel_h + bottom;

  Svg svg(width, height);
  if (!data.title.empty()) svg.text(left, 22.0, data.title, 13);

  auto y_of = [&](double r) { return top + (1.0 - r) / 2.0 * panel_h; };

  for (std::size_t p = 0; p < data.panels.size(); ++p) {
    const auto& panel = data.panels[p];
    const double x0 = left + (panel_w + gap) * static_cast<double>(p);

    svg.text(x0 + panel_w / 2.0, top - 10.0, panel.name, 11, "middle");
    svg.rect(x0, top, panel_w, panel_h, "#fafafa");
    for (double tick : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const double y = y_of(tick);
      svg.line(x0, y, x0 + panel_w, y, tick == 0.0 ? "#555555" : "#dddddd", 1.0, tick == 0.0);
      if (p == 0) svg.text(x0 - 8.0, y + 3.0, format_double(tick), 9, "end");
    }

    const double step = panel_w / static_cast<double>(data.layers.size() + 1);
    auto x_of = [&](std::size_t layer) { return x0 + step * static_cast<double>(layer + 1); };
    for (std::size_t l = 0; l < data.layers.size(); ++l)
      svg.text(x_of(l), top + panel_h + 16.0, data.layers[l], 10, "middle");

    for (std::size_t s = 0; s < panel.series.size(); ++s) {
      const std::string color = kPalette[s % 8];
      std::vector<std::pair<double, double>> run;
      for (std::size_t l = 0; l < data.layers.size(); ++l) {
        const auto& v = l < panel.series[s].values.size() ? panel.series[s].values[l]
                                                          : std::optional<double>{};
        if (v) {
          run.emplace_back(x_of(l), y_of(*v));
        } else {
          svg.polyline(run, color);
          run.clear();
        }
      }
      svg.polyline(run, color);
      for (std::size_t l = 0; l < data.layers.size(); ++l) {
        const auto& v = l < panel.series[s].values.size() ? panel.series[s].values[l]
                                                          : std::optional<double>{};
        if (v) svg.circle(x_of(l), y_of(*v), 3.0, color);
      }
    }
  }

  // Legend from the first panel's series labels (shared across panels).
  const double lx = width - legend_w;
  svg.text(lx, top - 10.0, "series", 10);
  for (std::size_t s = 0; s < data.panels.front().series.size(); ++s) {
    const double y = top + 8.0 + 16.0 * static_cast<double>(s);
    svg.rect(lx, y - 8.0, 10.0, 10.0, kPalette[s % 8]);
    svg.text(lx + 16.0, y, data.panels.front().series[s].label, 9);
  }
  return svg.finish();
}

std::string effect_plot_csv(const EffectPlotData& data) {
  std::ostringstream out;
  out << "panel,series,layer,r\n";
  for (const auto& panel : data.panels)
    for (const auto& series : panel.series)
      for (std::size_t l = 0; l < data.layers.size(); ++l) {
        out << panel.name << ',' << series.label << ',' << data.layers[l] << ',';
        if (l < series.values.size() && series.values[l]) out << format_double(*series.values[l]);
        out << '\n';
      }
  return out.str();
}

std::string render_q_curve(const ReductionReport& report) {
  const std::size_t n = report.q_curve.size();
  if (n == 0) throw Error(ErrorCode::EmptyReport, "q-curve is empty");

  const double left = 64.0, top = 40.0, right = 24.0, bottom = 56.0;
  const double plot_w = 340.0, plot_h = 240.0;
  const double width = left + plot_w + right, height = top + plot_h + bottom;

  double q_hi = *std::max_element(report.q_curve.begin(), report.q_curve.end());
  q_hi = std::max(q_hi * 1.15, 0.05);

  Svg svg(width, height);
  svg.text(left, 20.0, "relative entropy q by aggregation step", 12);
  svg.rect(left, top, plot_w, plot_h, "#fafafa");

  auto y_of = [&](double q) { return top + plot_h - q / q_hi * plot_h; };
  const double step = n > 1 ? plot_w / static_cast<double>(n - 1) : 0.0;
  auto x_of = [&](std::size_t i) {
    return n > 1 ? left + step * static_cast<double>(i) : left + plot_w / 2.0;
  };

  for (double frac : {0.0, 0.5, 1.0}) {
    const double q = q_hi * frac;
    svg.line(left, y_of(q), left + plot_w, y_of(q), "#dddddd");
    svg.text(left - 8.0, y_of(q) + 3.0, format_double(q), 9, "end");
  }

  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < n; ++i) {
    points.emplace_back(x_of(i), y_of(report.q_curve[i]));
    svg.text(x_of(i), top + plot_h + 16.0,
             std::to_string(report.partitions[i].blocks.size()) + " blk", 9, "middle");
  }
  svg.polyline(points, kPalette[2]);
  for (const auto& [x, y] : points) svg.circle(x, y, 3.0, kPalette[2]);

  const std::size_t best = n - report.optimal.blocks.size();
  svg.circle(points[best].first, points[best].second, 6.0, "none", "#d95f02");
  svg.text(points[best].first, points[best].second - 10.0, "optimal", 9, "middle", "", "#d95f02");
  svg.text(left, height - 12.0,
           std::string("irreducible: ") + (report.irreducible ? "true" : "false") +
               (report.degenerate ? " (degenerate)" : ""),
           10);
  return svg.finish();
}

}  // namespace semnet
