#include "crmcast/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "crmcast/csv.hpp"

namespace crmcast {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 80, kRight = 130, kTop = 40, kBottom = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series) {
  double x_min = INFINITY, x_max = -INFINITY, y_max = 0.0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_max = std::max(y_max, s.y[i] + (i < s.ci.size() ? s.ci[i] : 0.0));
    }
  if (!std::isfinite(x_min)) x_min = 0, x_max = 1;
  if (x_max == x_min) x_min -= 0.5, x_max += 0.5;
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.05;

  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - y / y_max * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
      << "</text>\n";

  // axes and ticks
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double yv = y_max * t / 5.0, xv = x_min + (x_max - x_min) * t / 5.0;
    svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << py(yv) << "\" x2=\"" << kLeft << "\" y2=\"" << py(yv)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << num(yv)
        << "</text>\n";
    svg << "<text x=\"" << px(xv) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">" << num(xv)
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  svg << "<text transform=\"translate(20," << kTop + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    svg << "<polyline class=\"series\" data-label=\"" << escape(s.label) << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) svg << (i ? " " : "") << px(s.x[i]) << ',' << py(s.y[i]);
    svg << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size() && i < s.ci.size(); ++i) {
      const double x = px(s.x[i]);
      const double lo = py(std::max(0.0, s.y[i] - s.ci[i])), hi = py(s.y[i] + s.ci[i]);
      svg << "<path class=\"whisker\" stroke=\"" << color << "\" d=\"M" << x << ',' << lo << " V" << hi << " M"
          << x - 4 << ',' << lo << " h8 M" << x - 4 << ',' << hi << " h8\"/>\n";
      svg << "<circle cx=\"" << x << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 10 + 20.0 * k;
    svg << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 40
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kWidth - kRight + 46 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> plot_aggregate(const std::vector<AggregateRow>& rows, SweepVariable variable,
                                                  const std::filesystem::path& out_dir) {
  if (rows.empty()) throw std::invalid_argument("plot: no aggregate rows");
  std::filesystem::create_directories(out_dir);

  std::vector<TreeKind> trees;
  std::vector<Scheme> schemes;
  for (const auto& r : rows) {
    if (std::find(trees.begin(), trees.end(), r.tree) == trees.end()) trees.push_back(r.tree);
    if (std::find(schemes.begin(), schemes.end(), r.scheme) == schemes.end()) schemes.push_back(r.scheme);
  }

  std::vector<std::filesystem::path> written;
  for (bool throughput : {true, false}) {
    for (TreeKind tree : trees) {
      std::vector<PlotSeries> series;
      for (Scheme scheme : schemes) {
        PlotSeries s;
        s.label = to_string(scheme);
        std::transform(s.label.begin(), s.label.end(), s.label.begin(), ::toupper);
        std::vector<const AggregateRow*> points;
        for (const auto& r : rows)
          if (r.tree == tree && r.scheme == scheme) points.push_back(&r);
        std::sort(points.begin(), points.end(), [](auto* a, auto* b) { return a->value < b->value; });
        for (const auto* r : points) {
          s.x.push_back(r->value);
          s.y.push_back(throughput ? r->mean_throughput / 1e6 : r->mean_pdr);
          s.ci.push_back(throughput ? r->ci95_throughput / 1e6 : r->ci95_pdr);
        }
        if (!s.x.empty()) series.push_back(std::move(s));
      }
      auto tree_name = to_string(tree);
      std::transform(tree_name.begin(), tree_name.end(), tree_name.begin(), ::toupper);
      const std::string metric = throughput ? "throughput" : "pdr";
      const std::string title = (throughput ? "Throughput" : "PDR") + std::string(" vs ") + to_string(variable) +
                                " (" + tree_name + ")";
      const auto path = out_dir / (metric + "_" + to_string(tree) + ".svg");
      std::ofstream file(path);
      if (!file) throw std::runtime_error("cannot write " + path.string());
      file << render_svg(title, to_string(variable), throughput ? "average throughput (Mbps)" : "PDR", series);
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace crmcast
