#pragma once

// Static SVG line charts: metric against the swept variable, one polyline
// per scheme, with 95% CI whiskers at each point.

#include <filesystem>
#include <string>
#include <vector>

#include "crmcast/experiment.hpp"

namespace crmcast {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> ci;  // half-widths, same length as y
};

std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series);

/// Writes `<metric>_<tree>.svg` for metric in {throughput, pdr} and every
/// tree kind present. Returns the written paths.
std::vector<std::filesystem::path> plot_aggregate(const std::vector<AggregateRow>& rows, SweepVariable variable,
                                                  const std::filesystem::path& out_dir);

}  // namespace crmcast
