#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qsim/runner.hpp"

namespace qsim {

enum class PlotKind { rate_vs_time, rate_vs_param, elevation_vs_time };

// Renders result rows as a deterministic standalone SVG (fixed 800x500
// canvas, fixed palette, %.2f coordinates): identical rows always yield
// identical bytes.
//   rate_vs_time      one series per distinct param, rate_mean over t_s
//   rate_vs_param     best rate per param value (numeric or categorical)
//   elevation_vs_time station elevation columns over t_s
// Throws std::invalid_argument when the rows contain nothing to plot.
void emit_plot(const std::vector<ResultRow>& rows, PlotKind kind,
               const std::string& title, std::ostream& out);

}  // namespace qsim
