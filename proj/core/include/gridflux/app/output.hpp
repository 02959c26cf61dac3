#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "gridflux/solver/solver.hpp"

namespace gridflux::app {

/// `time` column then the waveform columns; 9 significant digits, '.'
/// decimal separator regardless of locale.
void write_csv(const solver::WaveformSet& w, std::ostream& out);
void write_csv(const solver::WaveformSet& w, const std::string& path);

/// SVG 1.1 line chart of the named columns against time. Throws
/// std::invalid_argument for an empty selection or unknown names.
std::string render_svg(const solver::WaveformSet& w, const std::vector<std::string>& vars,
                       const std::string& title = "");
void emit_plot(const solver::WaveformSet& w, const std::vector<std::string>& vars, const std::string& path);

}  // namespace gridflux::app
