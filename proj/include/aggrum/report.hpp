#pragma once

#include <string>
#include <vector>

#include "aggrum/simulation.hpp"

namespace aggrum {

// "%.9g", with "nan"/"inf" spelled out.
std::string format_number(double v);

// Header names the axes and measures; absent measures are empty fields.
std::string sweep_csv(const std::vector<SweepRow>& rows, SweepKind kind);
std::string minmax_csv(const std::vector<MinMaxRow>& rows);

enum class HeatmapMeasure { Bias, Distance };

// One heatmap per measure: diverging palette for signed bias, sequential for distance; the independent
// cell is outlined.
std::string sweep_svg(const std::vector<SweepRow>& rows, SweepKind kind, HeatmapMeasure measure,
                      const std::string& title);

}  // namespace aggrum
