// Deterministic SVG renderers for the publication-analogue artifacts:
// activation heatmaps, effect-size plots, and reducibility q-curves.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semnet/activation.hpp"
#include "semnet/reducibility.hpp"

namespace semnet {

struct HeatmapStyle {
  std::string title;
  std::size_t group_split_row = 0;  // gap inserted before this row (0 = none)
  int cell = 14;                    // cell edge in px
};

// One cell per (prime, target); sequential 8-step ramp scaled to the data.
std::string render_heatmap(const ActivationMatrix& m, const HeatmapStyle& style);

struct EffectSeries {
  std::string label;
  std::vector<std::optional<double>> values;  // one per layer; nullopt = missing
};

struct EffectPanel {
  std::string name;  // e.g. "female targets"
  std::vector<EffectSeries> series;
};

struct EffectPlotData {
  std::string title;
  std::vector<std::string> layers;  // x axis, associative -> categorical
  std::vector<EffectPanel> panels;
};

// Effect size vs layer, one polyline per series, fixed [-1, 1] y-scale with
// a zero line; one sub-plot per panel.
std::string render_effect_plot(const EffectPlotData& data);

std::string effect_plot_csv(const EffectPlotData& data);

// q vs merge step with the optimal configuration marked.
std::string render_q_curve(const ReductionReport& report);

}  // namespace semnet
