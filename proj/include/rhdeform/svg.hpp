#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rhdeform/planar_graph.hpp"
#include "rhdeform/rhp.hpp"
#include "rhdeform/weighted_graph.hpp"

namespace rhd {

/// One figure panel: a contour colored by the magnitude of ||G - I||_F on a
/// light grid underlay, plus marker dots.
struct Panel {
  const RHProblem* rhp = nullptr;
  const PlanarGraph* grid = nullptr;
  std::string caption;
};

/// Log-scale colormap of the local weight: green = 1e-16, yellow = 1,
/// red = 1e4.
std::string weight_color(double w);

std::string render_svg(const std::vector<Panel>& panels,
                       const std::vector<Complex>& markers, double panel_px = 420);

void write_text_file(const std::string& path, const std::string& content);

/// Graph debug dump: vertices with positions, edges with weights.
nlohmann::json graph_to_json(const PlanarGraph& g, const std::vector<double>* weights);

}  // namespace rhd
