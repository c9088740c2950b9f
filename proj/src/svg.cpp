#include "rhdeform/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rhdeform/errors.hpp"

namespace rhd {

namespace {

struct Rgb {
  int r, g, b;
};

Rgb lerp(Rgb a, Rgb b, double t) {
  auto mix = [t](int x, int y) { return static_cast<int>(std::lround(x + t * (y - x))); };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

std::string to_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

}  // namespace

std::string weight_color(double w) {
  const Rgb green{0, 140, 0}, yellow{240, 220, 0}, red{200, 0, 0};
  double lw = std::log10(std::max(w, 1e-300));
  if (lw <= -16.0) return to_hex(green);
  if (lw <= 0.0) return to_hex(lerp(green, yellow, (lw + 16.0) / 16.0));
  if (lw <= 4.0) return to_hex(lerp(yellow, red, lw / 4.0));
  return to_hex(red);
}

std::string render_svg(const std::vector<Panel>& panels,
                       const std::vector<Complex>& markers, double panel_px) {
  if (panels.empty()) throw InvalidInput("nothing to render");
  // Common data window over all panels.
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  auto grow = [&](Complex z) {
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
  };
  for (const auto& p : panels) {
    if (p.grid)
      for (Complex z : p.grid->pos) grow(z);
    if (p.rhp)
      for (const auto& part : p.rhp->parts)
        for (Complex z : part.arc.points) grow(z);
  }
  for (Complex z : markers) grow(z);
  double pad = 0.04 * std::max(x1 - x0, y1 - y0);
  x0 -= pad;
  x1 += pad;
  y0 -= pad;
  y1 += pad;

  int cols = panels.size() <= 2 ? static_cast<int>(panels.size()) : 2;
  int rows = (static_cast<int>(panels.size()) + cols - 1) / cols;
  double aspect = (y1 - y0) / (x1 - x0);
  double pw = panel_px, ph = panel_px * aspect + 24;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pw * cols
      << "\" height=\"" << ph * rows << "\">\n";

  LocalWeight lwt;
  for (size_t pi = 0; pi < panels.size(); ++pi) {
    const auto& panel = panels[pi];
    double ox = (pi % cols) * pw, oy = (pi / cols) * ph;
    auto sx = [&](Complex z) { return ox + (z.real() - x0) / (x1 - x0) * pw; };
    auto sy = [&](Complex z) { return oy + (y1 - z.imag()) / (y1 - y0) * (ph - 24); };
    svg << "<g>\n";
    if (panel.grid) {
      for (auto [u, v] : panel.grid->edges) {
        Complex a = panel.grid->pos[u], b = panel.grid->pos[v];
        svg << "<line x1=\"" << sx(a) << "\" y1=\"" << sy(a) << "\" x2=\"" << sx(b)
            << "\" y2=\"" << sy(b) << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
      }
    }
    if (panel.rhp) {
      for (const auto& part : panel.rhp->parts) {
        const auto& pts = part.arc.points;
        for (size_t i = 1; i < pts.size(); ++i) {
          double w = 0.5 * (lwt(part.jump(pts[i - 1])) + lwt(part.jump(pts[i])));
          svg << "<line x1=\"" << sx(pts[i - 1]) << "\" y1=\"" << sy(pts[i - 1])
              << "\" x2=\"" << sx(pts[i]) << "\" y2=\"" << sy(pts[i]) << "\" stroke=\""
              << weight_color(w) << "\" stroke-width=\"2.2\"/>\n";
        }
      }
    }
    for (Complex m : markers)
      svg << "<circle cx=\"" << sx(m) << "\" cy=\"" << sy(m)
          << "\" r=\"3\" fill=\"#1040d0\"/>\n";
    svg << "<text x=\"" << ox + 8 << "\" y=\"" << oy + ph - 8
        << "\" font-family=\"sans-serif\" font-size=\"13\">" << panel.caption
        << "</text>\n";
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  out << content;
}

nlohmann::json graph_to_json(const PlanarGraph& g, const std::vector<double>* weights) {
  nlohmann::json vertices = nlohmann::json::array();
  for (Complex p : g.pos) vertices.push_back({p.real(), p.imag()});
  nlohmann::json edges = nlohmann::json::array();
  for (int e = 0; e < g.num_edges(); ++e) {
    nlohmann::json edge = {{"u", g.edges[e].first}, {"v", g.edges[e].second}};
    if (weights) edge["weight"] = (*weights)[e];
    edges.push_back(edge);
  }
  return {{"vertices", vertices}, {"edges", edges}};
}

}  // namespace rhd
