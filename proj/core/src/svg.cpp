#include "lanewrap/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace lanewrap {

namespace {

struct Canvas {
  double min_x, max_y, scale;

  std::string point(Vec2 p) const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f", (p.x - min_x) * scale, (max_y - p.y) * scale);
    return buf;
  }

  std::string polyline(const std::vector<Vec2>& pts, const std::string& style) const {
    std::string s = "<polyline fill=\"none\" " + style + " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) s += ' ';
      s += point(pts[i]);
    }
    return s + "\"/>\n";
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string render_svg(const Scene& scene, const std::vector<CenterlineSequence>* sequences,
                       const PredictionSet* predictions, const PlotOptions& options) {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  auto grow = [&](Vec2 p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  };
  for (const auto& lane : scene.lanes) {
    for (const auto& p : lane.centerline) grow(p.position());
  }
  for (const auto& a : scene.agents) {
    for (const auto& st : a.states) grow(st.position());
  }
  if (scene.gt_future) {
    for (const auto& p : *scene.gt_future) grow(p);
  }
  if (predictions) {
    for (const auto& t : predictions->trajectories) {
      for (const auto& p : t.waypoints) grow(p);
    }
  }
  if (!(min_x <= max_x)) min_x = min_y = max_x = max_y = 0.0;
  min_x -= options.margin_m;
  min_y -= options.margin_m;
  max_x += options.margin_m;
  max_y += options.margin_m;

  const Canvas c{min_x, max_y, options.pixels_per_metre};
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num((max_x - min_x) * c.scale) +
                    "\" height=\"" + num((max_y - min_y) * c.scale) + "\">\n";
  svg += "<title>" + scene.scene_id + "</title>\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  for (const auto& lane : scene.lanes) {
    std::vector<Vec2> pts;
    for (const auto& p : lane.centerline) pts.push_back(p.position());
    svg += c.polyline(pts, "stroke=\"#d9d9d9\" stroke-linecap=\"round\" stroke-width=\"" +
                               num(lane.width * c.scale) + "\"");
    svg += c.polyline(pts, "stroke=\"#9e9e9e\" stroke-dasharray=\"4 4\" stroke-width=\"1\"");
  }
  if (sequences) {
    for (const auto& seq : *sequences) {
      svg += c.polyline(seq.polyline.vertices(), "stroke=\"#2e9e44\" stroke-width=\"2\"");
    }
  }
  for (const auto& a : scene.agents) {
    std::vector<Vec2> pts;
    for (const auto& st : a.states) pts.push_back(st.position());
    const bool tv = a.id == scene.tv_id;
    svg += c.polyline(pts, tv ? "stroke=\"#e6b800\" stroke-width=\"3\"" : "stroke=\"#8c8c8c\" stroke-width=\"2\"");
    if (!pts.empty()) {
      const std::string xy = c.point(pts.back());
      const auto comma = xy.find(',');
      svg += "<circle cx=\"" + xy.substr(0, comma) + "\" cy=\"" + xy.substr(comma + 1) + "\" r=\"4\" fill=\"" +
             (tv ? "#e6b800" : "#8c8c8c") + "\"/>\n";
    }
  }
  if (predictions) {
    for (const auto& t : predictions->trajectories) {
      const double opacity = std::clamp(0.25 + 0.75 * t.probability, 0.25, 1.0);
      svg += c.polyline(t.waypoints, "stroke=\"#1f5fd6\" stroke-width=\"2\" stroke-opacity=\"" + num(opacity) + "\"");
    }
  }
  if (scene.gt_future) svg += c.polyline(*scene.gt_future, "stroke=\"#d62728\" stroke-width=\"2.5\"");
  svg += "</svg>\n";
  return svg;
}

}  // namespace lanewrap
