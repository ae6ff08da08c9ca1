#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "lanewrap/types.hpp"

namespace lanewrap::testing {

struct OracleProjection {
  double s = 0.0;
  double d = 0.0;
};

/// Brute force: sample the raw polyline every `step` metres and take the
/// nearest sample. The sign of d comes from the sampled segment direction.
inline OracleProjection dense_projection(const std::vector<Vec2>& vertices, Vec2 p, double step = 1e-3) {
  OracleProjection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  double s0 = 0.0;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    const Vec2 a = vertices[i];
    const Vec2 b = vertices[i + 1];
    const double len = distance(a, b);
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    const Vec2 t = (1.0 / len) * (b - a);
    for (int k = 0; k <= n; ++k) {
      const double f = static_cast<double>(k) / n;
      const Vec2 q = a + f * (b - a);
      const Vec2 r = p - q;
      const double d2 = dot(r, r);
      if (d2 < best_d2) {
        best_d2 = d2;
        best.s = s0 + f * len;
        best.d = cross(t, r) >= 0.0 ? std::sqrt(d2) : -std::sqrt(d2);
      }
    }
    s0 += len;
  }
  return best;
}

/// Vertices of a circular arc, `n` segments.
inline std::vector<Vec2> arc_vertices(Vec2 center, double radius, double start, double sweep, int n) {
  std::vector<Vec2> out;
  for (int i = 0; i <= n; ++i) {
    const double a = start + sweep * i / n;
    out.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return out;
}

}  // namespace lanewrap::testing
