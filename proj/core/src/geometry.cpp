#include "lanewrap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lanewrap/error.hpp"

namespace lanewrap {

namespace {

constexpr double kDuplicateTol = 1e-9;

Vec2 unit(Vec2 v) {
  const double n = norm(v);
  return {v.x / n, v.y / n};
}

std::vector<double> vertex_curvature(const std::vector<Vec2>& raw) {
  std::vector<double> k(raw.size(), 0.0);
  if (raw.size() < 3) return k;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    k[i] = circumcircle_curvature(raw[i - 1], raw[i], raw[i + 1]);
  }
  k.front() = k[1];
  k.back() = k[raw.size() - 2];
  return k;
}

// Angle between an end chord and the tangent of the circle through it.
double end_turn(double kappa, double chord) { return std::clamp(0.5 * kappa * chord, -0.5, 0.5); }

Vec2 rotate(Vec2 v, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

}  // namespace

double circumcircle_curvature(Vec2 a, Vec2 b, Vec2 c) {
  const double ab = distance(a, b);
  const double bc = distance(b, c);
  const double ca = distance(c, a);
  const double denom = ab * bc * ca;
  if (denom <= 0.0) return 0.0;
  return 2.0 * cross(b - a, c - b) / denom;
}

ParamPolyline ParamPolyline::build(std::span<const Vec2> points, double resample_step) {
  if (!(resample_step > 0.0)) throw GeometryError("resample step must be > 0");
  std::vector<Vec2> raw;
  raw.reserve(points.size());
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("polyline point is not finite");
    if (raw.empty() || distance(raw.back(), p) > kDuplicateTol) raw.push_back(p);
  }
  if (raw.size() < 2) throw GeometryError("polyline needs at least 2 distinct points");
  auto kappa = vertex_curvature(raw);
  // End tangents follow the estimated circle rather than the end chord, so
  // the frame at an end vertex matches the bisector it would have inside.
  const std::size_t m = raw.size();
  const Vec2 head = rotate(unit(raw[1] - raw[0]), -end_turn(kappa.front(), distance(raw[0], raw[1])));
  const Vec2 tail = rotate(unit(raw[m - 1] - raw[m - 2]), end_turn(kappa.back(), distance(raw[m - 2], raw[m - 1])));
  return from_vertices(std::move(raw), std::move(kappa), resample_step, head, tail);
}

ParamPolyline ParamPolyline::from_vertices(std::vector<Vec2> raw, std::vector<double> raw_kappa, double step,
                                           Vec2 head_tangent, Vec2 tail_tangent) {
  ParamPolyline pl;
  pl.head_tangent_ = head_tangent;
  pl.tail_tangent_ = tail_tangent;
  pl.step_ = step;
  pl.raw_ = std::move(raw);
  pl.raw_kappa_ = std::move(raw_kappa);
  pl.raw_s_.assign(pl.raw_.size(), 0.0);

  pl.pts_.push_back(pl.raw_.front());
  pl.s_.push_back(0.0);
  pl.kappa_.push_back(pl.raw_kappa_.front());
  for (std::size_t i = 0; i + 1 < pl.raw_.size(); ++i) {
    const Vec2 a = pl.raw_[i];
    const Vec2 b = pl.raw_[i + 1];
    const double len = distance(a, b);
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / step - 1e-9)));
    const double s0 = pl.raw_s_[i];
    for (std::size_t j = 1; j <= n; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(n);
      // The segment end is copied, not interpolated, so input vertices survive exactly.
      pl.pts_.push_back(j == n ? b : a + t * (b - a));
      pl.s_.push_back(s0 + t * len);
      pl.kappa_.push_back((1.0 - t) * pl.raw_kappa_[i] + t * pl.raw_kappa_[i + 1]);
    }
    pl.raw_s_[i + 1] = s0 + len;
  }

  const std::size_t n = pl.pts_.size();
  pl.tangents_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) pl.tangents_[i] = unit(pl.pts_[i + 1] - pl.pts_[i]);
  pl.normals_.resize(n);
  pl.normals_.front() = left_normal(pl.head_tangent_);
  pl.normals_.back() = left_normal(pl.tail_tangent_);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec2 sum = pl.tangents_[i - 1] + pl.tangents_[i];
    // A reversal has no bisector; fall back to the outgoing segment.
    pl.normals_[i] = norm(sum) < 1e-9 ? left_normal(pl.tangents_[i]) : left_normal(unit(sum));
  }
  return pl;
}

std::size_t ParamPolyline::segment_for(double s) const {
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t i = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
  return std::min(i, s_.size() - 2);
}

Vec2 ParamPolyline::normal_on_segment(std::size_t i, double t) const {
  return unit((1.0 - t) * normals_[i] + t * normals_[i + 1]);
}

Projection ParamPolyline::project(Vec2 p) const {
  const double length = this->length();
  double best_dist = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double best_d = 0.0;
  auto offer = [&](double dist, double s, double d) {
    if (dist < best_dist - 1e-12) {
      best_dist = dist;
      best_s = s;
      best_d = d;
    }
  };

  {
    const Vec2 r = p - pts_.front();
    const double along = dot(r, head_tangent_);
    if (along < 0.0) offer(norm(r), along, cross(head_tangent_, r));
  }

  for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
    const Vec2 a = pts_[i];
    const Vec2 seg = pts_[i + 1] - a;
    const Vec2 na = normals_[i];
    const Vec2 dn = normals_[i + 1] - na;
    const Vec2 r0 = p - a;
    // cross(N(t), p - P(t)) = 0 with N and P linear in t.
    const double c0 = cross(na, r0);
    const double c1 = cross(dn, r0) - cross(na, seg);
    const double c2 = -cross(dn, seg);

    double roots[2];
    int nroots = 0;
    if (c2 == 0.0) {
      if (c1 != 0.0) roots[nroots++] = -c0 / c1;
    } else {
      const double disc = c1 * c1 - 4.0 * c2 * c0;
      if (disc >= 0.0) {
        const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
        if (q != 0.0) {
          roots[nroots++] = q / c2;
          roots[nroots++] = c0 / q;
        } else {
          roots[nroots++] = 0.0;
        }
      }
    }
    for (int k = 0; k < nroots; ++k) {
      double t = roots[k];
      if (!(t >= -1e-9 && t <= 1.0 + 1e-9)) continue;
      t = std::clamp(t, 0.0, 1.0);
      const Vec2 base = a + t * seg;
      const Vec2 r = p - base;
      const double d = dot(r, normal_on_segment(i, t));
      offer(norm(r), s_[i] + t * (s_[i + 1] - s_[i]), d);
    }
  }

  {
    const Vec2 r = p - pts_.back();
    const double along = dot(r, tail_tangent_);
    if (along > 0.0) offer(norm(r), length + along, cross(tail_tangent_, r));
  }

  if (!std::isfinite(best_dist)) {
    // No normal line reaches p (far inside a sharp bend): nearest vertex.
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const Vec2 r = p - pts_[i];
      const Vec2 t = i + 1 < pts_.size() ? tangents_[i] : tangents_.back();
      offer(norm(r), s_[i], std::copysign(norm(r), cross(t, r)));
    }
  }

  Projection out;
  out.s_unclamped = best_s;
  out.point.s = std::clamp(best_s, 0.0, length);
  out.point.d = best_d;
  out.overshoot = best_s < 0.0 ? -best_s : (best_s > length ? best_s - length : 0.0);
  return out;
}

CartesianPoint ParamPolyline::to_cartesian(FrenetPoint fp) const {
  const double length = this->length();
  if (fp.s < 0.0) {
    const Vec2 t = head_tangent_;
    return {pts_.front() + fp.s * t + fp.d * left_normal(t), true};
  }
  if (fp.s > length) {
    const Vec2 t = tail_tangent_;
    return {pts_.back() + (fp.s - length) * t + fp.d * left_normal(t), true};
  }
  const std::size_t i = segment_for(fp.s);
  const double seg_len = s_[i + 1] - s_[i];
  const double t = std::clamp((fp.s - s_[i]) / seg_len, 0.0, 1.0);
  const Vec2 base = pts_[i] + t * (pts_[i + 1] - pts_[i]);
  return {base + fp.d * normal_on_segment(i, t), false};
}

Vec2 ParamPolyline::tangent_at(double s) const {
  if (s <= 0.0) return head_tangent_;
  if (s >= length()) return tail_tangent_;
  const std::size_t i = segment_for(s);
  const double t = std::clamp((s - s_[i]) / (s_[i + 1] - s_[i]), 0.0, 1.0);
  const Vec2 n = normal_on_segment(i, t);
  return {n.y, -n.x};
}

double ParamPolyline::heading_at(double s) const {
  const Vec2 t = tangent_at(s);
  return std::atan2(t.y, t.x);
}

double ParamPolyline::curvature_at(double s) const {
  if (s <= 0.0) return kappa_.front();
  if (s >= length()) return kappa_.back();
  const std::size_t i = segment_for(s);
  const double t = std::clamp((s - s_[i]) / (s_[i + 1] - s_[i]), 0.0, 1.0);
  return (1.0 - t) * kappa_[i] + t * kappa_[i + 1];
}

ParamPolyline ParamPolyline::slice(double s_from, double s_to) const {
  s_from = std::clamp(s_from, 0.0, length());
  s_to = std::clamp(s_to, 0.0, length());
  if (!(s_to > s_from)) throw GeometryError("empty polyline slice");

  auto raw_point = [&](double s, double& kappa) {
    auto it = std::upper_bound(raw_s_.begin(), raw_s_.end(), s);
    std::size_t i = it == raw_s_.begin() ? 0 : static_cast<std::size_t>(it - raw_s_.begin()) - 1;
    i = std::min(i, raw_s_.size() - 2);
    const double t = std::clamp((s - raw_s_[i]) / (raw_s_[i + 1] - raw_s_[i]), 0.0, 1.0);
    kappa = (1.0 - t) * raw_kappa_[i] + t * raw_kappa_[i + 1];
    if (t == 0.0) return raw_[i];
    if (t == 1.0) return raw_[i + 1];
    return raw_[i] + t * (raw_[i + 1] - raw_[i]);
  };

  std::vector<Vec2> pts;
  std::vector<double> kap;
  double k = 0.0;
  pts.push_back(raw_point(s_from, k));
  kap.push_back(k);
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    if (raw_s_[i] > s_from + kDuplicateTol && raw_s_[i] < s_to - kDuplicateTol) {
      pts.push_back(raw_[i]);
      kap.push_back(raw_kappa_[i]);
    }
  }
  const Vec2 last = raw_point(s_to, k);
  if (distance(last, pts.back()) > kDuplicateTol) {
    pts.push_back(last);
    kap.push_back(k);
  }
  if (pts.size() < 2) throw GeometryError("degenerate polyline slice");
  return from_vertices(std::move(pts), std::move(kap), step_, tangent_at(s_from), tangent_at(s_to));
}

ParamPolyline build_polyline(std::span<const Vec2> points, double resample_step) {
  return ParamPolyline::build(points, resample_step);
}

Projection project(const ParamPolyline& poly, Vec2 p) { return poly.project(p); }

CartesianPoint to_cartesian(const ParamPolyline& poly, FrenetPoint fp) { return poly.to_cartesian(fp); }

std::vector<double> curvature_profile(const ParamPolyline& poly) { return poly.curvature(); }

}  // namespace lanewrap
