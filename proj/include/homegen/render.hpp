#pragma once

// CPU depth rendering: per-pixel nearest ray-triangle intersection over a
// uniform grid acceleration structure. Depth is measured along the camera
// forward axis; 0 marks background.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "homegen/error.hpp"
#include "homegen/geometry.hpp"
#include "homegen/image.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {

namespace detail_render {

/// Watertight enough for rectilinear scenes: two-sided Moller-Trumbore.
/// Returns the ray parameter t or a negative value on miss.
inline double ray_triangle(const Vec3& orig, const Vec3& dir, const Vec3& a,
                           const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::fabs(det) < 1e-12) return -1.0;
  const double inv = 1.0 / det;
  const Vec3 s = orig - a;
  const double u = s.dot(p) * inv;
  if (u < -1e-9 || u > 1.0 + 1e-9) return -1.0;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * inv;
  if (v < -1e-9 || u + v > 1.0 + 1e-9) return -1.0;
  const double t = e2.dot(q) * inv;
  return t > 1e-9 ? t : -1.0;
}

/// Uniform grid over the mesh bounds; each cell lists the triangles whose
/// bounding box touches it. Traversal is 3D DDA with early exit.
class TriGrid {
 public:
  explicit TriGrid(const SceneMesh& mesh, double target_cell = 0.25)
      : mesh_(mesh) {
    if (mesh.faces.empty()) return;
    bounds_ = mesh.bounds();
    // Pad so boundary geometry is strictly inside.
    Vec3 pad{1e-6, 1e-6, 1e-6};
    bounds_.lo = bounds_.lo - pad;
    bounds_.hi = bounds_.hi + pad;
    Vec3 ext = bounds_.hi - bounds_.lo;
    for (int a = 0; a < 3; ++a) {
      double e = a == 0 ? ext.x : a == 1 ? ext.y : ext.z;
      dims_[a] = std::clamp(static_cast<int>(std::ceil(e / target_cell)), 1, 128);
    }
    cell_ = Vec3{ext.x / dims_[0], ext.y / dims_[1], ext.z / dims_[2]};
    cells_.resize(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2]);
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
      const auto& f = mesh.faces[fi];
      Aabb3 fb;
      fb.lo = fb.hi = mesh.vertices[f[0]];
      fb.expand(mesh.vertices[f[1]]);
      fb.expand(mesh.vertices[f[2]]);
      int lo[3], hi[3];
      to_cell(fb.lo, lo);
      to_cell(fb.hi, hi);
      for (int z = lo[2]; z <= hi[2]; ++z)
        for (int y = lo[1]; y <= hi[1]; ++y)
          for (int x = lo[0]; x <= hi[0]; ++x)
            cells_[index(x, y, z)].push_back(static_cast<int>(fi));
    }
  }

  bool empty() const { return cells_.empty(); }

  /// Nearest hit parameter along `dir` (unit not required), or -1.
  double trace(const Vec3& orig, const Vec3& dir) const {
    if (cells_.empty()) return -1.0;
    // Clip the ray to the grid bounds.
    double t0 = 0.0, t1 = std::numeric_limits<double>::max();
    const double o[3] = {orig.x, orig.y, orig.z};
    const double d[3] = {dir.x, dir.y, dir.z};
    const double blo[3] = {bounds_.lo.x, bounds_.lo.y, bounds_.lo.z};
    const double bhi[3] = {bounds_.hi.x, bounds_.hi.y, bounds_.hi.z};
    for (int a = 0; a < 3; ++a) {
      if (std::fabs(d[a]) < 1e-15) {
        if (o[a] < blo[a] || o[a] > bhi[a]) return -1.0;
        continue;
      }
      double ta = (blo[a] - o[a]) / d[a];
      double tb = (bhi[a] - o[a]) / d[a];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
    }
    if (t0 > t1) return -1.0;

    // DDA setup at the entry point.
    double enter = t0 + 1e-12;
    int c[3];
    {
      Vec3 p = orig + dir * enter;
      to_cell(p, c);
    }
    int step[3];
    double t_max[3], t_delta[3];
    const double cs[3] = {cell_.x, cell_.y, cell_.z};
    for (int a = 0; a < 3; ++a) {
      if (d[a] > 1e-15) {
        step[a] = 1;
        t_max[a] = (blo[a] + (c[a] + 1) * cs[a] - o[a]) / d[a];
        t_delta[a] = cs[a] / d[a];
      } else if (d[a] < -1e-15) {
        step[a] = -1;
        t_max[a] = (blo[a] + c[a] * cs[a] - o[a]) / d[a];
        t_delta[a] = -cs[a] / d[a];
      } else {
        step[a] = 0;
        t_max[a] = std::numeric_limits<double>::max();
        t_delta[a] = std::numeric_limits<double>::max();
      }
    }

    double best = std::numeric_limits<double>::max();
    while (true) {
      for (int fi : cells_[index(c[0], c[1], c[2])]) {
        const auto& f = mesh_.faces[fi];
        double t = ray_triangle(orig, dir, mesh_.vertices[f[0]],
                                mesh_.vertices[f[1]], mesh_.vertices[f[2]]);
        if (t > 0.0 && t < best) best = t;
      }
      double t_exit = std::min({t_max[0], t_max[1], t_max[2]});
      if (best <= t_exit) return best;  // hit inside the traversed volume
      int axis = t_max[0] <= t_max[1]
                     ? (t_max[0] <= t_max[2] ? 0 : 2)
                     : (t_max[1] <= t_max[2] ? 1 : 2);
      c[axis] += step[axis];
      if (c[axis] < 0 || c[axis] >= dims_[axis]) break;
      if (t_exit > t1) break;
      t_max[axis] += t_delta[axis];
    }
    return best < std::numeric_limits<double>::max() ? best : -1.0;
  }

 private:
  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * dims_[1] + y) * dims_[0] + x;
  }
  void to_cell(const Vec3& p, int out[3]) const {
    const double o[3] = {p.x - bounds_.lo.x, p.y - bounds_.lo.y,
                         p.z - bounds_.lo.z};
    const double cs[3] = {cell_.x, cell_.y, cell_.z};
    for (int a = 0; a < 3; ++a)
      out[a] = std::clamp(static_cast<int>(std::floor(o[a] / cs[a])), 0,
                          dims_[a] - 1);
  }

  const SceneMesh& mesh_;
  Aabb3 bounds_;
  int dims_[3] = {0, 0, 0};
  Vec3 cell_;
  std::vector<std::vector<int>> cells_;
};

}  // namespace detail_render

/// Renders a z-depth image: per pixel, the distance along the camera forward
/// axis to the nearest surface. Empty mesh gives an all-background image.
inline DepthImage render_depth(const SceneMesh& mesh, const CameraPose& pose) {
  DepthImage img;
  img.width = pose.intrinsics.width;
  img.height = pose.intrinsics.height;
  if (img.width <= 0 || img.height <= 0)
    throw ValidationError("non-positive image dimensions");
  img.depth.assign(static_cast<std::size_t>(img.width) * img.height, 0.0);
  if (mesh.empty()) return img;

  detail_render::TriGrid grid(mesh);
  const Vec3 fwd = pose.forward();
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      Vec3 dir = pose.pixel_ray(x + 0.5, y + 0.5);
      double t = grid.trace(pose.translation, dir);
      if (t > 0.0) img.at(x, y) = t * dir.dot(fwd);
    }
  }
  return img;
}

/// Same, reusing a prebuilt acceleration structure across poses.
inline DepthImage render_depth(const detail_render::TriGrid& grid,
                               const CameraPose& pose) {
  DepthImage img;
  img.width = pose.intrinsics.width;
  img.height = pose.intrinsics.height;
  if (img.width <= 0 || img.height <= 0)
    throw ValidationError("non-positive image dimensions");
  img.depth.assign(static_cast<std::size_t>(img.width) * img.height, 0.0);
  if (grid.empty()) return img;
  const Vec3 fwd = pose.forward();
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      Vec3 dir = pose.pixel_ray(x + 0.5, y + 0.5);
      double t = grid.trace(pose.translation, dir);
      if (t > 0.0) img.at(x, y) = t * dir.dot(fwd);
    }
  }
  return img;
}

/// Depth in meters to 16-bit millimeters (clamped); background stays 0.
inline Gray16Image depth_to_gray16(const DepthImage& d) {
  Gray16Image img;
  img.width = d.width;
  img.height = d.height;
  img.pixels.resize(static_cast<std::size_t>(d.width) * d.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    double mm = d.depth[i] * 1000.0;
    img.pixels[i] = static_cast<std::uint16_t>(
        std::clamp(std::lround(mm), 0L, 65535L));
  }
  return img;
}

}  // namespace homegen
