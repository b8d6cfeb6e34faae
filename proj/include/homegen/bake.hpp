#pragma once

// Iterative vertex-color baking: back-projects externally generated images
// onto the mesh, one image at a time, blending visible vertices by a running
// average weighted by view-incidence cosine.

#include <cmath>
#include <cstddef>
#include <vector>

#include "homegen/error.hpp"
#include "homegen/geometry.hpp"
#include "homegen/image.hpp"
#include "homegen/render.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {

// Visibility: vertex depth must match the rendered depth buffer within this.
inline constexpr double kBakeDepthTolerance = 0.02;

namespace detail_bake {

/// Area-weighted vertex normals; zero vector for vertices with no faces.
inline std::vector<Vec3> vertex_normals(const SceneMesh& mesh) {
  std::vector<Vec3> normals(mesh.vertices.size(), Vec3{0, 0, 0});
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    Vec3 n = (b - a).cross(c - a);  // magnitude = 2x area
    for (int k = 0; k < 3; ++k) normals[f[k]] = normals[f[k]] + n;
  }
  for (auto& n : normals) {
    double len = n.norm();
    if (len > 1e-12) n = n * (1.0 / len);
  }
  return normals;
}

}  // namespace detail_bake

/// One image at a time, in input order: render depth from the pose, then for
/// every vertex that projects in-frame with matching depth, blend the sampled
/// pixel into the vertex color. Unseen vertices keep their prior color.
inline SceneMesh bake_vertex_colors(const SceneMesh& mesh,
                                    const std::vector<RgbImage>& images,
                                    const std::vector<CameraPose>& poses) {
  if (images.size() != poses.size())
    throw ValidationError("bake: image/pose count mismatch");
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].width != poses[i].intrinsics.width ||
        images[i].height != poses[i].intrinsics.height)
      throw ValidationError("bake: image dimensions do not match intrinsics");
  }

  SceneMesh out = mesh;
  if (out.vertices.empty() || images.empty()) return out;

  const std::vector<Vec3> normals = detail_bake::vertex_normals(out);
  std::vector<double> weight_sum(out.vertices.size(), 0.0);
  detail_render::TriGrid grid(out);

  for (std::size_t i = 0; i < images.size(); ++i) {
    const CameraPose& pose = poses[i];
    const RgbImage& img = images[i];
    DepthImage depth = render_depth(grid, pose);

    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
      double px, py, d;
      if (!pose.project(out.vertices[v], px, py, d)) continue;
      if (px < 0.0 || py < 0.0 || px >= img.width || py >= img.height) continue;
      int ix = static_cast<int>(px);
      int iy = static_cast<int>(py);
      if (std::fabs(d - depth.at(ix, iy)) > kBakeDepthTolerance) continue;

      Vec3 to_cam = pose.translation - out.vertices[v];
      double len = to_cam.norm();
      double w = 1.0;
      if (normals[v].norm() > 0.5 && len > 1e-12)
        w = normals[v].dot(to_cam * (1.0 / len));
      if (w <= 0.0) continue;

      std::uint8_t r, g, b;
      img.at(ix, iy, r, g, b);
      Vec3 sample{r / 255.0, g / 255.0, b / 255.0};
      double total = weight_sum[v] + w;
      out.colors[v] = (out.colors[v] * weight_sum[v] + sample * w) * (1.0 / total);
      weight_sum[v] = total;
    }
  }
  return out;
}

}  // namespace homegen
