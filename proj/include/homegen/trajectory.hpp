#pragma once

// Egocentric camera path generation: wall-following control loops traversed
// twice (facing the interior, then the walls), Bezier interpolation via
// de Casteljau, extrinsics from curve tangents, plus object-centric and
// seeded random views.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "homegen/error.hpp"
#include "homegen/floorplan.hpp"
#include "homegen/geometry.hpp"
#include "homegen/layout.hpp"
#include "homegen/rng.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {

constexpr double kObjectDistanceFactor = 0.75;  // of the box diagonal

inline void validate_trajectory_config(const TrajectoryConfig& cfg,
                                       double wall_height) {
  if (!(cfg.camera_height > 0) || cfg.camera_height >= wall_height)
    throw ValidationError("camera height must lie strictly between the floor "
                          "and the wall height");
  if (!(cfg.wall_distance > 0))
    throw ValidationError("wall distance must be positive");
  if (cfg.inter_n < 1) throw ValidationError("inter_n must be at least 1");
  if (cfg.n_random < 0) throw ValidationError("n_random must be non-negative");
}

// ---------------------------------------------------------------------------
// Bezier interpolation

/// Bezier evaluation by repeated linear interpolation.
inline Vec3 decasteljau(const std::vector<Vec3>& points, double t) {
  if (points.size() < 2)
    throw ValidationError("decasteljau needs at least 2 points");
  if (!(t >= 0.0 && t <= 1.0))
    throw ValidationError("decasteljau parameter outside [0,1]");
  std::vector<Vec3> p = points;
  for (std::size_t level = p.size() - 1; level > 0; --level)
    for (std::size_t i = 0; i < level; ++i) p[i] = lerp(p[i], p[i + 1], t);
  return p[0];
}

/// Smooth polyline through the control points: overlapping quadratic Bezier
/// windows around each interior point (joined at edge midpoints), linear
/// half-pieces at the two ends. Emits exactly (n-1)*inter_n points, sampling
/// each control edge at s = k/inter_n for k in [0, inter_n); the final
/// control point is not included.
inline std::vector<Vec3> interpolate_curve(const std::vector<Vec3>& points,
                                           int inter_n) {
  if (points.size() < 2)
    throw ValidationError("interpolate_curve needs at least 2 points");
  if (inter_n < 1) throw ValidationError("inter_n must be at least 1");
  const std::size_t n = points.size();
  std::vector<Vec3> mid(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    mid[i] = lerp(points[i], points[i + 1], 0.5);

  std::vector<Vec3> out;
  out.reserve((n - 1) * static_cast<std::size_t>(inter_n));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (int k = 0; k < inter_n; ++k) {
      double s = static_cast<double>(k) / inter_n;
      if (s < 0.5) {
        if (i == 0) {
          out.push_back(lerp(points[0], mid[0], 2.0 * s));
        } else {
          out.push_back(
              decasteljau({mid[i - 1], points[i], mid[i]}, 0.5 + s));
        }
      } else {
        if (i + 2 == n) {
          out.push_back(lerp(mid[i], points[n - 1], 2.0 * (s - 0.5)));
        } else {
          out.push_back(
              decasteljau({mid[i], points[i + 1], mid[i + 1]}, s - 0.5));
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wall-following control loops

/// One closed wall-following loop for a room. Points run counter-clockwise
/// at camera height; the loop is emitted twice with opposite facing.
struct ControlLoop {
  std::string room_key;
  Facing facing = Facing::kInward;
  std::vector<Vec3> points;
  bool centerline_fallback = false;  // room too narrow for the full inset
};

namespace detail_traj {

/// L-infinity erosion of a room's cell set by `radius` cells.
inline std::vector<char> erode(const Floorplan& f, int room, int radius) {
  std::vector<char> in(static_cast<std::size_t>(f.width) * f.height, 0);
  auto at = [&](int x, int y) -> bool {
    if (x < 0 || y < 0 || x >= f.width || y >= f.height) return false;
    return f.at(x, y) == room;
  };
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x) {
      if (!at(x, y)) continue;
      bool ok = true;
      for (int dy = -radius; dy <= radius && ok; ++dy)
        for (int dx = -radius; dx <= radius && ok; ++dx)
          if (!at(x + dx, y + dy)) ok = false;
      if (ok) in[static_cast<std::size_t>(y) * f.width + x] = 1;
    }
  return in;
}

/// Keeps only the largest 4-connected component (ties: the one containing
/// the smallest row-major cell).
inline void largest_component(std::vector<char>& in, int W, int H) {
  std::vector<int> comp(in.size(), -1);
  int best_id = -1;
  long best_size = 0;
  int next = 0;
  for (std::size_t s = 0; s < in.size(); ++s) {
    if (!in[s] || comp[s] >= 0) continue;
    long size = 0;
    std::vector<std::size_t> stack{s};
    comp[s] = next;
    while (!stack.empty()) {
      std::size_t c = stack.back();
      stack.pop_back();
      ++size;
      int x = static_cast<int>(c % W), y = static_cast<int>(c / W);
      const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
        std::size_t nc = static_cast<std::size_t>(ny) * W + nx;
        if (in[nc] && comp[nc] < 0) {
          comp[nc] = next;
          stack.push_back(nc);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best_id = next;
    }
    ++next;
  }
  for (std::size_t s = 0; s < in.size(); ++s)
    if (in[s] && comp[s] != best_id) in[s] = 0;
}

/// Traces the outer boundary of a non-empty cell set counter-clockwise and
/// returns its corner vertices in cell units, starting from the smallest
/// corner.
inline std::vector<Vec2> trace_corners(const std::vector<char>& in, int W,
                                       int H) {
  auto inside = [&](int x, int y) -> bool {
    if (x < 0 || y < 0 || x >= W || y >= H) return false;
    return in[static_cast<std::size_t>(y) * W + x] != 0;
  };
  int sx = -1, sy = -1;
  for (int y = 0; y < H && sx < 0; ++y)
    for (int x = 0; x < W && sx < 0; ++x)
      if (inside(x, y)) {
        sx = x;
        sy = y;
      }
  if (sx < 0) return {};

  // Walk lattice edges keeping the interior on the left (CCW). Directions:
  // 0=+x, 1=+y, 2=-x, 3=-y. Edge legality per direction checks the cell
  // pair straddling the edge.
  auto edge_ok = [&](int x, int y, int d) -> bool {
    switch (d) {
      case 0: return inside(x, y) && !inside(x, y - 1);
      case 1: return inside(x - 1, y) && !inside(x, y);
      case 2: return inside(x - 1, y - 1) && !inside(x - 1, y);
      case 3: return inside(x, y - 1) && !inside(x - 1, y - 1);
    }
    return false;
  };
  const int step_x[4] = {1, 0, -1, 0}, step_y[4] = {0, 1, 0, -1};

  std::vector<std::pair<int, int>> verts;
  int x = sx, y = sy, d = 0;  // bottom-left corner of the first cell, going +x
  int x0 = x, y0 = y, d0 = d;
  int guard = 4 * (W + 2) * (H + 2);
  do {
    verts.emplace_back(x, y);
    x += step_x[d];
    y += step_y[d];
    // Prefer the left turn, then straight, then right, then reverse.
    int nd = -1;
    for (int turn : {1, 0, 3, 2}) {
      int cand = (d + turn) % 4;
      if (edge_ok(x, y, cand)) {
        nd = cand;
        break;
      }
    }
    if (nd < 0) break;
    d = nd;
  } while ((x != x0 || y != y0 || d != d0) && --guard > 0);

  // Drop collinear vertices, keep corners only.
  std::vector<Vec2> corners;
  const std::size_t n = verts.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto [px, py] = verts[(i + n - 1) % n];
    auto [cx, cy] = verts[i];
    auto [nx, ny] = verts[(i + 1) % n];
    if ((cx - px) * (ny - cy) - (cy - py) * (nx - cx) != 0)
      corners.push_back(Vec2{static_cast<double>(cx), static_cast<double>(cy)});
  }
  if (corners.empty()) return corners;
  std::size_t start = 0;
  for (std::size_t i = 1; i < corners.size(); ++i) {
    if (corners[i].x < corners[start].x ||
        (corners[i].x == corners[start].x && corners[i].y < corners[start].y))
      start = i;
  }
  std::rotate(corners.begin(), corners.begin() + start, corners.end());
  return corners;
}

/// Camera-to-world rotation looking along horizontal angle `phi` (from +y,
/// clockwise toward +x) with pitch `omega`, roll 0. Columns are the camera
/// axes in world coordinates: x right, y down, z forward.
inline Mat3 look_rotation(double phi, double omega) {
  Vec3 f{std::cos(omega) * std::sin(phi), std::cos(omega) * std::cos(phi),
         std::sin(omega)};
  Vec3 r{std::cos(phi), -std::sin(phi), 0.0};
  Vec3 d = f.cross(r);
  return Mat3::from_columns(r, d, f);
}

}  // namespace detail_traj

/// Per-room inset loops at camera height, each emitted twice: first facing
/// the interior, then facing the walls. Rooms too narrow for the full inset
/// fall back to the deepest non-empty erosion and are flagged.
inline std::vector<ControlLoop> wall_control_points(const Floorplan& f,
                                                    const TrajectoryConfig& cfg) {
  std::vector<ControlLoop> out;
  int want = static_cast<int>(std::lround(cfg.wall_distance / f.cell_size));
  for (std::size_t room = 0; room < f.rooms.size(); ++room) {
    int radius = want;
    std::vector<char> in;
    bool fallback = false;
    for (;; --radius) {
      in = detail_traj::erode(f, static_cast<int>(room), radius);
      if (std::count(in.begin(), in.end(), 1) > 0) break;
      fallback = true;
      if (radius <= 0) break;
    }
    fallback = fallback || radius < want;
    detail_traj::largest_component(in, f.width, f.height);
    auto corners = detail_traj::trace_corners(in, f.width, f.height);
    if (corners.empty()) continue;

    ControlLoop loop;
    loop.room_key = f.rooms[room].key();
    loop.centerline_fallback = fallback;
    for (const Vec2& c : corners)
      loop.points.push_back(
          Vec3{c.x * f.cell_size, c.y * f.cell_size, cfg.camera_height});
    loop.facing = Facing::kInward;
    out.push_back(loop);
    loop.facing = Facing::kOutward;
    out.push_back(std::move(loop));
  }
  return out;
}

/// One pose per curve segment: position at the segment midpoint, yaw
/// perpendicular to the direction of travel with the branch picked by the
/// facing tag against the interior reference point, pitch from config.
inline std::vector<CameraPose> extrinsics_from_curve(
    const std::vector<Vec3>& curve, Facing facing, const Vec2& interior,
    const TrajectoryConfig& cfg, std::vector<std::string>* warnings = nullptr) {
  if (curve.size() < 2)
    throw ValidationError("extrinsics need a curve of at least 2 points");
  std::vector<CameraPose> out;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    Vec3 transpose = curve[i + 1] - curve[i];
    Vec2 txy = transpose.xy();
    if (txy.norm() < 1e-12) {
      if (warnings)
        warnings->push_back("zero-length segment " + std::to_string(i) +
                            " skipped");
      continue;
    }
    Vec3 T = curve[i] + transpose * 0.5;
    double phi_travel = std::atan2(txy.x, txy.y);
    double phi = phi_travel + kPi / 2;
    Vec2 fwd{std::sin(phi), std::cos(phi)};
    double toward = fwd.dot(interior - T.xy());
    bool want_interior = facing == Facing::kInward;
    if ((toward < 0.0) == want_interior) phi = phi_travel - kPi / 2;

    CameraPose pose;
    pose.rotation = detail_traj::look_rotation(phi, cfg.pitch);
    pose.translation = T;
    pose.intrinsics = cfg.intrinsics;
    pose.facing = facing;
    out.push_back(pose);
  }
  return out;
}

/// One pose per group anchor (boxes placed without an anchor of their own):
/// positioned off the box front at a distance proportional to its diagonal,
/// aimed at the box center, pulled back toward the box until inside the room.
inline std::vector<CameraPose> object_centric_poses(
    const std::vector<PlacedBox>& boxes, const Floorplan& f, const RoomId& room,
    const TrajectoryConfig& cfg) {
  std::vector<CameraPose> out;
  if (boxes.empty()) return out;
  int room_index = f.room_index(room.key());
  if (room_index < 0)
    throw ValidationError("room '" + room.key() + "' not in floorplan");
  auto in_room = [&](const Vec2& p) {
    int cx = static_cast<int>(std::floor(p.x / f.cell_size));
    int cy = static_cast<int>(std::floor(p.y / f.cell_size));
    if (cx < 0 || cy < 0 || cx >= f.width || cy >= f.height) return false;
    return f.at(cx, cy) == room_index;
  };

  for (const auto& b : boxes) {
    if (!b.anchor_label.empty()) continue;
    if (b.rule_used == PlacementRule::kCeiling) continue;
    double diag = (b.half_extents * 2.0).norm();
    double dist = std::max(kObjectDistanceFactor * diag,
                           b.half_extents.y + 0.3);
    Vec2 front = b.front();
    Vec2 pos = b.center.xy() + front * dist;
    // Pull back toward the box until the position lands inside the room.
    double step = f.cell_size;
    while (dist > step && !in_room(pos)) {
      dist -= step;
      pos = b.center.xy() + front * dist;
    }
    if (!in_room(pos)) continue;

    Vec3 eye{pos.x, pos.y, cfg.camera_height};
    Vec3 fdir = (b.center - eye).normalized();
    double hxy = fdir.xy().norm();
    double phi = hxy < 1e-9 ? b.yaw : std::atan2(fdir.x, fdir.y);
    double omega = std::asin(std::clamp(fdir.z, -1.0, 1.0));

    CameraPose pose;
    pose.rotation = detail_traj::look_rotation(phi, omega);
    pose.translation = eye;
    pose.intrinsics = cfg.intrinsics;
    pose.facing = Facing::kObject;
    out.push_back(pose);
  }
  return out;
}

/// Seeded uniform poses over interior cells with random yaw and the
/// configured pitch.
inline std::vector<CameraPose> random_poses(const Floorplan& f,
                                            const TrajectoryConfig& cfg) {
  std::vector<std::pair<int, int>> cells;
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x)
      if (f.at(x, y) >= 0) cells.emplace_back(x, y);
  std::vector<CameraPose> out;
  if (cells.empty()) return out;
  Rng rng(cfg.seed);
  for (int i = 0; i < cfg.n_random; ++i) {
    const auto& [cx, cy] = cells[rng.next_below(cells.size())];
    double phi = rng.next_double() * kTwoPi;
    CameraPose pose;
    pose.rotation = detail_traj::look_rotation(phi, cfg.pitch);
    pose.translation = Vec3{(cx + 0.5) * f.cell_size, (cy + 0.5) * f.cell_size,
                            cfg.camera_height};
    pose.intrinsics = cfg.intrinsics;
    pose.facing = Facing::kRandom;
    out.push_back(pose);
  }
  return out;
}

/// Full house trajectory: per room, the closed wall-following loop traversed
/// twice (interior-facing then wall-facing), then object-centric views, then
/// the seeded random poses.
inline std::vector<CameraPose> build_trajectory(
    const Floorplan& f,
    const std::map<std::string, std::vector<PlacedBox>>& boxes_by_room,
    const TrajectoryConfig& cfg, std::vector<std::string>* warnings = nullptr) {
  std::vector<CameraPose> out;
  auto loops = wall_control_points(f, cfg);
  for (const auto& loop : loops) {
    if (loop.centerline_fallback && warnings)
      warnings->push_back("room " + loop.room_key +
                          ": narrow room, centerline fallback");
    std::vector<Vec3> closed = loop.points;
    closed.push_back(loop.points.front());
    if (closed.size() < 2) continue;
    Vec2 interior = f.room_centroid(f.room_index(loop.room_key));
    auto curve = interpolate_curve(closed, cfg.inter_n);
    curve.push_back(closed.back());  // close the traversal
    auto poses = extrinsics_from_curve(curve, loop.facing, interior, cfg,
                                       warnings);
    out.insert(out.end(), poses.begin(), poses.end());
  }
  for (std::size_t i = 0; i < f.rooms.size(); ++i) {
    auto it = boxes_by_room.find(f.rooms[i].key());
    if (it == boxes_by_room.end()) continue;
    auto poses = object_centric_poses(it->second, f, f.rooms[i], cfg);
    out.insert(out.end(), poses.begin(), poses.end());
  }
  auto rnd = random_poses(f, cfg);
  out.insert(out.end(), rnd.begin(), rnd.end());
  return out;
}

}  // namespace homegen
