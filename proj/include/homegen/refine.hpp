#pragma once

// Deterministic layout refinement: separates interpenetrating boxes, clamps
// boxes back inside the room, snaps bottoms onto their support surface and
// re-aims anchor-facing items. Also computes the out-of-bounds rate used for
// evaluation.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homegen/floorplan.hpp"
#include "homegen/geometry.hpp"
#include "homegen/layout.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {

struct RefineConfig {
  double max_displacement = 1.0;   // meters, per-box cap on center movement
  int max_iterations = 50;         // fixed-point sweep budget
  double angular_tol_deg = 5.0;    // orientation post-condition tolerance
  double separation_margin = 1e-6; // meters added past the minimal translation
};

namespace detail_refine {

inline bool z_overlaps(const PlacedBox& a, const PlacedBox& b) {
  double lo = std::max(a.z_bottom(), b.z_bottom());
  double hi = std::min(a.z_top(), b.z_top());
  return hi - lo > 1e-9;
}

/// Support height for a box bottom: its anchor's top for stacked items,
/// the floor otherwise. Ceiling items have no support surface.
inline std::optional<double> support_z(
    const PlacedBox& b, const std::map<std::string, std::size_t>& index,
    const std::vector<PlacedBox>& boxes) {
  if (b.rule_used == PlacementRule::kCeiling) return std::nullopt;
  if (b.rule_used == PlacementRule::kTop) {
    auto it = index.find(b.anchor_label);
    if (it == index.end()) return 0.0;
    return boxes[it->second].z_top();
  }
  return 0.0;
}

/// Target yaw for anchor-facing boxes; nullopt when the rule does not point
/// the item at its anchor or the centers coincide.
inline std::optional<double> facing_yaw(
    const PlacedBox& b, const std::map<std::string, std::size_t>& index,
    const std::vector<PlacedBox>& boxes) {
  if (b.rule_used != PlacementRule::kAround &&
      b.rule_used != PlacementRule::kFront)
    return std::nullopt;
  auto it = index.find(b.anchor_label);
  if (it == index.end()) return std::nullopt;
  Vec2 to = boxes[it->second].center.xy() - b.center.xy();
  if (to.norm() < 1e-9) return std::nullopt;
  Vec2 d = to.normalized();
  return wrap_angle(std::atan2(-d.x, d.y));
}

/// Offsets in cell units ordered by distance, used to pull a box back into
/// the room along the shortest translation.
inline std::vector<std::pair<int, int>> sorted_offsets(int radius) {
  std::vector<std::pair<int, int>> out;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) out.emplace_back(dx, dy);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    long da = static_cast<long>(a.first) * a.first +
              static_cast<long>(a.second) * a.second;
    long db = static_cast<long>(b.first) * b.first +
              static_cast<long>(b.second) * b.second;
    if (da != db) return da < db;
    return a < b;
  });
  return out;
}

}  // namespace detail_refine

/// Fraction of boxes that intersect another box at the same support level,
/// cross a wall, or extend outside the room mask. Each box counts once.
inline double oob_rate(const std::vector<PlacedBox>& boxes, const Floorplan& f,
                       const RoomId& room) {
  if (boxes.empty()) return 0.0;
  int room_index = f.room_index(room.key());
  if (room_index < 0)
    throw ValidationError("room '" + room.key() + "' not in floorplan");
  OccupancyMask mask = OccupancyMask::from_floorplan(f, room_index);

  std::vector<char> bad(boxes.size(), 0);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!mask.fits(boxes[i].footprint(), false)) bad[i] = 1;
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      if (!detail_refine::z_overlaps(boxes[i], boxes[j])) continue;
      if (obb_intersect(boxes[i].footprint(), boxes[j].footprint()))
        bad[i] = bad[j] = 1;
    }
  }
  long n = std::count(bad.begin(), bad.end(), 1);
  return static_cast<double>(n) / static_cast<double>(boxes.size());
}

/// Enforces the three refinement post-conditions. All-or-nothing: either the
/// sweep loop converges to a clean layout with every box within the
/// displacement cap (deltas reported, unresolved empty), or the input is
/// returned unchanged with the violating boxes listed. Both branches are
/// idempotent and never increase the out-of-bounds rate.
inline std::pair<std::vector<PlacedBox>, RefineReport> refine_layout(
    const std::vector<PlacedBox>& boxes, const Floorplan& f, const RoomId& room,
    const RefineConfig& config = {}) {
  using namespace detail_refine;
  RefineReport report;
  if (boxes.empty()) return {boxes, report};

  int room_index = f.room_index(room.key());
  if (room_index < 0)
    throw ValidationError("room '" + room.key() + "' not in floorplan");
  OccupancyMask mask = OccupancyMask::from_floorplan(f, room_index);

  report.oob_before = oob_rate(boxes, f, room);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < boxes.size(); ++i) index[boxes[i].label] = i;

  const double tol = deg_to_rad(config.angular_tol_deg);
  auto offsets = sorted_offsets(std::max(mask.width, mask.height));

  // Boxes violating any post-condition at their current pose.
  auto violators = [&](const std::vector<PlacedBox>& bs) {
    std::vector<char> bad(bs.size(), 0);
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const PlacedBox& b = bs[i];
      if (b.rule_used != PlacementRule::kCeiling &&
          !mask.fits(b.footprint(), false))
        bad[i] = 1;
      auto sz = support_z(b, index, bs);
      if (sz && std::fabs(b.z_bottom() - *sz) > 1e-9) bad[i] = 1;
      auto fy = facing_yaw(b, index, bs);
      if (fy && angle_distance(b.yaw, *fy) > tol + 1e-9) bad[i] = 1;
      for (std::size_t j = i + 1; j < bs.size(); ++j) {
        if (!z_overlaps(bs[i], bs[j])) continue;
        if (obb_intersect(bs[i].footprint(), bs[j].footprint()))
          bad[i] = bad[j] = 1;
      }
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < bs.size(); ++i)
      if (bad[i]) out.push_back(bs[i].label);
    return out;
  };

  auto give_up = [&]() {
    RefineReport r;
    r.oob_before = report.oob_before;
    r.oob_after = report.oob_before;
    r.unresolved = violators(boxes);
    for (const auto& b : boxes)
      r.adjustments.push_back(BoxAdjustment{b.label, Vec3{}, 0.0, 0.0});
    r.iterations = config.max_iterations;
    return std::make_pair(boxes, r);
  };

  std::vector<PlacedBox> cur = boxes;
  bool converged = false;
  int iters = 0;
  for (; iters < config.max_iterations; ++iters) {
    bool changed = false;

    // Surface adherence: bottoms onto floor or anchor top, in placement
    // order so anchors settle before the items standing on them.
    for (auto& b : cur) {
      auto sz = support_z(b, index, cur);
      if (!sz) continue;
      double dz = *sz - b.z_bottom();
      if (std::fabs(dz) > 1e-12) {
        b.center.z += dz;
        changed = true;
      }
    }

    // Penetration: separate intersecting pairs, deepest first, moving the
    // later-placed box along the minimal translation axis.
    struct Pair {
      std::size_t i, j;
      double depth;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t j = i + 1; j < cur.size(); ++j) {
        if (!z_overlaps(cur[i], cur[j])) continue;
        if (!obb_intersect(cur[i].footprint(), cur[j].footprint())) continue;
        pairs.push_back({i, j, obb_mtv(cur[i].footprint(), cur[j].footprint()).norm()});
      }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      if (a.depth != b.depth) return a.depth > b.depth;
      if (a.i != b.i) return a.i < b.i;
      return a.j < b.j;
    });
    for (const auto& p : pairs) {
      if (!z_overlaps(cur[p.i], cur[p.j])) continue;
      if (!obb_intersect(cur[p.i].footprint(), cur[p.j].footprint())) continue;
      Vec2 mtv = obb_mtv(cur[p.i].footprint(), cur[p.j].footprint());
      double n = mtv.norm();
      if (n < 1e-12) {
        mtv = Vec2{1e-3, 0};  // coincident centers: push along +x
        n = 1e-3;
      }
      Vec2 push = mtv * ((n + config.separation_margin) / n);
      cur[p.j].center.x += push.x;
      cur[p.j].center.y += push.y;
      changed = true;
    }

    // Containment: pull out-of-room boxes back inside along the shortest
    // grid-aligned translation.
    for (auto& b : cur) {
      if (b.rule_used == PlacementRule::kCeiling) continue;
      Obb2 fp = b.footprint();
      if (mask.fits(fp, false)) continue;
      for (const auto& [dx, dy] : offsets) {
        Obb2 moved = fp;
        moved.center.x += dx * mask.cell;
        moved.center.y += dy * mask.cell;
        if (mask.fits(moved, false)) {
          b.center.x = moved.center.x;
          b.center.y = moved.center.y;
          changed = true;
          break;
        }
      }
    }

    // Orientation: anchor-facing items point exactly at the anchor center.
    for (auto& b : cur) {
      auto fy = facing_yaw(b, index, cur);
      if (!fy) continue;
      if (angle_distance(b.yaw, *fy) > 1e-12) {
        b.yaw = *fy;
        changed = true;
      }
    }

    if (!changed) {
      converged = true;
      break;
    }
  }

  if (!converged) return give_up();
  if (!violators(cur).empty()) return give_up();
  for (std::size_t i = 0; i < cur.size(); ++i) {
    Vec3 d = cur[i].center - boxes[i].center;
    if (d.norm() > config.max_displacement) return give_up();
  }

  for (std::size_t i = 0; i < cur.size(); ++i) {
    BoxAdjustment adj;
    adj.label = cur[i].label;
    adj.translation = cur[i].center - boxes[i].center;
    double dyaw = wrap_angle(cur[i].yaw - boxes[i].yaw);
    adj.yaw_delta = dyaw > kPi ? dyaw - kTwoPi : dyaw;
    adj.z_snap = adj.translation.z;
    report.adjustments.push_back(adj);
  }
  report.oob_after = oob_rate(cur, f, room);
  report.iterations = iters;
  return {std::move(cur), std::move(report)};
}

}  // namespace homegen
