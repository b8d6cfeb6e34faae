#pragma once

// Rule-based furniture placement: semantic asset groups, the eight placement
// functions, and the sequential place-and-update-mask loop. Placement is
// fully deterministic; scan orders and tie-breaks are fixed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "homegen/error.hpp"
#include "homegen/floorplan.hpp"
#include "homegen/geometry.hpp"
#include "homegen/rng.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {

constexpr double kBufferFront = 0.8;     // meters, place_front standoff
constexpr double kPlacementGap = 0.02;   // meters, breathing room between boxes

/// Fallback height for nodes no asset has been fitted to yet.
inline double effective_height(const FurnitureNode& n) {
  if (n.height > 0) return n.height;
  return std::clamp(0.6 * std::sqrt(n.length * n.width), 0.15, 2.2);
}

// ---------------------------------------------------------------------------
// Semantic asset groups

struct SemanticAssetGroup {
  std::string anchor;
  std::vector<std::string> members;  // placement order, anchor excluded
};

/// Partitions the nodes into connected components of the anchor relation.
/// Each group's root is the node whose edge carries an empty anchor; when a
/// component accidentally holds several roots, the largest footprint wins
/// and the rest are treated as its direct members. Groups are ordered by
/// anchor name; members breadth-first, name-sorted per level.
inline std::vector<SemanticAssetGroup> identify_sags(const LayoutGraph& g) {
  ValidationReport rep = validate_layout_graph(g);
  if (!rep.pass())
    throw ValidationError("layout graph invalid: " + rep.joined());

  // Union-find over child-anchor pairs.
  std::map<std::string, std::string> up;
  for (const auto& n : g.nodes) up[n.name] = n.name;
  std::function<std::string(const std::string&)> find =
      [&](const std::string& x) -> std::string {
    std::string r = x;
    while (up[r] != r) r = up[r];
    std::string c = x;
    while (up[c] != r) {
      std::string nxt = up[c];
      up[c] = r;
      c = nxt;
    }
    return r;
  };
  for (const auto& e : g.edges) {
    if (e.anchor.empty()) continue;
    if (!g.find_node(e.anchor))
      throw ValidationError("dangling anchor '" + e.anchor + "'");
    up[find(e.child)] = find(e.anchor);
  }

  // Component roots: empty-anchor (or edge-less) nodes.
  std::map<std::string, std::vector<std::string>> roots_by_comp;
  for (const auto& n : g.nodes) {
    const LayoutEdge* e = g.edge_for(n.name);
    if (!e || e->anchor.empty()) roots_by_comp[find(n.name)].push_back(n.name);
  }

  std::map<std::string, std::string> comp_anchor;
  std::map<std::string, std::string> reparented;  // extra root -> winner
  for (auto& [comp, roots] : roots_by_comp) {
    std::sort(roots.begin(), roots.end());
    std::string winner = roots[0];
    double best = -1;
    for (const auto& r : roots) {
      const FurnitureNode* n = g.find_node(r);
      double fp = n->length * n->width;
      if (fp > best) {
        best = fp;
        winner = r;
      }
    }
    comp_anchor[comp] = winner;
    for (const auto& r : roots)
      if (r != winner) reparented[r] = winner;
  }
  for (const auto& n : g.nodes) {
    if (!comp_anchor.count(find(n.name)))
      throw ValidationError("node '" + n.name +
                            "' has a non-empty anchor outside its component");
  }

  // Children lists for breadth-first member order.
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& e : g.edges) {
    if (e.anchor.empty()) continue;
    children[e.anchor].push_back(e.child);
  }
  for (auto& [extra, winner] : reparented) children[winner].push_back(extra);
  for (auto& [_, c] : children) std::sort(c.begin(), c.end());

  std::vector<SemanticAssetGroup> out;
  for (const auto& [comp, anchor] : comp_anchor) {
    (void)comp;
    SemanticAssetGroup sag;
    sag.anchor = anchor;
    std::vector<std::string> frontier{anchor};
    while (!frontier.empty()) {
      std::vector<std::string> next;
      for (const auto& p : frontier) {
        for (const auto& c : children[p]) {
          sag.members.push_back(c);
          next.push_back(c);
        }
      }
      frontier = std::move(next);
    }
    out.push_back(std::move(sag));
  }
  std::sort(out.begin(), out.end(),
            [](const SemanticAssetGroup& a, const SemanticAssetGroup& b) {
              return a.anchor < b.anchor;
            });
  return out;
}

// ---------------------------------------------------------------------------
// Occupancy mask

/// Footprint plus vertical span of a committed placement.
struct PlacedVolume {
  Obb2 footprint;
  double z0 = 0.0, z1 = 0.0;
};

/// Per-room occupancy over the floorplan grid, plus exact placed volumes and
/// the top-surface registry the top rule consults. Grid occupancy only
/// tracks floor-standing items; a vase on a table never blocks a chair.
struct OccupancyMask {
  int width = 0, height = 0;
  double cell = 0.1;
  std::vector<char> room;      // 1 = cell belongs to the room mask
  std::vector<char> occupied;  // 1 = floor cell consumed by a placement
  std::vector<PlacedVolume> placed;
  std::map<std::string, std::vector<Obb2>> top_used;  // anchor label -> local rects

  static OccupancyMask from_floorplan(const Floorplan& f, int room_index) {
    OccupancyMask m;
    m.width = f.width;
    m.height = f.height;
    m.cell = f.cell_size;
    m.room.assign(static_cast<std::size_t>(f.width) * f.height, 0);
    m.occupied.assign(m.room.size(), 0);
    for (int y = 0; y < f.height; ++y)
      for (int x = 0; x < f.width; ++x)
        if (f.at(x, y) == room_index)
          m.room[static_cast<std::size_t>(y) * f.width + x] = 1;
    return m;
  }

  bool in_room(int cx, int cy) const {
    if (cx < 0 || cy < 0 || cx >= width || cy >= height) return false;
    return room[static_cast<std::size_t>(cy) * width + cx] != 0;
  }
  bool is_occupied(int cx, int cy) const {
    return occupied[static_cast<std::size_t>(cy) * width + cx] != 0;
  }

  /// Visits every cell whose center lies inside the footprint.
  template <typename Fn>
  void for_covered_cells(const Obb2& fp, Fn&& fn) const {
    Vec2 lo, hi;
    fp.bounds(lo, hi);
    int x0 = std::max(0, static_cast<int>(std::floor(lo.x / cell)));
    int y0 = std::max(0, static_cast<int>(std::floor(lo.y / cell)));
    int x1 = std::min(width - 1, static_cast<int>(std::floor(hi.x / cell)));
    int y1 = std::min(height - 1, static_cast<int>(std::floor(hi.y / cell)));
    for (int cy = y0; cy <= y1; ++cy) {
      for (int cx = x0; cx <= x1; ++cx) {
        Vec2 c{(cx + 0.5) * cell, (cy + 0.5) * cell};
        if (fp.contains(c)) fn(cx, cy);
      }
    }
  }

  /// True when the footprint stays inside the room mask. `check_occupied`
  /// additionally requires every covered cell to be free.
  bool fits(const Obb2& fp, bool check_occupied = true) const {
    Vec2 lo, hi;
    fp.bounds(lo, hi);
    if (lo.x < -1e-9 || lo.y < -1e-9 || hi.x > width * cell + 1e-9 ||
        hi.y > height * cell + 1e-9)
      return false;
    bool ok = true;
    for_covered_cells(fp, [&](int cx, int cy) {
      if (!in_room(cx, cy)) ok = false;
      else if (check_occupied && is_occupied(cx, cy)) ok = false;
    });
    return ok;
  }

  void mark(const Obb2& fp) {
    for_covered_cells(fp, [&](int cx, int cy) {
      if (in_room(cx, cy))
        occupied[static_cast<std::size_t>(cy) * width + cx] = 1;
    });
  }

  /// Exact test: would a box with this footprint and vertical span intersect
  /// any committed volume? Touching surfaces (vase bottom on table top) do
  /// not count as intersection.
  bool collides(const Obb2& fp, double z0, double z1) const {
    for (const auto& p : placed) {
      if (std::min(z1, p.z1) - std::max(z0, p.z0) <= 1e-9) continue;
      if (obb_intersect(fp, p.footprint)) return true;
    }
    return false;
  }

  void commit(const Obb2& fp, double z0, double z1) {
    placed.push_back(PlacedVolume{fp, z0, z1});
  }

  /// Largest axis-aligned rectangle of free in-room cells, in meters.
  /// Returns a zero-area rectangle when the room is full.
  RectF largest_free_rect(bool ignore_occupied = false) const {
    std::vector<int> h(width, 0);
    long best_area = 0;
    RectF best{};
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        bool free = in_room(x, y) && (ignore_occupied || !is_occupied(x, y));
        h[x] = free ? h[x] + 1 : 0;
      }
      for (int xs = 0; xs < width; ++xs) {
        int minh = h[xs];
        for (int xe = xs; xe < width && minh > 0; ++xe) {
          minh = std::min(minh, h[xe]);
          long area = static_cast<long>(xe - xs + 1) * minh;
          if (area > best_area) {
            best_area = area;
            best = RectF{xs * cell, (y - minh + 1) * cell, (xe + 1) * cell,
                         (y + 1) * cell};
          }
        }
      }
    }
    return best;
  }
};

// ---------------------------------------------------------------------------
// Rule application

namespace detail_layout {

/// Convex corners of the room mask with their inward diagonal, ordered
/// counter-clockwise around the centroid starting nearest the minimum
/// corner. dir components are +1/-1: interior lies at corner + dir.
struct RoomCorner {
  Vec2 point;
  Vec2 dir;
};

inline std::vector<RoomCorner> room_corners(const OccupancyMask& m) {
  std::vector<RoomCorner> out;
  double sx = 0, sy = 0;
  long n = 0;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.in_room(x, y)) {
        sx += (x + 0.5) * m.cell;
        sy += (y + 0.5) * m.cell;
        ++n;
      }
  if (n == 0) return out;
  Vec2 centroid{sx / static_cast<double>(n), sy / static_cast<double>(n)};

  for (int y = 0; y <= m.height; ++y) {
    for (int x = 0; x <= m.width; ++x) {
      bool a = m.in_room(x - 1, y - 1);  // -x,-y quadrant
      bool b = m.in_room(x, y - 1);      // +x,-y
      bool c = m.in_room(x - 1, y);      // -x,+y
      bool d = m.in_room(x, y);          // +x,+y
      int count = int(a) + int(b) + int(c) + int(d);
      if (count != 1) continue;  // convex corner has exactly one inside cell
      Vec2 dir = a   ? Vec2{-1, -1}
                 : b ? Vec2{1, -1}
                 : c ? Vec2{-1, 1}
                     : Vec2{1, 1};
      out.push_back(RoomCorner{{x * m.cell, y * m.cell}, dir});
    }
  }
  if (out.empty()) return out;
  // Start at the corner closest to the mask minimum, then CCW by angle.
  Vec2 origin = out[0].point;
  for (const auto& c : out) {
    if (c.point.x + c.point.y < origin.x + origin.y ||
        (c.point.x + c.point.y == origin.x + origin.y && c.point.x < origin.x))
      origin = c.point;
  }
  double a0 = std::atan2(origin.y - centroid.y, origin.x - centroid.x);
  std::sort(out.begin(), out.end(), [&](const RoomCorner& l, const RoomCorner& r) {
    double al = wrap_angle(std::atan2(l.point.y - centroid.y,
                                      l.point.x - centroid.x) - a0);
    double ar = wrap_angle(std::atan2(r.point.y - centroid.y,
                                      r.point.x - centroid.x) - a0);
    if (al != ar) return al < ar;
    if (l.point.x != r.point.x) return l.point.x < r.point.x;
    return l.point.y < r.point.y;
  });
  return out;
}

/// Yaw whose front (+y local) equals the given cardinal direction.
inline double yaw_facing_cardinal(const Vec2& dir) {
  // front = (-sin yaw, cos yaw)
  return wrap_angle(std::atan2(-dir.x, dir.y));
}

/// Yaw whose front points from `from` toward `to` (continuous).
inline double yaw_facing_point(const Vec2& from, const Vec2& to) {
  Vec2 d = (to - from).normalized();
  return wrap_angle(std::atan2(-d.x, d.y));
}

/// Cardinal quantization of an arbitrary direction.
inline Vec2 quantize_cardinal(const Vec2& d) {
  if (std::fabs(d.x) >= std::fabs(d.y)) return {d.x >= 0 ? 1.0 : -1.0, 0.0};
  return {0.0, d.y >= 0 ? 1.0 : -1.0};
}

inline Vec2 room_centroid(const OccupancyMask& m) {
  double sx = 0, sy = 0;
  long n = 0;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.in_room(x, y)) {
        sx += (x + 0.5) * m.cell;
        sy += (y + 0.5) * m.cell;
        ++n;
      }
  return n ? Vec2{sx / static_cast<double>(n), sy / static_cast<double>(n)}
           : Vec2{};
}

/// Wall runs bounding this room, longest first.
inline std::vector<WallSegment> room_walls(const Floorplan& f, int room) {
  std::vector<WallSegment> out;
  for (const auto& w : f.wall_segments) {
    if (w.room_a == room) {
      out.push_back(w);
    } else if (w.room_b == room) {
      WallSegment v = w;
      std::swap(v.room_a, v.room_b);
      v.a_low_side = !v.a_low_side;
      out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end(), [](const WallSegment& a, const WallSegment& b) {
    if (a.length() != b.length()) return a.length() > b.length();
    if (a.vertical != b.vertical) return a.vertical < b.vertical;
    if (a.fixed != b.fixed) return a.fixed < b.fixed;
    return a.lo < b.lo;
  });
  return out;
}

}  // namespace detail_layout

/// Everything apply_rule needs about the room besides the occupancy mask.
struct RoomGeometry {
  const Floorplan* floorplan = nullptr;
  int room_index = -1;
  std::vector<RectF> rects;  // rectangle decomposition, largest first
  Vec2 centroid;

  static RoomGeometry of(const Floorplan& f, int room_index) {
    RoomGeometry g;
    g.floorplan = &f;
    g.room_index = room_index;
    g.rects = rectangles_of_room(f, room_index);
    g.centroid = f.room_centroid(room_index);
    return g;
  }
};

/// Applies one placement function. Throws InfeasibleError ("no available
/// corner|wall|center area|besides position|around position|front
/// position|ceiling area|top area") when no pose fits. Footprints larger
/// than the room's largest free span are scaled down to 90% of it first and
/// the box flagged; scaling never upsizes.
inline PlacedBox apply_rule(PlacementRule rule, OccupancyMask& mask,
                            const FurnitureNode& node, const PlacedBox* anchor,
                            const RoomGeometry& geo, double wall_h, Rng& rng) {
  (void)rng;  // scans are deterministic; the seed only fixes the call order
  using namespace detail_layout;

  if (is_room_relative_rule(rule) && anchor)
    throw ValidationError("rule " + std::string(placement_rule_name(rule)) +
                          " takes no anchor");
  if (!is_room_relative_rule(rule) && !anchor)
    throw ValidationError("rule " + std::string(placement_rule_name(rule)) +
                          " requires an anchor");

  double l = node.length, w = node.width, h = effective_height(node);
  std::vector<std::string> warnings;

  // Oversize policy against the relevant free span.
  {
    RectF span;
    if (rule == PlacementRule::kTop && anchor) {
      span = RectF{0, 0, 2 * anchor->half_extents.x, 2 * anchor->half_extents.y};
    } else if (rule == PlacementRule::kCeiling) {
      span = mask.largest_free_rect(true);
    } else {
      span = mask.largest_free_rect(false);
    }
    bool fits_span = (l <= span.w() && w <= span.h()) ||
                     (w <= span.w() && l <= span.h());
    if (!fits_span && span.area() > 0) {
      double s1 = std::min(span.w() / l, span.h() / w);
      double s2 = std::min(span.w() / w, span.h() / l);
      double s = 0.9 * std::max(s1, s2);
      if (s < 1.0) {
        l *= s;
        w *= s;
        h *= s;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "oversized: scaled by %.3f", s);
        warnings.push_back(buf);
      }
    }
  }

  auto finish = [&](Vec2 c, double z_center, double yaw) {
    PlacedBox b;
    b.label = node.name;
    b.asset_id = node.asset_id;
    b.center = {c.x, c.y, z_center};
    b.half_extents = {l / 2, w / 2, h / 2};
    b.yaw = wrap_angle(yaw);
    b.rule_used = rule;
    b.anchor_label = anchor ? anchor->label : "";
    b.warnings = std::move(warnings);
    return b;
  };
  auto footprint = [&](Vec2 c, double yaw) {
    return Obb2{c, l / 2, w / 2, yaw};
  };
  // Floor candidate test: inside the room, grid-free, and exactly disjoint
  // from every committed volume spanning the floor item's z range.
  auto floor_ok = [&](const Obb2& fp) {
    return mask.fits(fp) && !mask.collides(fp, 0.0, h);
  };

  switch (rule) {
    case PlacementRule::kCorner: {
      auto corners = room_corners(mask);
      for (const auto& rc : corners) {
        // Prefer the yaw facing the room interior; both footprint
        // orientations are cardinal.
        double best = yaw_facing_cardinal(quantize_cardinal(geo.centroid - rc.point));
        for (double yaw : {best, wrap_angle(best + kPi / 2),
                           wrap_angle(best + kPi), wrap_angle(best + 3 * kPi / 2)}) {
          Obb2 probe{{0, 0}, l / 2, w / 2, yaw};
          Vec2 plo, phi;
          probe.bounds(plo, phi);
          Vec2 half{(phi.x - plo.x) / 2, (phi.y - plo.y) / 2};
          Vec2 c{rc.point.x + rc.dir.x * half.x, rc.point.y + rc.dir.y * half.y};
          if (floor_ok(footprint(c, yaw))) return finish(c, h / 2, yaw);
        }
      }
      throw InfeasibleError("no available corner for '" + node.name + "'");
    }

    case PlacementRule::kWall: {
      auto walls = room_walls(*geo.floorplan, geo.room_index);
      const double cell = mask.cell;
      for (const auto& seg : walls) {
        // Inward normal: toward the side this room occupies.
        Vec2 nrm = seg.vertical ? Vec2{seg.a_low_side ? -1.0 : 1.0, 0.0}
                                : Vec2{0.0, seg.a_low_side ? -1.0 : 1.0};
        // Front faces away from the wall, toward the interior.
        double yaw = yaw_facing_cardinal(nrm);
        if (seg.length() < l) continue;
        for (double t = seg.lo + l / 2; t <= seg.hi - l / 2 + 1e-9; t += cell) {
          Vec2 on_wall = seg.vertical ? Vec2{seg.fixed, t} : Vec2{t, seg.fixed};
          Vec2 c = on_wall + nrm * (w / 2);
          if (floor_ok(footprint(c, yaw))) return finish(c, h / 2, yaw);
        }
      }
      throw InfeasibleError("no available wall for '" + node.name + "'");
    }

    case PlacementRule::kCenter: {
      std::vector<Vec2> candidates;
      for (const auto& r : geo.rects) candidates.push_back(r.center());
      RectF free = mask.largest_free_rect(false);
      if (free.area() > 0) candidates.push_back(free.center());
      for (const Vec2& c : candidates) {
        for (double yaw : {0.0, kPi / 2}) {
          if (floor_ok(footprint(c, yaw))) return finish(c, h / 2, yaw);
        }
      }
      throw InfeasibleError("no available center area for '" + node.name + "'");
    }

    case PlacementRule::kBesides: {
      const double yaw = anchor->yaw;
      const Vec2 ac = anchor->center.xy();
      const double ax = anchor->half_extents.x, ay = anchor->half_extents.y;
      const double gap = kPlacementGap;
      // Side offsets in the anchor frame: lateral sides first.
      const Vec2 locals[4] = {{ax + l / 2 + gap, 0},
                              {-(ax + l / 2 + gap), 0},
                              {0, ay + w / 2 + gap},
                              {0, -(ay + w / 2 + gap)}};
      for (const Vec2& lo : locals) {
        Vec2 c = ac + lo.rotated(yaw);
        if (floor_ok(footprint(c, yaw))) return finish(c, h / 2, yaw);
      }
      throw InfeasibleError("no available besides position for '" + node.name + "'");
    }

    case PlacementRule::kAround: {
      const Vec2 ac = anchor->center.xy();
      const double ax = anchor->half_extents.x, ay = anchor->half_extents.y;
      const double gap = kPlacementGap;
      const double lateral = l, depth = w;
      struct Slot {
        Vec2 local;
      };
      std::vector<Slot> slots;
      auto add_edge = [&](bool along_x, double sign) {
        double edge_half = along_x ? ax : ay;
        double offset = (along_x ? ay : ax) + depth / 2 + gap;
        int count = std::max(
            1, static_cast<int>(std::floor((2 * edge_half) / (lateral + gap))));
        for (int i = 0; i < count; ++i) {
          double t = -edge_half + (2 * edge_half) * (i + 0.5) / count;
          if (along_x) {
            slots.push_back({{t, sign * offset}});
          } else {
            slots.push_back({{sign * offset, t}});
          }
        }
      };
      add_edge(true, -1);   // front edge (-y in anchor frame)
      add_edge(true, 1);    // back
      add_edge(false, -1);  // left
      add_edge(false, 1);   // right
      for (const auto& s : slots) {
        Vec2 c = ac + s.local.rotated(anchor->yaw);
        double yaw = detail_layout::yaw_facing_point(c, ac);
        if (floor_ok(footprint(c, yaw))) return finish(c, h / 2, yaw);
      }
      throw InfeasibleError("no available around position for '" + node.name + "'");
    }

    case PlacementRule::kFront: {
      const Vec2 ac = anchor->center.xy();
      Vec2 dir = anchor->front();
      double standoff = anchor->half_extents.y + kBufferFront + w / 2;
      Vec2 c = ac + dir * standoff;
      double yaw = detail_layout::yaw_facing_point(c, ac);
      if (floor_ok(footprint(c, yaw))) return finish(c, h / 2, yaw);
      throw InfeasibleError("no available front position for '" + node.name + "'");
    }

    case PlacementRule::kCeiling: {
      std::vector<Vec2> candidates{geo.centroid};
      for (const auto& r : geo.rects) candidates.push_back(r.center());
      for (const Vec2& c : candidates) {
        Obb2 fp = footprint(c, 0.0);
        if (!mask.fits(fp, false)) continue;  // inside the room, ignore floor
        if (mask.collides(fp, wall_h - h, wall_h)) continue;
        return finish(c, wall_h - h / 2, 0.0);
      }
      throw InfeasibleError("no available ceiling area for '" + node.name + "'");
    }

    case PlacementRule::kTop: {
      const double ax = anchor->half_extents.x, ay = anchor->half_extents.y;
      auto& used = mask.top_used[anchor->label];
      std::vector<Vec2> candidates;
      candidates.push_back({0, 0});                      // center
      candidates.push_back({-(ax - l / 2), 0});          // left (min-x, local)
      candidates.push_back({ax - l / 2, 0});             // right
      double step = std::max(mask.cell, l / 2);
      for (double x = -ax + l / 2; x <= ax - l / 2 + 1e-9; x += step)
        for (double y = -ay + w / 2; y <= ay - w / 2 + 1e-9; y += step)
          candidates.push_back({x, y});
      for (const Vec2& local : candidates) {
        if (local.x - l / 2 < -ax - 1e-9 || local.x + l / 2 > ax + 1e-9 ||
            local.y - w / 2 < -ay - 1e-9 || local.y + w / 2 > ay + 1e-9)
          continue;
        Obb2 probe{local, l / 2, w / 2, 0.0};
        bool clash = false;
        for (const auto& u : used)
          if (obb_intersect(probe, u)) clash = true;
        if (clash) continue;
        Vec2 c = anchor->center.xy() + local.rotated(anchor->yaw);
        Obb2 world{c, l / 2, w / 2, anchor->yaw};
        if (mask.collides(world, anchor->z_top(), anchor->z_top() + h))
          continue;
        used.push_back(probe);
        return finish(c, anchor->z_top() + h / 2, anchor->yaw);
      }
      throw InfeasibleError("no available top area for '" + node.name + "'");
    }
  }
  throw ValidationError("unhandled placement rule");
}

/// Commits a placed box to the mask: exact volume always, grid cells only
/// for floor-standing items.
inline void update_mask(OccupancyMask& mask, const PlacedBox& box) {
  mask.commit(box.footprint(), box.center.z - box.half_extents.z,
              box.center.z + box.half_extents.z);
  if (box.rule_used == PlacementRule::kCeiling ||
      box.rule_used == PlacementRule::kTop)
    return;
  mask.mark(box.footprint());
}

/// Sequential placement loop: groups in anchor order; each group places its
/// anchor, then members (each against its own edge anchor), updating the
/// occupancy mask after every placement. A member with no feasible pose is
/// skipped and the miss recorded on its anchor box; an infeasible anchor
/// aborts the room with an annotated error.
inline std::vector<PlacedBox> place_furniture(const RoomId& room,
                                              const Floorplan& f,
                                              const LayoutGraph& g,
                                              double wall_h,
                                              std::uint64_t seed = 0) {
  int room_index = f.room_index(room.key());
  if (room_index < 0)
    throw ValidationError("room '" + room.key() + "' not in floorplan");
  if (g.nodes.empty()) return {};

  auto sags = identify_sags(g);
  OccupancyMask mask = OccupancyMask::from_floorplan(f, room_index);
  RoomGeometry geo = RoomGeometry::of(f, room_index);
  Rng rng(seed);

  std::vector<PlacedBox> out;
  std::map<std::string, std::size_t> placed_at;  // label -> index in out

  for (const auto& sag : sags) {
    const FurnitureNode* anchor_node = g.find_node(sag.anchor);
    const LayoutEdge* anchor_edge = g.edge_for(sag.anchor);
    PlacementRule anchor_rule =
        anchor_edge ? anchor_edge->rule : PlacementRule::kCenter;
    PlacedBox anchor_box;
    try {
      anchor_box = apply_rule(anchor_rule, mask, *anchor_node, nullptr, geo,
                              wall_h, rng);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("anchor '" + sag.anchor + "': " + e.what());
    }
    update_mask(mask, anchor_box);
    placed_at[sag.anchor] = out.size();
    out.push_back(std::move(anchor_box));
    std::size_t anchor_index = out.size() - 1;

    for (const auto& member : sag.members) {
      const FurnitureNode* node = g.find_node(member);
      const LayoutEdge* edge = g.edge_for(member);
      PlacementRule rule = edge ? edge->rule : PlacementRule::kCenter;
      std::string anchor_label =
          edge && !edge->anchor.empty() ? edge->anchor : "";

      const PlacedBox* parent = nullptr;
      if (!is_room_relative_rule(rule)) {
        auto it = placed_at.find(anchor_label);
        if (it == placed_at.end()) {
          out[anchor_index].warnings.push_back(
              "skipped '" + member + "': anchor '" + anchor_label +
              "' was not placed");
          continue;
        }
        parent = &out[it->second];
      }
      try {
        PlacedBox box = apply_rule(rule, mask, *node, parent, geo, wall_h, rng);
        update_mask(mask, box);
        placed_at[member] = out.size();
        out.push_back(std::move(box));
      } catch (const InfeasibleError& e) {
        out[anchor_index].warnings.push_back("skipped '" + member +
                                             "': " + e.what());
      }
    }
  }
  return out;
}

/// Union of the furniture and ornament fragments for one room. Node names
/// colliding across passes keep the furniture version; the ornament copy is
/// dropped (with its edges) since the anchor it names already exists.
inline LayoutGraph merge_layout_graphs(const LayoutGraph& furniture,
                                       const LayoutGraph& ornament) {
  LayoutGraph g = furniture;
  for (const auto& n : ornament.nodes) {
    if (!g.find_node(n.name)) g.nodes.push_back(n);
  }
  std::set<std::string> have;
  for (const auto& e : g.edges) have.insert(e.child);
  for (const auto& e : ornament.edges) {
    if (!g.find_node(e.child) || have.count(e.child)) continue;
    if (!e.anchor.empty() && !g.find_node(e.anchor)) continue;
    g.edges.push_back(e);
    have.insert(e.child);
  }
  ValidationReport rep = validate_layout_graph(g);
  if (!rep.pass())
    throw ValidationError("merged layout invalid: " + rep.joined());
  return g;
}

}  // namespace homegen
