#pragma once

// Deterministic floorplan synthesis from a bubble diagram: recursive
// guillotine bipartition of a square house rectangle, weighted by per-type
// area priors, with backtracking until every requested connection is
// realized as a shared wall long enough to host a door. Also: door
// placement, mask-to-rectangle decomposition, and base-mesh extrusion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "homegen/error.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {

// Module defaults. The paper specifies none of these.
constexpr double kDefaultCellSize = 0.1;   // meters per grid cell
constexpr double kDoorWidth = 0.9;         // meters
constexpr double kDoorHeight = 2.1;        // meters
constexpr double kMinRoomArea = 4.0;       // square meters

/// Target-area prior per canonical room type, square meters. Unknown rooms
/// get the mean of the nine sized types.
inline double room_area_prior(RoomType t) {
  switch (t) {
    case RoomType::kLivingRoom: return 18.0;
    case RoomType::kBedroom: return 12.0;
    case RoomType::kDiningRoom: return 12.0;
    case RoomType::kKitchen: return 10.0;
    case RoomType::kStudyRoom: return 10.0;
    case RoomType::kStorage: return 6.0;
    case RoomType::kBalcony: return 6.0;
    case RoomType::kBathroom: return 5.0;
    case RoomType::kEntrance: return 5.0;
    case RoomType::kUnknown: return 84.0 / 9.0;
  }
  return 84.0 / 9.0;
}

inline double default_total_area(const BubbleDiagram& d) {
  double sum = 0;
  for (const auto& r : d.rooms) sum += room_area_prior(r.canonical_type);
  return sum;
}

namespace detail_fp {

struct Rect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open cell ranges
  int w() const { return x1 - x0; }
  int h() const { return y1 - y0; }
  long area() const { return static_cast<long>(w()) * h(); }
};

enum Side { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

struct Constraint {
  int room;
  int side;
};

/// Longest consecutive shared boundary run between rooms a and b, in cells.
inline int shared_run(const std::vector<std::int16_t>& grid, int W, int H,
                      int a, int b) {
  auto at = [&](int x, int y) -> int {
    if (x < 0 || y < 0 || x >= W || y >= H) return -1;
    return grid[static_cast<std::size_t>(y) * W + x];
  };
  int best = 0;
  for (int x = 1; x < W; ++x) {  // vertical boundaries
    int run = 0;
    for (int y = 0; y < H; ++y) {
      int l = at(x - 1, y), r = at(x, y);
      if ((l == a && r == b) || (l == b && r == a)) {
        best = std::max(best, ++run);
      } else {
        run = 0;
      }
    }
  }
  for (int y = 1; y < H; ++y) {  // horizontal boundaries
    int run = 0;
    for (int x = 0; x < W; ++x) {
      int l = at(x, y - 1), u = at(x, y);
      if ((l == a && u == b) || (l == b && u == a)) {
        best = std::max(best, ++run);
      } else {
        run = 0;
      }
    }
  }
  return best;
}

/// Longest run of room cells on the house rectangle border, in cells.
inline int exterior_run(const std::vector<std::int16_t>& grid, int W, int H,
                        int room) {
  auto at = [&](int x, int y) -> int {
    return grid[static_cast<std::size_t>(y) * W + x];
  };
  int best = 0;
  int run = 0;
  for (int x = 0; x < W; ++x) {
    run = at(x, 0) == room ? run + 1 : 0;
    best = std::max(best, run);
  }
  run = 0;
  for (int x = 0; x < W; ++x) {
    run = at(x, H - 1) == room ? run + 1 : 0;
    best = std::max(best, run);
  }
  run = 0;
  for (int y = 0; y < H; ++y) {
    run = at(0, y) == room ? run + 1 : 0;
    best = std::max(best, run);
  }
  run = 0;
  for (int y = 0; y < H; ++y) {
    run = at(W - 1, y) == room ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

class Synthesizer {
 public:
  Synthesizer(const BubbleDiagram& d, double total_area, double cell_size)
      : d_(d), cell_(cell_size) {
    ValidationReport rep = validate_bubble_diagram(d);
    if (!rep.pass())
      throw ValidationError("bubble diagram invalid: " + rep.joined());
    if (!(cell_size > 0)) throw ValidationError("cell_size must be positive");
    n_ = static_cast<int>(d.rooms.size());
    if (total_area <= 0) total_area = default_total_area(d);
    if (total_area + 1e-9 < n_ * kMinRoomArea)
      throw InfeasibleError("total area " + std::to_string(total_area) +
                            " below " + std::to_string(n_) + " rooms x " +
                            std::to_string(kMinRoomArea) + " m^2 minimum");

    // Index connections by room position.
    adj_.assign(n_, {});
    for (const auto& [a, b] : d.connections) {
      int ia = index_of(a), ib = index_of(b);
      edges_.emplace_back(ia, ib);
      adj_[ia].push_back(ib);
      adj_[ib].push_back(ia);
    }

    // Targets: priors scaled to total_area, floored at the minimum area.
    target_.resize(n_);
    double prior_sum = 0;
    for (int i = 0; i < n_; ++i) {
      target_[i] = room_area_prior(d.rooms[i].canonical_type);
      prior_sum += target_[i];
    }
    for (int i = 0; i < n_; ++i) target_[i] *= total_area / prior_sum;
    double deficit = 0, free_sum = 0;
    for (int i = 0; i < n_; ++i) {
      if (target_[i] < kMinRoomArea) {
        deficit += kMinRoomArea - target_[i];
        target_[i] = kMinRoomArea;
      } else {
        free_sum += target_[i] - kMinRoomArea;
      }
    }
    if (deficit > 0 && free_sum > 0) {
      for (int i = 0; i < n_; ++i) {
        if (target_[i] > kMinRoomArea) {
          target_[i] -= deficit * (target_[i] - kMinRoomArea) / free_sum;
        }
      }
    }

    // Square house rectangle.
    int side = static_cast<int>(std::lround(std::sqrt(total_area) / cell_));
    int min_side = static_cast<int>(
        std::ceil(std::sqrt(n_ * kMinRoomArea) / cell_));
    W_ = H_ = std::max(side, min_side);
    grid_.assign(static_cast<std::size_t>(W_) * H_, -1);

    need_cells_ = static_cast<int>(std::ceil(kDoorWidth / cell_)) + 2;
    min_side_cells_ = std::max(2, static_cast<int>(std::ceil(1.2 / cell_)));
  }

  Floorplan run() {
    std::vector<int> all(n_);
    for (int i = 0; i < n_; ++i) all[i] = i;
    budget_ = 4000;
    if (!solve(Rect{0, 0, W_, H_}, all, {}, 0)) {
      std::string which;
      for (const auto& [a, b] : fail_edges_) {
        if (!which.empty()) which += ", ";
        which += "[" + d_.rooms[a].original_name + ", " +
                 d_.rooms[b].original_name + "]";
      }
      if (which.empty()) which = "(front-door wall)";
      throw InfeasibleError("cannot realize connections as shared walls: " +
                            which);
    }
    Floorplan f;
    f.cell_size = cell_;
    f.width = W_;
    f.height = H_;
    f.rooms = d_.rooms;
    f.grid = grid_;
    build_wall_segments(f);
    return f;
  }

 private:
  int index_of(const std::string& original) const {
    for (int i = 0; i < n_; ++i)
      if (d_.rooms[i].original_name == original) return i;
    throw ValidationError("unknown room '" + original + "'");
  }

  bool connected_subset(const std::vector<int>& rooms) const {
    if (rooms.empty()) return false;
    std::set<int> in(rooms.begin(), rooms.end());
    std::set<int> seen{rooms[0]};
    std::vector<int> stack{rooms[0]};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : adj_[v]) {
        if (in.count(u) && !seen.count(u)) {
          seen.insert(u);
          stack.push_back(u);
        }
      }
    }
    return seen.size() == in.size();
  }

  void paint(const Rect& r, std::int16_t v) {
    for (int y = r.y0; y < r.y1; ++y)
      for (int x = r.x0; x < r.x1; ++x)
        grid_[static_cast<std::size_t>(y) * W_ + x] = v;
  }

  double area_of(const std::vector<int>& rooms) const {
    double s = 0;
    for (int i : rooms) s += target_[i];
    return s;
  }

  int min_extent_cells(const std::vector<int>& rooms, int other_dim) const {
    // Enough cells that every room can reach the minimum area, and never
    // thinner than a door-friendly sliver.
    double min_cells =
        rooms.size() * kMinRoomArea / (cell_ * cell_);
    int by_area = static_cast<int>(std::ceil(min_cells / other_dim));
    return std::max(min_side_cells_, by_area);
  }

  struct Config {
    long score_conn;      // 0 when both sides stay connected
    long score_cut;       // number of cut edges
    long score_axis;      // 0 for the preferred (longer) axis
    double score_balance; // deviation of snapped cut from the area ratio
    unsigned bits;
    int axis;   // 0: vertical cut (split x), 1: horizontal cut (split y)
    int orient; // 0: subset S on the low side, 1: on the high side
    int pos;    // cut coordinate in cells

    bool operator<(const Config& o) const {
      if (score_conn != o.score_conn) return score_conn < o.score_conn;
      if (score_cut != o.score_cut) return score_cut < o.score_cut;
      if (score_axis != o.score_axis) return score_axis < o.score_axis;
      if (score_balance != o.score_balance)
        return score_balance < o.score_balance;
      if (bits != o.bits) return bits < o.bits;
      if (axis != o.axis) return axis < o.axis;
      return orient < o.orient;
    }
  };

  bool solve(Rect r, const std::vector<int>& rooms,
             const std::vector<Constraint>& cons, int depth) {
    if (rooms.size() == 1) {
      paint(r, static_cast<std::int16_t>(rooms[0]));
      return depth > 0 || final_check();
    }

    const int k = static_cast<int>(rooms.size());
    std::vector<Config> configs;
    const int preferred_axis = r.w() >= r.h() ? 0 : 1;

    auto consider = [&](unsigned bits) {
      std::vector<int> S, T;
      for (int i = 0; i < k; ++i)
        ((bits >> i) & 1u ? S : T).push_back(rooms[i]);
      if (S.empty() || T.empty()) return;
      long cut = 0;
      std::set<int> inS(S.begin(), S.end());
      for (const auto& [a, b] : edges_) {
        bool as = inS.count(a) > 0, bs = inS.count(b) > 0;
        bool al = std::find(rooms.begin(), rooms.end(), a) != rooms.end();
        bool bl = std::find(rooms.begin(), rooms.end(), b) != rooms.end();
        if (al && bl && as != bs) ++cut;
      }
      long conn = (connected_subset(S) && connected_subset(T)) ? 0 : 1;
      double aS = area_of(S), aT = area_of(T);
      for (int axis = 0; axis < 2; ++axis) {
        int len = axis == 0 ? r.w() : r.h();
        int other = axis == 0 ? r.h() : r.w();
        for (int orient = 0; orient < 2; ++orient) {
          const std::vector<int>& low = orient == 0 ? S : T;
          const std::vector<int>& high = orient == 0 ? T : S;
          // Feasibility against inherited side constraints.
          bool ok = true;
          for (const auto& c : cons) {
            bool in_low = std::find(low.begin(), low.end(), c.room) != low.end();
            if (axis == 0) {
              if (c.side == kLeft && !in_low) ok = false;
              if (c.side == kRight && in_low) ok = false;
            } else {
              if (c.side == kBottom && !in_low) ok = false;
              if (c.side == kTop && in_low) ok = false;
            }
          }
          if (!ok) continue;
          double frac = area_of(low) / (aS + aT);
          int raw = static_cast<int>(std::lround(len * frac));
          int lo_min = min_extent_cells(low, other);
          int hi_min = min_extent_cells(high, other);
          if (lo_min + hi_min > len) continue;
          int pos = std::clamp(raw, lo_min, len - hi_min);
          Config cfg;
          cfg.score_conn = conn;
          cfg.score_cut = cut;
          cfg.score_axis = axis == preferred_axis ? 0 : 1;
          cfg.score_balance = std::abs(pos - len * frac);
          cfg.bits = bits;
          cfg.axis = axis;
          cfg.orient = orient;
          cfg.pos = (axis == 0 ? r.x0 : r.y0) + pos;
          configs.push_back(cfg);
        }
      }
    };

    if (k <= 10) {
      for (unsigned bits = 1; bits + 1 < (1u << k); ++bits)
        if (bits & 1u) consider(bits);
    } else {
      for (int p = 1; p < k; ++p) consider((1u << p) - 1u);
    }
    std::sort(configs.begin(), configs.end());

    for (const auto& cfg : configs) {
      if (--budget_ <= 0) return false;
      std::vector<int> S, T;
      for (int i = 0; i < k; ++i)
        ((cfg.bits >> i) & 1u ? S : T).push_back(rooms[i]);
      const std::vector<int>& low = cfg.orient == 0 ? S : T;
      const std::vector<int>& high = cfg.orient == 0 ? T : S;
      Rect rl = r, rh = r;
      if (cfg.axis == 0) {
        rl.x1 = cfg.pos;
        rh.x0 = cfg.pos;
      } else {
        rl.y1 = cfg.pos;
        rh.y0 = cfg.pos;
      }

      // Constraints for the children: inherited ones follow their room;
      // each cut edge pins its endpoints to the new shared boundary.
      std::vector<Constraint> cl, ch;
      std::set<int> in_low(low.begin(), low.end());
      std::set<int> in_high(high.begin(), high.end());
      for (const auto& c : cons)
        (in_low.count(c.room) ? cl : ch).push_back(c);
      std::vector<std::pair<int, int>> cut_edges;
      for (const auto& [a, b] : edges_) {
        int la = in_low.count(a) ? a : (in_high.count(a) ? -1 : -2);
        if (la == -2) continue;
        int lb = in_low.count(b) ? b : (in_high.count(b) ? -1 : -2);
        if (lb == -2) continue;
        bool a_low = in_low.count(a) > 0, b_low = in_low.count(b) > 0;
        if (a_low == b_low) continue;
        int low_room = a_low ? a : b;
        int high_room = a_low ? b : a;
        cut_edges.emplace_back(low_room, high_room);
        cl.push_back({low_room, cfg.axis == 0 ? kRight : kTop});
        ch.push_back({high_room, cfg.axis == 0 ? kLeft : kBottom});
      }

      if (!solve(rl, low, cl, depth + 1)) {
        paint(r, -1);
        continue;
      }
      if (!solve(rh, high, ch, depth + 1)) {
        paint(r, -1);
        continue;
      }
      bool ok = true;
      for (const auto& [a, b] : cut_edges) {
        if (shared_run(grid_, W_, H_, a, b) < need_cells_) {
          ok = false;
          break;
        }
      }
      if (ok && depth == 0) ok = final_check();
      if (ok) return true;
      paint(r, -1);
    }
    return false;
  }

  /// Root acceptance: every diagram edge realized and every front-door room
  /// owning a long-enough exterior wall.
  bool final_check() {
    fail_edges_.clear();
    for (const auto& [a, b] : edges_) {
      if (shared_run(grid_, W_, H_, a, b) < need_cells_)
        fail_edges_.emplace_back(a, b);
    }
    bool fronts_ok = true;
    for (const auto& name : d_.front_door_rooms) {
      if (exterior_run(grid_, W_, H_, index_of(name)) < need_cells_)
        fronts_ok = false;
    }
    return fail_edges_.empty() && fronts_ok;
  }

  void build_wall_segments(Floorplan& f) const {
    auto at = [&](int x, int y) -> int {
      if (x < 0 || y < 0 || x >= W_ || y >= H_) return -1;
      return grid_[static_cast<std::size_t>(y) * W_ + x];
    };
    auto canonical = [](int lo_room, int hi_room) {
      // room_a = lower index among occupied sides; -1 stays in room_b.
      WallSegment w;
      if (lo_room >= 0 && (hi_room < 0 || lo_room <= hi_room)) {
        w.room_a = lo_room;
        w.room_b = hi_room;
        w.a_low_side = true;
      } else {
        w.room_a = hi_room;
        w.room_b = lo_room;
        w.a_low_side = false;
      }
      return w;
    };

    std::vector<WallSegment> segs;
    for (int x = 0; x <= W_; ++x) {  // vertical boundaries
      int y = 0;
      while (y < H_) {
        int l = at(x - 1, y), r = at(x, y);
        if (l == r || (l < 0 && r < 0)) {
          ++y;
          continue;
        }
        int y0 = y;
        while (y < H_ && at(x - 1, y) == l && at(x, y) == r) ++y;
        WallSegment w = canonical(l, r);
        w.vertical = true;
        w.fixed = x * cell_;
        w.lo = y0 * cell_;
        w.hi = y * cell_;
        segs.push_back(w);
      }
    }
    for (int y = 0; y <= H_; ++y) {  // horizontal boundaries
      int x = 0;
      while (x < W_) {
        int lo = at(x, y - 1), hi = at(x, y);
        if (lo == hi || (lo < 0 && hi < 0)) {
          ++x;
          continue;
        }
        int x0 = x;
        while (x < W_ && at(x, y - 1) == lo && at(x, y) == hi) ++x;
        WallSegment w = canonical(lo, hi);
        w.vertical = false;
        w.fixed = y * cell_;
        w.lo = x0 * cell_;
        w.hi = x * cell_;
        segs.push_back(w);
      }
    }
    std::sort(segs.begin(), segs.end(), [](const WallSegment& a, const WallSegment& b) {
      if (a.vertical != b.vertical) return a.vertical < b.vertical;
      if (a.fixed != b.fixed) return a.fixed < b.fixed;
      return a.lo < b.lo;
    });
    f.wall_segments = std::move(segs);
  }

  const BubbleDiagram& d_;
  double cell_;
  int n_ = 0;
  std::vector<std::vector<int>> adj_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<double> target_;
  int W_ = 0, H_ = 0;
  std::vector<std::int16_t> grid_;
  int need_cells_ = 0;
  int min_side_cells_ = 0;
  int budget_ = 0;
  std::vector<std::pair<int, int>> fail_edges_;
};

}  // namespace detail_fp

/// Synthesizes per-room masks from a bubble diagram. Deterministic: equal
/// inputs give bit-identical floorplans. `total_area <= 0` derives the area
/// from the room-type priors.
inline Floorplan synthesize_floorplan(const BubbleDiagram& d,
                                      double total_area = 0.0,
                                      double cell_size = kDefaultCellSize) {
  detail_fp::Synthesizer synth(d, total_area, cell_size);
  return synth.run();
}

/// Places exactly one interior door per connection and one front door per
/// front-door room, each centered on the longest eligible wall segment.
inline Floorplan place_doors(Floorplan f, const BubbleDiagram& d,
                             double door_width = kDoorWidth) {
  f.doors.clear();
  const double cell = f.cell_size;

  auto room_of = [&](const std::string& original) {
    for (std::size_t i = 0; i < f.rooms.size(); ++i)
      if (f.rooms[i].original_name == original) return static_cast<int>(i);
    throw ValidationError("unknown room '" + original + "'");
  };

  auto best_segment = [&](auto&& accept) -> const WallSegment* {
    const WallSegment* best = nullptr;
    for (const auto& w : f.wall_segments) {
      if (!accept(w)) continue;
      if (!best || w.length() > best->length()) best = &w;
    }
    return best;
  };

  auto cut_door = [&](const WallSegment& w, int ra, int rb, DoorKind kind) {
    if (w.length() + 1e-9 < door_width + 2 * cell)
      throw InfeasibleError("shared wall shorter than door width between '" +
                            f.rooms[ra].key() + "' and '" +
                            (rb >= 0 ? f.rooms[rb].key() : std::string("exterior")) +
                            "'");
    // Center snapped to the cell grid, then clamped one cell off the corners.
    double center = w.lo + cell * std::round(w.length() / (2 * cell));
    double lo = center - door_width / 2;
    double hi = center + door_width / 2;
    if (lo < w.lo + cell) {
      lo = w.lo + cell;
      hi = lo + door_width;
    }
    if (hi > w.hi - cell) {
      hi = w.hi - cell;
      lo = hi - door_width;
    }
    DoorOpening door;
    door.room_a = ra;
    door.room_b = rb;
    door.vertical = w.vertical;
    door.fixed = w.fixed;
    door.lo = lo;
    door.hi = hi;
    door.kind = kind;
    f.doors.push_back(door);
  };

  for (const auto& [a, b] : d.connections) {
    int ia = room_of(a), ib = room_of(b);
    const WallSegment* w = best_segment([&](const WallSegment& s) {
      return (s.room_a == ia && s.room_b == ib) ||
             (s.room_a == ib && s.room_b == ia);
    });
    if (!w)
      throw InfeasibleError("no shared wall between '" + a + "' and '" + b + "'");
    cut_door(*w, std::min(ia, ib), std::max(ia, ib), DoorKind::kInterior);
  }
  for (const auto& name : d.front_door_rooms) {
    int r = room_of(name);
    const WallSegment* w = best_segment([&](const WallSegment& s) {
      return s.room_a == r && s.room_b == -1;
    });
    if (!w)
      throw InfeasibleError("front-door room '" + name + "' has no exterior wall");
    cut_door(*w, r, -1, DoorKind::kFront);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Rectangle decomposition

struct CellRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open cell ranges
  long cells() const { return static_cast<long>(x1 - x0) * (y1 - y0); }
  bool operator==(const CellRect& o) const {
    return x0 == o.x0 && y0 == o.y0 && x1 == o.x1 && y1 == o.y1;
  }
};

/// Greedy maximal-rectangle partition of a cell mask: repeatedly removes the
/// largest axis-aligned rectangle fully inside the remaining mask (ties:
/// topmost, then leftmost). The result partitions the mask exactly.
inline std::vector<CellRect> decompose_mask(
    const std::vector<std::pair<int, int>>& cells) {
  if (cells.empty()) throw ValidationError("empty mask");
  int x0 = cells[0].first, x1 = cells[0].first;
  int y0 = cells[0].second, y1 = cells[0].second;
  for (const auto& [x, y] : cells) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  const int W = x1 - x0 + 1, H = y1 - y0 + 1;
  std::vector<char> in(static_cast<std::size_t>(W) * H, 0);
  for (const auto& [x, y] : cells)
    in[static_cast<std::size_t>(y - y0) * W + (x - x0)] = 1;

  std::vector<CellRect> out;
  long remaining = static_cast<long>(cells.size());
  while (remaining > 0) {
    // Largest rectangle of 1s: histogram of column heights per bottom row.
    std::vector<int> height(W, 0);
    CellRect best{};
    long best_area = 0;
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x)
        height[x] = in[static_cast<std::size_t>(y) * W + x] ? height[x] + 1 : 0;
      for (int xs = 0; xs < W; ++xs) {
        int minh = height[xs];
        for (int xe = xs; xe < W && minh > 0; ++xe) {
          minh = std::min(minh, height[xe]);
          if (minh == 0) break;
          long area = static_cast<long>(xe - xs + 1) * minh;
          if (area > best_area) {
            best_area = area;
            best = CellRect{xs, y - minh + 1, xe + 1, y + 1};
          }
        }
      }
    }
    for (int y = best.y0; y < best.y1; ++y)
      for (int x = best.x0; x < best.x1; ++x)
        in[static_cast<std::size_t>(y) * W + x] = 0;
    remaining -= best_area;
    out.push_back(CellRect{best.x0 + x0, best.y0 + y0, best.x1 + x0,
                           best.y1 + y0});
  }
  return out;
}

/// World-space axis-aligned rectangle, meters.
struct RectF {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double w() const { return x1 - x0; }
  double h() const { return y1 - y0; }
  double area() const { return w() * h(); }
  Vec2 center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }
  bool contains(const Vec2& p, double eps = 0.0) const {
    return p.x >= x0 - eps && p.x <= x1 + eps && p.y >= y0 - eps &&
           p.y <= y1 + eps;
  }
};

inline std::vector<RectF> rectangles_of_room(const Floorplan& f, int room) {
  auto rects = decompose_mask(f.room_cells(room));
  std::vector<RectF> out;
  out.reserve(rects.size());
  for (const auto& r : rects) {
    out.push_back(RectF{r.x0 * f.cell_size, r.y0 * f.cell_size,
                        r.x1 * f.cell_size, r.y1 * f.cell_size});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extrusion

namespace detail_fp {

inline void push_quad(SceneMesh& m, const Vec3& a, const Vec3& b,
                      const Vec3& c, const Vec3& d) {
  int base = static_cast<int>(m.vertices.size());
  const Vec3 gray{0.8, 0.8, 0.8};
  m.vertices.insert(m.vertices.end(), {a, b, c, d});
  m.colors.insert(m.colors.end(), 4, gray);
  m.faces.push_back({base, base + 1, base + 2});
  m.faces.push_back({base, base + 2, base + 3});
}

/// Emits one wall sheet (possibly cut by door openings) whose normal points
/// toward the room on side `low_side ? low : high` of the wall line.
inline void push_wall_sheet(SceneMesh& m, const WallSegment& w,
                            bool toward_low, double h,
                            const std::vector<DoorOpening>& doors,
                            double door_height) {
  // Openings on this wall line, clipped to the segment, sorted.
  std::vector<std::pair<double, double>> cuts;
  for (const auto& d : doors) {
    if (d.vertical != w.vertical || d.fixed != w.fixed) continue;
    double lo = std::max(d.lo, w.lo), hi = std::min(d.hi, w.hi);
    if (hi > lo) cuts.emplace_back(lo, hi);
  }
  std::sort(cuts.begin(), cuts.end());

  auto emit = [&](double lo, double hi, double z0, double z1) {
    if (!(hi > lo) || !(z1 > z0)) return;
    Vec3 p00, p10, p11, p01;
    if (w.vertical) {
      p00 = {w.fixed, lo, z0};
      p10 = {w.fixed, hi, z0};
      p11 = {w.fixed, hi, z1};
      p01 = {w.fixed, lo, z1};
    } else {
      p00 = {lo, w.fixed, z0};
      p10 = {hi, w.fixed, z0};
      p11 = {hi, w.fixed, z1};
      p01 = {lo, w.fixed, z1};
    }
    // Winding fixes the normal: toward the low-coordinate side needs the
    // reversed horizontal order.
    if (toward_low) {
      push_quad(m, p10, p00, p01, p11);
    } else {
      push_quad(m, p00, p10, p11, p01);
    }
  };

  double cursor = w.lo;
  for (const auto& [clo, chi] : cuts) {
    emit(cursor, clo, 0, h);
    emit(clo, chi, door_height, h);  // header above the opening
    cursor = chi;
  }
  emit(cursor, w.hi, 0, h);
}

}  // namespace detail_fp

/// Extrudes the floorplan into the base mesh: per-room floor at z=0
/// (normals +z), ceiling at z=h (normals -z, facing into the room; balconies
/// stay open), and wall sheets per room with door openings cut. Submeshes
/// are labeled "<room>/floor", "<room>/ceiling", "<room>/wall".
inline SceneMesh extrude_base_mesh(const Floorplan& f, double h,
                                   double door_height = kDoorHeight) {
  if (!(h > 0)) throw ValidationError("wall height must be positive");
  SceneMesh m;
  for (int room = 0; room < static_cast<int>(f.rooms.size()); ++room) {
    const std::string key = f.rooms[room].key();
    auto rects = rectangles_of_room(f, room);

    int begin = static_cast<int>(m.faces.size());
    for (const auto& r : rects) {
      detail_fp::push_quad(m, {r.x0, r.y0, 0}, {r.x1, r.y0, 0},
                           {r.x1, r.y1, 0}, {r.x0, r.y1, 0});
    }
    m.submeshes.push_back(
        {key + "/floor", begin, static_cast<int>(m.faces.size()) - begin});

    if (f.rooms[room].canonical_type != RoomType::kBalcony) {
      begin = static_cast<int>(m.faces.size());
      for (const auto& r : rects) {
        detail_fp::push_quad(m, {r.x0, r.y0, h}, {r.x0, r.y1, h},
                             {r.x1, r.y1, h}, {r.x1, r.y0, h});
      }
      m.submeshes.push_back(
          {key + "/ceiling", begin, static_cast<int>(m.faces.size()) - begin});
    }

    begin = static_cast<int>(m.faces.size());
    for (const auto& w : f.wall_segments) {
      if (w.room_a == room) {
        detail_fp::push_wall_sheet(m, w, w.a_low_side, h, f.doors, door_height);
      } else if (w.room_b == room) {
        detail_fp::push_wall_sheet(m, w, !w.a_low_side, h, f.doors, door_height);
      }
    }
    m.submeshes.push_back(
        {key + "/wall", begin, static_cast<int>(m.faces.size()) - begin});
  }
  return m;
}

}  // namespace homegen
