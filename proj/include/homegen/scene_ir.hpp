#pragma once

// Canonical data model shared by every pipeline stage, plus the pure
// validation routines over it. All types are immutable-by-convention value
// records; nothing here touches the filesystem.

#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "homegen/error.hpp"
#include "homegen/geometry.hpp"

namespace homegen {

// ---------------------------------------------------------------------------
// Rooms

/// The fixed ten-category room vocabulary. Exotic room names are mapped onto
/// one of these; anything that fits nowhere becomes Unknown.
enum class RoomType {
  kKitchen,
  kStorage,
  kBathroom,
  kStudyRoom,
  kBalcony,
  kLivingRoom,
  kBedroom,
  kEntrance,
  kDiningRoom,
  kUnknown,
};

constexpr int kRoomTypeCount = 10;

inline const char* room_type_name(RoomType t) {
  switch (t) {
    case RoomType::kKitchen: return "kitchen";
    case RoomType::kStorage: return "storage";
    case RoomType::kBathroom: return "bathroom";
    case RoomType::kStudyRoom: return "study_room";
    case RoomType::kBalcony: return "balcony";
    case RoomType::kLivingRoom: return "living_room";
    case RoomType::kBedroom: return "bedroom";
    case RoomType::kEntrance: return "entrance";
    case RoomType::kDiningRoom: return "dining_room";
    case RoomType::kUnknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<RoomType> room_type_from_name(const std::string& s) {
  static const std::array<RoomType, kRoomTypeCount> all = {
      RoomType::kKitchen,   RoomType::kStorage,    RoomType::kBathroom,
      RoomType::kStudyRoom, RoomType::kBalcony,    RoomType::kLivingRoom,
      RoomType::kBedroom,   RoomType::kEntrance,   RoomType::kDiningRoom,
      RoomType::kUnknown};
  for (RoomType t : all) {
    if (s == room_type_name(t)) return t;
  }
  return std::nullopt;
}

/// Splits an indexed name like "storage2" into ("storage", 2).
/// Returns nullopt when the name does not end in digits.
inline std::optional<std::pair<std::string, int>> split_indexed_name(
    const std::string& name) {
  std::size_t i = name.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(name[i - 1]))) --i;
  if (i == name.size() || i == 0) return std::nullopt;
  int idx = 0;
  for (std::size_t j = i; j < name.size(); ++j) idx = idx * 10 + (name[j] - '0');
  if (idx <= 0) return std::nullopt;
  return std::make_pair(name.substr(0, i), idx);
}

/// A room: the LLM's free-form indexed name plus its canonical mapping.
struct RoomId {
  std::string original_name;  // e.g. "dungeon1"
  RoomType canonical_type = RoomType::kUnknown;
  int index = 1;  // 1-based, per canonical type

  /// Canonical key used for filenames and map keys, e.g. "storage2".
  std::string key() const {
    return std::string(room_type_name(canonical_type)) + std::to_string(index);
  }

  bool operator==(const RoomId& o) const {
    return original_name == o.original_name &&
           canonical_type == o.canonical_type && index == o.index;
  }
};

/// Graph of rooms and required functional connections. Connections and
/// front-door entries reference rooms by original name.
struct BubbleDiagram {
  std::vector<RoomId> rooms;
  std::vector<std::pair<std::string, std::string>> connections;
  std::vector<std::string> front_door_rooms;

  const RoomId* find_room(const std::string& original) const {
    for (const auto& r : rooms)
      if (r.original_name == original) return &r;
    return nullptr;
  }

  bool operator==(const BubbleDiagram& o) const {
    return rooms == o.rooms && connections == o.connections &&
           front_door_rooms == o.front_door_rooms;
  }
};

// ---------------------------------------------------------------------------
// Layout graphs

enum class PlacementRule {
  kCorner,
  kWall,
  kCenter,
  kBesides,
  kAround,
  kFront,
  kCeiling,
  kTop,
};

constexpr int kPlacementRuleCount = 8;

inline const char* placement_rule_name(PlacementRule r) {
  switch (r) {
    case PlacementRule::kCorner: return "place_corner";
    case PlacementRule::kWall: return "place_wall";
    case PlacementRule::kCenter: return "place_center";
    case PlacementRule::kBesides: return "place_besides";
    case PlacementRule::kAround: return "place_around";
    case PlacementRule::kFront: return "place_front";
    case PlacementRule::kCeiling: return "place_ceiling";
    case PlacementRule::kTop: return "place_top";
  }
  return "place_center";
}

inline std::optional<PlacementRule> placement_rule_from_name(
    const std::string& s) {
  static const std::array<PlacementRule, kPlacementRuleCount> all = {
      PlacementRule::kCorner,  PlacementRule::kWall,
      PlacementRule::kCenter,  PlacementRule::kBesides,
      PlacementRule::kAround,  PlacementRule::kFront,
      PlacementRule::kCeiling, PlacementRule::kTop};
  for (PlacementRule r : all) {
    if (s == placement_rule_name(r)) return r;
  }
  return std::nullopt;
}

/// True for rules that position an item against the room itself rather than
/// against an anchor object.
inline bool is_room_relative_rule(PlacementRule r) {
  return r == PlacementRule::kCorner || r == PlacementRule::kWall ||
         r == PlacementRule::kCenter || r == PlacementRule::kCeiling;
}

/// One furniture or ornament item. The LLM supplies the footprint; height is
/// filled in when an asset is fitted.
struct FurnitureNode {
  std::string name;         // indexed, e.g. "sofa1"
  std::string description;  // free text used for asset retrieval
  double length = 0.0;      // meters, along the item's local x
  double width = 0.0;       // meters, along the item's local y
  double height = 0.0;      // meters; 0 until asset fit assigns it
  std::string asset_id;     // catalog entry fitted to this node, empty until fit

  bool operator==(const FurnitureNode& o) const {
    return name == o.name && description == o.description &&
           length == o.length && width == o.width && height == o.height &&
           asset_id == o.asset_id;
  }
};

/// Relation edge: `child` is placed by `rule`, optionally against `anchor`.
struct LayoutEdge {
  std::string child;
  PlacementRule rule = PlacementRule::kCenter;
  std::string anchor;  // empty = room-relative

  bool operator==(const LayoutEdge& o) const {
    return child == o.child && rule == o.rule && anchor == o.anchor;
  }
};

/// Per-room constrained layout graph.
struct LayoutGraph {
  std::vector<FurnitureNode> nodes;
  std::vector<LayoutEdge> edges;

  const FurnitureNode* find_node(const std::string& name) const {
    for (const auto& n : nodes)
      if (n.name == name) return &n;
    return nullptr;
  }
  FurnitureNode* find_node(const std::string& name) {
    for (auto& n : nodes)
      if (n.name == name) return &n;
    return nullptr;
  }
  const LayoutEdge* edge_for(const std::string& child) const {
    for (const auto& e : edges)
      if (e.child == child) return &e;
    return nullptr;
  }

  bool operator==(const LayoutGraph& o) const {
    return nodes == o.nodes && edges == o.edges;
  }
};

// ---------------------------------------------------------------------------
// House spec

struct HouseSpec {
  std::string description;   // the user's free-form text
  std::string style_prompt;  // diffusion prompt derived from the description
  double wall_height = 3.0;  // meters
  std::uint64_t seed = 0;

  bool operator==(const HouseSpec& o) const {
    return description == o.description && style_prompt == o.style_prompt &&
           wall_height == o.wall_height && seed == o.seed;
  }
};

// ---------------------------------------------------------------------------
// Floorplan

/// An axis-aligned wall piece on a cell boundary. `vertical` walls run along
/// y at x = `fixed`; horizontal walls run along x at y = `fixed`.
struct WallSegment {
  int room_a = -1;        // index into Floorplan::rooms
  int room_b = -1;        // second room, or -1 for exterior
  bool vertical = false;
  double fixed = 0.0;     // constant coordinate of the wall line, meters
  double lo = 0.0;        // extent along the wall axis
  double hi = 0.0;
  bool a_low_side = false;  // room_a occupies the lower-coordinate side

  double length() const { return hi - lo; }

  bool operator==(const WallSegment& o) const {
    return room_a == o.room_a && room_b == o.room_b &&
           vertical == o.vertical && fixed == o.fixed && lo == o.lo &&
           hi == o.hi && a_low_side == o.a_low_side;
  }
};

enum class DoorKind { kInterior, kFront };

struct DoorOpening {
  int room_a = -1;
  int room_b = -1;  // -1 for exterior (front doors)
  bool vertical = false;
  double fixed = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  DoorKind kind = DoorKind::kInterior;

  double width() const { return hi - lo; }

  bool operator==(const DoorOpening& o) const {
    return room_a == o.room_a && room_b == o.room_b &&
           vertical == o.vertical && fixed == o.fixed && lo == o.lo &&
           hi == o.hi && kind == o.kind;
  }
};

/// Per-room occupancy masks on a metric grid, plus derived wall segments and
/// door openings. Cell (cx, cy) covers world
/// [cx*cell_size, (cx+1)*cell_size) x [cy*cell_size, (cy+1)*cell_size).
struct Floorplan {
  double cell_size = 0.1;  // meters per cell
  int width = 0;           // cells
  int height = 0;          // cells
  std::vector<RoomId> rooms;
  std::vector<std::int16_t> grid;  // row-major, room index or -1 empty
  std::vector<WallSegment> wall_segments;
  std::vector<DoorOpening> doors;

  std::int16_t at(int cx, int cy) const {
    if (cx < 0 || cy < 0 || cx >= width || cy >= height) return -1;
    return grid[static_cast<std::size_t>(cy) * width + cx];
  }
  void set(int cx, int cy, std::int16_t v) {
    grid[static_cast<std::size_t>(cy) * width + cx] = v;
  }

  int room_index(const std::string& key) const {
    for (std::size_t i = 0; i < rooms.size(); ++i)
      if (rooms[i].key() == key) return static_cast<int>(i);
    return -1;
  }

  /// Cell indices belonging to one room, row-major order.
  std::vector<std::pair<int, int>> room_cells(int room) const {
    std::vector<std::pair<int, int>> out;
    for (int cy = 0; cy < height; ++cy)
      for (int cx = 0; cx < width; ++cx)
        if (at(cx, cy) == room) out.emplace_back(cx, cy);
    return out;
  }

  double room_area(int room) const {
    return static_cast<double>(room_cells(room).size()) * cell_size * cell_size;
  }

  /// World-space centroid of a room mask.
  Vec2 room_centroid(int room) const {
    double sx = 0, sy = 0;
    std::size_t n = 0;
    for (int cy = 0; cy < height; ++cy)
      for (int cx = 0; cx < width; ++cx)
        if (at(cx, cy) == room) {
          sx += (cx + 0.5) * cell_size;
          sy += (cy + 0.5) * cell_size;
          ++n;
        }
    if (n == 0) return {};
    return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
  }

  bool operator==(const Floorplan& o) const {
    return cell_size == o.cell_size && width == o.width &&
           height == o.height && rooms == o.rooms && grid == o.grid &&
           wall_segments == o.wall_segments && doors == o.doors;
  }
};

// ---------------------------------------------------------------------------
// Placement output

/// An oriented box realizing one layout node, with its placement provenance.
struct PlacedBox {
  std::string label;     // node name, e.g. "sofa1"
  std::string asset_id;  // catalog entry realizing the box (may be empty)
  Vec3 center;
  Vec3 half_extents;     // (l/2, w/2, h/2) in the box's local frame
  double yaw = 0.0;      // radians about +z, in [0, 2*pi)
  PlacementRule rule_used = PlacementRule::kCenter;
  std::string anchor_label;  // empty for room-relative placements
  std::vector<std::string> warnings;

  Obb2 footprint() const {
    return Obb2{{center.x, center.y}, half_extents.x, half_extents.y, yaw};
  }
  double z_bottom() const { return center.z - half_extents.z; }
  double z_top() const { return center.z + half_extents.z; }
  /// Horizontal unit vector the box front points toward. The front is the
  /// local +y axis, so the length (local x) runs laterally: a sofa against a
  /// wall keeps its long side parallel to the wall while facing the room.
  Vec2 front() const { return Vec2{0, 1}.rotated(yaw); }

  bool operator==(const PlacedBox& o) const {
    return label == o.label && asset_id == o.asset_id &&
           center.x == o.center.x && center.y == o.center.y &&
           center.z == o.center.z && half_extents.x == o.half_extents.x &&
           half_extents.y == o.half_extents.y &&
           half_extents.z == o.half_extents.z && yaw == o.yaw &&
           rule_used == o.rule_used && anchor_label == o.anchor_label &&
           warnings == o.warnings;
  }
};

// ---------------------------------------------------------------------------
// Refinement report

struct BoxAdjustment {
  std::string label;
  Vec3 translation;       // applied horizontal + vertical delta
  double yaw_delta = 0.0;
  double z_snap = 0.0;    // vertical component of the support snap

  bool operator==(const BoxAdjustment& o) const {
    return label == o.label && translation.x == o.translation.x &&
           translation.y == o.translation.y &&
           translation.z == o.translation.z && yaw_delta == o.yaw_delta &&
           z_snap == o.z_snap;
  }
};

struct RefineReport {
  std::vector<BoxAdjustment> adjustments;
  double oob_before = 0.0;
  double oob_after = 0.0;
  std::vector<std::string> unresolved;
  int iterations = 0;

  bool operator==(const RefineReport& o) const {
    return adjustments == o.adjustments && oob_before == o.oob_before &&
           oob_after == o.oob_after && unresolved == o.unresolved &&
           iterations == o.iterations;
  }
};

// ---------------------------------------------------------------------------
// Cameras

struct Intrinsics {
  double fx = 256.0;
  double fy = 256.0;
  double cx = 256.0;
  double cy = 256.0;
  int width = 512;
  int height = 512;

  bool operator==(const Intrinsics& o) const {
    return fx == o.fx && fy == o.fy && cx == o.cx && cy == o.cy &&
           width == o.width && height == o.height;
  }
};

enum class Facing { kInward, kOutward, kObject, kRandom };

inline const char* facing_name(Facing f) {
  switch (f) {
    case Facing::kInward: return "inward";
    case Facing::kOutward: return "outward";
    case Facing::kObject: return "object";
    case Facing::kRandom: return "random";
  }
  return "inward";
}

inline std::optional<Facing> facing_from_name(const std::string& s) {
  for (Facing f : {Facing::kInward, Facing::kOutward, Facing::kObject,
                   Facing::kRandom}) {
    if (s == facing_name(f)) return f;
  }
  return std::nullopt;
}

/// Camera-to-world pose. Camera frame follows the computer-vision
/// convention: x right, y down, z forward.
struct CameraPose {
  Mat3 rotation;   // camera-to-world
  Vec3 translation;  // camera center in world coordinates
  Intrinsics intrinsics;
  Facing facing = Facing::kInward;

  Vec3 forward() const { return rotation.col(2); }

  /// World-space ray direction through pixel (px, py), pixel centers.
  Vec3 pixel_ray(double px, double py) const {
    Vec3 d{(px - intrinsics.cx) / intrinsics.fx,
           (py - intrinsics.cy) / intrinsics.fy, 1.0};
    return (rotation * d).normalized();
  }

  /// Project a world point; returns false when the point is behind the
  /// camera. Outputs pixel coordinates and camera-space depth.
  bool project(const Vec3& p, double& px, double& py, double& depth) const {
    Vec3 c = rotation.transposed() * (p - translation);
    if (c.z <= 1e-9) return false;
    px = intrinsics.fx * c.x / c.z + intrinsics.cx;
    py = intrinsics.fy * c.y / c.z + intrinsics.cy;
    depth = c.z;
    return true;
  }
};

struct TrajectoryConfig {
  double camera_height = 1.5;   // meters above the floor
  double wall_distance = 0.5;   // inward offset from walls
  double pitch = deg_to_rad(-10.0);
  int inter_n = 10;             // interpolations per control-point pair
  int n_random = 20;
  std::uint64_t seed = 0;
  Intrinsics intrinsics;

  bool operator==(const TrajectoryConfig& o) const {
    return camera_height == o.camera_height &&
           wall_distance == o.wall_distance && pitch == o.pitch &&
           inter_n == o.inter_n && n_random == o.n_random && seed == o.seed &&
           intrinsics == o.intrinsics;
  }
};

// ---------------------------------------------------------------------------
// Meshes

struct Submesh {
  std::string label;
  int begin = 0;  // first face index
  int count = 0;  // number of faces

  bool operator==(const Submesh& o) const {
    return label == o.label && begin == o.begin && count == o.count;
  }
};

/// Indexed triangle mesh with per-vertex colors and labeled face ranges.
struct SceneMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Vec3> colors;  // RGB in [0,1], same length as vertices
  std::vector<Submesh> submeshes;

  bool empty() const { return faces.empty(); }

  Aabb3 bounds() const {
    Aabb3 b;
    if (vertices.empty()) return b;
    b.lo = b.hi = vertices[0];
    for (const auto& v : vertices) b.expand(v);
    return b;
  }

  /// Appends another mesh as a labeled submesh.
  void append(const SceneMesh& other, const std::string& label_prefix) {
    int vbase = static_cast<int>(vertices.size());
    int fbase = static_cast<int>(faces.size());
    vertices.insert(vertices.end(), other.vertices.begin(),
                    other.vertices.end());
    colors.insert(colors.end(), other.colors.begin(), other.colors.end());
    for (const auto& f : other.faces)
      faces.push_back({f[0] + vbase, f[1] + vbase, f[2] + vbase});
    for (const auto& s : other.submeshes) {
      submeshes.push_back(Submesh{
          label_prefix.empty() ? s.label : label_prefix + "/" + s.label,
          s.begin + fbase, s.count});
    }
    if (other.submeshes.empty() && !other.faces.empty()) {
      submeshes.push_back(Submesh{label_prefix, fbase,
                                  static_cast<int>(other.faces.size())});
    }
  }

  bool operator==(const SceneMesh& o) const {
    if (faces != o.faces || submeshes != o.submeshes) return false;
    if (vertices.size() != o.vertices.size() ||
        colors.size() != o.colors.size())
      return false;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (vertices[i].x != o.vertices[i].x ||
          vertices[i].y != o.vertices[i].y ||
          vertices[i].z != o.vertices[i].z)
        return false;
    }
    for (std::size_t i = 0; i < colors.size(); ++i) {
      if (colors[i].x != o.colors[i].x || colors[i].y != o.colors[i].y ||
          colors[i].z != o.colors[i].z)
        return false;
    }
    return true;
  }
};

/// Depth render target, meters along camera forward. 0 marks background.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depth;

  double at(int x, int y) const {
    return depth[static_cast<std::size_t>(y) * width + x];
  }
  double& at(int x, int y) {
    return depth[static_cast<std::size_t>(y) * width + x];
  }
};

// ---------------------------------------------------------------------------
// Validation

/// Violations are data, not failures: an empty report means "pass".
struct ValidationReport {
  std::vector<std::string> violations;

  bool pass() const { return violations.empty(); }
  void add(std::string v) { violations.push_back(std::move(v)); }
  std::string joined() const {
    std::string s;
    for (const auto& v : violations) {
      if (!s.empty()) s += "; ";
      s += v;
    }
    return s;
  }
};

inline ValidationReport validate_bubble_diagram(const BubbleDiagram& d) {
  ValidationReport rep;
  if (d.rooms.empty()) {
    rep.add("no rooms");
    return rep;
  }

  std::set<std::string> originals;
  std::set<std::pair<std::string, int>> canon;
  for (const auto& r : d.rooms) {
    if (!originals.insert(r.original_name).second)
      rep.add("duplicate room name '" + r.original_name + "'");
    if (!canon.insert({room_type_name(r.canonical_type), r.index}).second)
      rep.add("duplicate canonical room '" + r.key() + "'");
    if (r.index <= 0) rep.add("non-positive index for '" + r.original_name + "'");
    if (!split_indexed_name(r.original_name))
      rep.add("room name '" + r.original_name + "' does not end with an index");
  }

  std::set<std::pair<std::string, std::string>> seen_edges;
  for (const auto& [a, b] : d.connections) {
    if (a == b) {
      rep.add("self-loop on '" + a + "'");
      continue;
    }
    if (!originals.count(a)) rep.add("unknown endpoint '" + a + "'");
    if (!originals.count(b)) rep.add("unknown endpoint '" + b + "'");
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    if (!seen_edges.insert(key).second)
      rep.add("duplicate edge [" + a + ", " + b + "]");
  }

  // Reachability from the first room over valid edges.
  if (!d.rooms.empty()) {
    std::set<std::string> reached{d.rooms.front().original_name};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& [a, b] : d.connections) {
        if (reached.count(a) && originals.count(b) && !reached.count(b)) {
          reached.insert(b);
          grew = true;
        }
        if (reached.count(b) && originals.count(a) && !reached.count(a)) {
          reached.insert(a);
          grew = true;
        }
      }
    }
    if (reached.size() != originals.size()) rep.add("graph disconnected");
  }

  if (d.front_door_rooms.empty()) {
    rep.add("no front-door room");
  } else {
    for (const auto& f : d.front_door_rooms)
      if (!originals.count(f)) rep.add("unknown front-door room '" + f + "'");
  }
  return rep;
}

/// Checks a complete/modified room-list pair: positional correspondence,
/// canonical names, and per-type indices that increment from 1.
/// Throws ValidationError when the lists differ in length.
inline ValidationReport validate_room_mapping(
    const std::vector<std::string>& complete,
    const std::vector<std::string>& modified) {
  if (complete.size() != modified.size())
    throw ValidationError("room list length mismatch: complete has " +
                          std::to_string(complete.size()) +
                          " entries, modified has " +
                          std::to_string(modified.size()));
  ValidationReport rep;
  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < modified.size(); ++i) {
    auto split = split_indexed_name(modified[i]);
    if (!split) {
      rep.add("entry '" + modified[i] + "' does not end with an index");
      continue;
    }
    auto [base, idx] = *split;
    if (!room_type_from_name(base)) {
      rep.add("'" + base + "' is not a canonical room type");
      continue;
    }
    int expected = counts[base] + 1;
    if (idx != expected) {
      rep.add("index must increment to " + base + std::to_string(expected) +
              " (got '" + modified[i] + "')");
    }
    counts[base] = expected;
    if (!split_indexed_name(complete[i]))
      rep.add("original '" + complete[i] + "' does not end with an index");
  }
  return rep;
}

/// Builds RoomIds from a validated complete/modified pair.
inline std::vector<RoomId> make_room_ids(
    const std::vector<std::string>& complete,
    const std::vector<std::string>& modified) {
  if (complete.size() != modified.size())
    throw ValidationError("room list length mismatch");
  std::vector<RoomId> out;
  out.reserve(complete.size());
  for (std::size_t i = 0; i < complete.size(); ++i) {
    auto split = split_indexed_name(modified[i]);
    if (!split) throw ValidationError("bad canonical room '" + modified[i] + "'");
    auto type = room_type_from_name(split->first);
    if (!type)
      throw ValidationError("'" + split->first +
                            "' is not a canonical room type");
    out.push_back(RoomId{complete[i], *type, split->second});
  }
  return out;
}

inline ValidationReport validate_layout_graph(const LayoutGraph& g) {
  ValidationReport rep;
  std::set<std::string> names;
  for (const auto& n : g.nodes) {
    if (!names.insert(n.name).second)
      rep.add("duplicate node '" + n.name + "'");
    if (!(n.length > 0.0) || !std::isfinite(n.length) || !(n.width > 0.0) ||
        !std::isfinite(n.width))
      rep.add("non-positive footprint for '" + n.name + "'");
  }

  std::map<std::string, std::string> parent;
  std::set<std::string> children_seen;
  for (const auto& e : g.edges) {
    if (!names.count(e.child)) rep.add("relation child '" + e.child + "' is not a node");
    if (!e.anchor.empty() && !names.count(e.anchor))
      rep.add("dangling anchor '" + e.anchor + "' for '" + e.child + "'");
    if (!children_seen.insert(e.child).second)
      rep.add("multiple relations for '" + e.child + "'");
    if (e.anchor.empty() && !is_room_relative_rule(e.rule))
      rep.add("rule " + std::string(placement_rule_name(e.rule)) +
              " on '" + e.child + "' requires an anchor");
    if (!e.anchor.empty() && e.anchor == e.child)
      rep.add("self-anchoring '" + e.child + "'");
    if (!e.anchor.empty()) parent[e.child] = e.anchor;
  }

  // The anchor relation must be a forest.
  for (const auto& [start, _] : parent) {
    std::set<std::string> path;
    std::string cur = start;
    while (parent.count(cur)) {
      if (!path.insert(cur).second) {
        rep.add("anchor cycle through '" + start + "'");
        break;
      }
      cur = parent[cur];
    }
  }
  return rep;
}

}  // namespace homegen
