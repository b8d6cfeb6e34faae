#pragma once

// JSON (de)serialization for the data model, canonical text form, and the
// content hash built on it. Parsing is strict: missing or mistyped fields
// raise ParseError with a field path. The one deliberately lenient entry
// point is parse_relaxed_json, which accepts common LLM output damage
// (code fences, trailing commas) and nothing else.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "homegen/error.hpp"
#include "homegen/fsutil.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Content hashing

/// FNV-1a, 64-bit. Stable across platforms; used for manifest content hashes
/// and offline fixture keys.
inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t h = 14695981039346656037ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

/// Canonical textual form: object keys sorted (nlohmann's default map
/// ordering), shortest round-trip number formatting, no whitespace.
inline std::string canonical_dump(const Json& j) { return j.dump(); }

inline std::string content_hash(const Json& j) {
  return hex64(fnv1a64(canonical_dump(j)));
}

// ---------------------------------------------------------------------------
// JSON files

inline Json parse_json_file(const fs::path& path) {
  std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

inline void write_json_file(const fs::path& path, const Json& j) {
  write_text_file_atomic(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Strict field access

namespace jio {

inline const Json& member(const Json& j, const char* key) {
  if (!j.is_object())
    throw ParseError(std::string("expected object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

inline std::string get_string(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_string())
    throw ParseError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

inline double get_number(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_number())
    throw ParseError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline std::int64_t get_int(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_number_integer())
    throw ParseError(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

inline bool get_bool(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_boolean())
    throw ParseError(std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

inline const Json& get_array(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_array())
    throw ParseError(std::string("field '") + key + "' must be an array");
  return v;
}

inline const Json& get_object(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_object())
    throw ParseError(std::string("field '") + key + "' must be an object");
  return v;
}

inline Vec3 vec3_from(const Json& v, const char* what) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
      !v[1].is_number() || !v[2].is_number())
    throw ParseError(std::string(what) + " must be [x, y, z]");
  return Vec3{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

inline Json vec3_to(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

}  // namespace jio

// ---------------------------------------------------------------------------
// Relaxed parsing for model output

/// Strips a leading/trailing Markdown code fence, if present.
inline std::string strip_code_fence(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return text;
  if (text.compare(begin, 3, "```") != 0) return text;
  std::size_t line_end = text.find('\n', begin);
  if (line_end == std::string::npos) return text;
  std::size_t close = text.rfind("```");
  if (close == std::string::npos || close <= line_end) return text;
  return text.substr(line_end + 1, close - line_end - 1);
}

/// Removes commas that directly precede a closing bracket or brace,
/// outside of string literals.
inline std::string strip_trailing_commas(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      out.push_back(c);
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.push_back(c);
      continue;
    }
    if (c == ',') {
      std::size_t k = i + 1;
      while (k < text.size() &&
             (text[k] == ' ' || text[k] == '\t' || text[k] == '\r' ||
              text[k] == '\n'))
        ++k;
      if (k < text.size() && (text[k] == ']' || text[k] == '}')) continue;
    }
    out.push_back(c);
  }
  return out;
}

/// Parses model output: exact JSON first, then fence-stripped, then with
/// trailing commas removed. Anything still malformed raises ParseError.
inline Json parse_relaxed_json(const std::string& text) {
  auto attempt = [](const std::string& s) -> std::optional<Json> {
    Json j = Json::parse(s, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
  };
  if (auto j = attempt(text)) return *j;
  std::string stripped = strip_code_fence(text);
  if (auto j = attempt(stripped)) return *j;
  if (auto j = attempt(strip_trailing_commas(stripped))) return *j;
  throw ParseError("malformed JSON in model response");
}

// ---------------------------------------------------------------------------
// HouseSpec

inline Json house_spec_to_json(const HouseSpec& s) {
  Json j;
  j["description"] = s.description;
  j["style_prompt"] = s.style_prompt;
  j["wall_height"] = s.wall_height;
  j["seed"] = s.seed;
  return j;
}

inline HouseSpec house_spec_from_json(const Json& j) {
  HouseSpec s;
  s.description = jio::get_string(j, "description");
  s.style_prompt = jio::get_string(j, "style_prompt");
  s.wall_height = jio::get_number(j, "wall_height");
  if (!(s.wall_height > 0))
    throw ParseError("wall_height must be positive");
  const Json& seed = jio::member(j, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer())
    throw ParseError("field 'seed' must be an integer");
  s.seed = seed.get<std::uint64_t>();
  return s;
}

// ---------------------------------------------------------------------------
// BubbleDiagram

inline Json diagram_to_json(const BubbleDiagram& d) {
  Json j;
  Json complete = Json::array();
  Json modified = Json::array();
  for (const auto& r : d.rooms) {
    complete.push_back(r.original_name);
    modified.push_back(r.key());
  }
  j["complete_room_list"] = std::move(complete);
  j["modified_room_list"] = std::move(modified);
  Json conn = Json::array();
  for (const auto& [a, b] : d.connections) conn.push_back(Json::array({a, b}));
  j["connection"] = std::move(conn);
  j["front_door"] = d.front_door_rooms;
  return j;
}

inline BubbleDiagram diagram_from_json(const Json& j) {
  BubbleDiagram d;
  const Json& complete = jio::get_array(j, "complete_room_list");
  const Json& modified = jio::get_array(j, "modified_room_list");
  std::vector<std::string> cl, ml;
  for (const auto& v : complete) {
    if (!v.is_string()) throw ParseError("complete_room_list entries must be strings");
    cl.push_back(v.get<std::string>());
  }
  for (const auto& v : modified) {
    if (!v.is_string()) throw ParseError("modified_room_list entries must be strings");
    ml.push_back(v.get<std::string>());
  }
  d.rooms = make_room_ids(cl, ml);
  for (const auto& e : jio::get_array(j, "connection")) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      throw ParseError("connection entries must be [room, room]");
    d.connections.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  for (const auto& f : jio::get_array(j, "front_door")) {
    if (!f.is_string()) throw ParseError("front_door entries must be strings");
    d.front_door_rooms.push_back(f.get<std::string>());
  }
  return d;
}

// ---------------------------------------------------------------------------
// LayoutGraph

inline Json layout_graph_to_json(const LayoutGraph& g) {
  Json j;
  Json desc = Json::object();
  Json sizes = Json::object();
  Json heights = Json::object();
  Json assets = Json::object();
  for (const auto& n : g.nodes) {
    desc[n.name] = n.description;
    sizes[n.name] = Json::array({n.length, n.width});
    if (n.height > 0) heights[n.name] = n.height;
    if (!n.asset_id.empty()) assets[n.name] = n.asset_id;
  }
  j["furniture_descriptions"] = std::move(desc);
  j["furniture_sizes"] = std::move(sizes);
  j["furniture_heights"] = std::move(heights);
  j["furniture_assets"] = std::move(assets);
  Json rel = Json::array();
  for (const auto& e : g.edges)
    rel.push_back(Json::array({e.child, placement_rule_name(e.rule), e.anchor}));
  j["furniture_relations"] = std::move(rel);
  return j;
}

inline LayoutGraph layout_graph_from_json(const Json& j) {
  LayoutGraph g;
  const Json& desc = jio::get_object(j, "furniture_descriptions");
  const Json& sizes = jio::get_object(j, "furniture_sizes");
  const Json* heights = nullptr;
  const Json* assets = nullptr;
  if (auto it = j.find("furniture_heights"); it != j.end() && it->is_object())
    heights = &*it;
  if (auto it = j.find("furniture_assets"); it != j.end() && it->is_object())
    assets = &*it;

  for (auto it = desc.begin(); it != desc.end(); ++it) {
    FurnitureNode n;
    n.name = it.key();
    if (!it.value().is_string())
      throw ParseError("description for '" + n.name + "' must be a string");
    n.description = it.value().get<std::string>();
    auto sz = sizes.find(n.name);
    if (sz == sizes.end())
      throw ParseError("missing size for '" + n.name + "'");
    const Json& s = *sz;
    if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
      throw ParseError("size for '" + n.name + "' must be [length, width]");
    n.length = s[0].get<double>();
    n.width = s[1].get<double>();
    if (heights) {
      if (auto h = heights->find(n.name); h != heights->end()) {
        if (!h->is_number())
          throw ParseError("height for '" + n.name + "' must be a number");
        n.height = h->get<double>();
      }
    }
    if (assets) {
      if (auto a = assets->find(n.name); a != assets->end()) {
        if (!a->is_string())
          throw ParseError("asset for '" + n.name + "' must be a string");
        n.asset_id = a->get<std::string>();
      }
    }
    g.nodes.push_back(std::move(n));
  }
  for (auto it = sizes.begin(); it != sizes.end(); ++it) {
    if (!g.find_node(it.key()))
      throw ParseError("size given for unknown item '" + it.key() + "'");
  }
  for (const auto& e : jio::get_array(j, "furniture_relations")) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_string() ||
        !e[1].is_string() || !e[2].is_string())
      throw ParseError("relations must be [child, rule, anchor]");
    LayoutEdge edge;
    edge.child = e[0].get<std::string>();
    auto rule = placement_rule_from_name(e[1].get<std::string>());
    if (!rule)
      throw ParseError("unknown placement rule '" + e[1].get<std::string>() + "'");
    edge.rule = *rule;
    edge.anchor = e[2].get<std::string>();
    g.edges.push_back(std::move(edge));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Floorplan

inline Json floorplan_to_json(const Floorplan& f) {
  Json j;
  j["cell_size"] = f.cell_size;
  j["width"] = f.width;
  j["height"] = f.height;
  Json rooms = Json::array();
  for (const auto& r : f.rooms) {
    Json rv;
    rv["original_name"] = r.original_name;
    rv["type"] = room_type_name(r.canonical_type);
    rv["index"] = r.index;
    rooms.push_back(std::move(rv));
  }
  j["rooms"] = std::move(rooms);

  // Row-major run-length encoding of the grid.
  Json rle = Json::array();
  std::size_t i = 0;
  const std::size_t n = f.grid.size();
  while (i < n) {
    std::size_t k = i;
    while (k < n && f.grid[k] == f.grid[i]) ++k;
    rle.push_back(Json::array({static_cast<int>(f.grid[i]),
                               static_cast<std::uint64_t>(k - i)}));
    i = k;
  }
  j["grid_rle"] = std::move(rle);

  Json walls = Json::array();
  for (const auto& w : f.wall_segments) {
    Json wv;
    wv["room_a"] = w.room_a;
    wv["room_b"] = w.room_b;
    wv["vertical"] = w.vertical;
    wv["fixed"] = w.fixed;
    wv["lo"] = w.lo;
    wv["hi"] = w.hi;
    wv["a_low_side"] = w.a_low_side;
    walls.push_back(std::move(wv));
  }
  j["wall_segments"] = std::move(walls);

  Json doors = Json::array();
  for (const auto& d : f.doors) {
    Json dv;
    dv["room_a"] = d.room_a;
    dv["room_b"] = d.room_b;
    dv["vertical"] = d.vertical;
    dv["fixed"] = d.fixed;
    dv["lo"] = d.lo;
    dv["hi"] = d.hi;
    dv["kind"] = d.kind == DoorKind::kFront ? "front" : "interior";
    doors.push_back(std::move(dv));
  }
  j["doors"] = std::move(doors);
  return j;
}

inline Floorplan floorplan_from_json(const Json& j) {
  Floorplan f;
  f.cell_size = jio::get_number(j, "cell_size");
  if (!(f.cell_size > 0)) throw ParseError("cell_size must be positive");
  f.width = static_cast<int>(jio::get_int(j, "width"));
  f.height = static_cast<int>(jio::get_int(j, "height"));
  if (f.width < 0 || f.height < 0)
    throw ParseError("grid dimensions must be non-negative");
  for (const auto& rv : jio::get_array(j, "rooms")) {
    RoomId r;
    r.original_name = jio::get_string(rv, "original_name");
    auto t = room_type_from_name(jio::get_string(rv, "type"));
    if (!t) throw ParseError("unknown room type in floorplan");
    r.canonical_type = *t;
    r.index = static_cast<int>(jio::get_int(rv, "index"));
    f.rooms.push_back(std::move(r));
  }
  const std::size_t total =
      static_cast<std::size_t>(f.width) * static_cast<std::size_t>(f.height);
  f.grid.reserve(total);
  for (const auto& run : jio::get_array(j, "grid_rle")) {
    if (!run.is_array() || run.size() != 2 || !run[0].is_number_integer() ||
        !run[1].is_number_integer())
      throw ParseError("grid_rle entries must be [value, count]");
    auto value = run[0].get<int>();
    auto count = run[1].get<std::int64_t>();
    if (count <= 0) throw ParseError("grid_rle count must be positive");
    if (value < -1 || value >= static_cast<int>(f.rooms.size()))
      throw ParseError("grid_rle value out of range");
    if (f.grid.size() + static_cast<std::size_t>(count) > total)
      throw ParseError("grid_rle overflows grid");
    f.grid.insert(f.grid.end(), static_cast<std::size_t>(count),
                  static_cast<std::int16_t>(value));
  }
  if (f.grid.size() != total) throw ParseError("grid_rle underfills grid");

  for (const auto& wv : jio::get_array(j, "wall_segments")) {
    WallSegment w;
    w.room_a = static_cast<int>(jio::get_int(wv, "room_a"));
    w.room_b = static_cast<int>(jio::get_int(wv, "room_b"));
    w.vertical = jio::get_bool(wv, "vertical");
    w.fixed = jio::get_number(wv, "fixed");
    w.lo = jio::get_number(wv, "lo");
    w.hi = jio::get_number(wv, "hi");
    w.a_low_side = jio::get_bool(wv, "a_low_side");
    if (!(w.hi > w.lo)) throw ParseError("wall segment extent must be positive");
    f.wall_segments.push_back(w);
  }
  for (const auto& dv : jio::get_array(j, "doors")) {
    DoorOpening d;
    d.room_a = static_cast<int>(jio::get_int(dv, "room_a"));
    d.room_b = static_cast<int>(jio::get_int(dv, "room_b"));
    d.vertical = jio::get_bool(dv, "vertical");
    d.fixed = jio::get_number(dv, "fixed");
    d.lo = jio::get_number(dv, "lo");
    d.hi = jio::get_number(dv, "hi");
    std::string kind = jio::get_string(dv, "kind");
    if (kind == "front") {
      d.kind = DoorKind::kFront;
    } else if (kind == "interior") {
      d.kind = DoorKind::kInterior;
    } else {
      throw ParseError("door kind must be 'interior' or 'front'");
    }
    f.doors.push_back(d);
  }
  return f;
}

// ---------------------------------------------------------------------------
// PlacedBox / RefineReport

inline Json placed_box_to_json(const PlacedBox& b) {
  Json j;
  j["label"] = b.label;
  j["asset"] = b.asset_id;
  j["center"] = jio::vec3_to(b.center);
  j["half_extents"] = jio::vec3_to(b.half_extents);
  j["yaw"] = b.yaw;
  j["rule"] = placement_rule_name(b.rule_used);
  j["anchor"] = b.anchor_label;
  j["warnings"] = b.warnings;
  return j;
}

inline PlacedBox placed_box_from_json(const Json& j) {
  PlacedBox b;
  b.label = jio::get_string(j, "label");
  b.asset_id = jio::get_string(j, "asset");
  b.center = jio::vec3_from(jio::member(j, "center"), "center");
  b.half_extents =
      jio::vec3_from(jio::member(j, "half_extents"), "half_extents");
  if (!(b.half_extents.x > 0) || !(b.half_extents.y > 0) ||
      !(b.half_extents.z > 0))
    throw ParseError("half_extents must be positive");
  b.yaw = jio::get_number(j, "yaw");
  auto rule = placement_rule_from_name(jio::get_string(j, "rule"));
  if (!rule) throw ParseError("unknown placement rule in placed box");
  b.rule_used = *rule;
  b.anchor_label = jio::get_string(j, "anchor");
  for (const auto& w : jio::get_array(j, "warnings")) {
    if (!w.is_string()) throw ParseError("warnings must be strings");
    b.warnings.push_back(w.get<std::string>());
  }
  return b;
}

inline Json refine_report_to_json(const RefineReport& r) {
  Json j;
  Json adj = Json::array();
  for (const auto& a : r.adjustments) {
    Json av;
    av["label"] = a.label;
    av["translation"] = jio::vec3_to(a.translation);
    av["yaw_delta"] = a.yaw_delta;
    av["z_snap"] = a.z_snap;
    adj.push_back(std::move(av));
  }
  j["adjustments"] = std::move(adj);
  j["oob_before"] = r.oob_before;
  j["oob_after"] = r.oob_after;
  j["unresolved"] = r.unresolved;
  j["iterations"] = r.iterations;
  return j;
}

inline RefineReport refine_report_from_json(const Json& j) {
  RefineReport r;
  for (const auto& av : jio::get_array(j, "adjustments")) {
    BoxAdjustment a;
    a.label = jio::get_string(av, "label");
    a.translation = jio::vec3_from(jio::member(av, "translation"), "translation");
    a.yaw_delta = jio::get_number(av, "yaw_delta");
    a.z_snap = jio::get_number(av, "z_snap");
    r.adjustments.push_back(std::move(a));
  }
  r.oob_before = jio::get_number(j, "oob_before");
  r.oob_after = jio::get_number(j, "oob_after");
  for (const auto& u : jio::get_array(j, "unresolved")) {
    if (!u.is_string()) throw ParseError("unresolved entries must be strings");
    r.unresolved.push_back(u.get<std::string>());
  }
  r.iterations = static_cast<int>(jio::get_int(j, "iterations"));
  return r;
}

// ---------------------------------------------------------------------------
// Cameras

inline Json intrinsics_to_json(const Intrinsics& k) {
  Json j;
  j["fx"] = k.fx;
  j["fy"] = k.fy;
  j["cx"] = k.cx;
  j["cy"] = k.cy;
  j["width"] = k.width;
  j["height"] = k.height;
  return j;
}

inline Intrinsics intrinsics_from_json(const Json& j) {
  Intrinsics k;
  k.fx = jio::get_number(j, "fx");
  k.fy = jio::get_number(j, "fy");
  k.cx = jio::get_number(j, "cx");
  k.cy = jio::get_number(j, "cy");
  k.width = static_cast<int>(jio::get_int(j, "width"));
  k.height = static_cast<int>(jio::get_int(j, "height"));
  if (!(k.fx > 0) || !(k.fy > 0) || k.width <= 0 || k.height <= 0)
    throw ParseError("invalid intrinsics");
  return k;
}

inline Json camera_pose_to_json(const CameraPose& p) {
  Json j;
  Json r = Json::array();
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) r.push_back(p.rotation.m[row][col]);
  j["rotation"] = std::move(r);
  j["translation"] = jio::vec3_to(p.translation);
  j["intrinsics"] = intrinsics_to_json(p.intrinsics);
  j["facing"] = facing_name(p.facing);
  return j;
}

inline CameraPose camera_pose_from_json(const Json& j) {
  CameraPose p;
  const Json& r = jio::get_array(j, "rotation");
  if (r.size() != 9) throw ParseError("rotation must hold 9 numbers");
  for (int i = 0; i < 9; ++i) {
    if (!r[i].is_number()) throw ParseError("rotation must hold 9 numbers");
    p.rotation.m[i / 3][i % 3] = r[i].get<double>();
  }
  p.translation = jio::vec3_from(jio::member(j, "translation"), "translation");
  p.intrinsics = intrinsics_from_json(jio::get_object(j, "intrinsics"));
  auto f = facing_from_name(jio::get_string(j, "facing"));
  if (!f) throw ParseError("unknown facing");
  p.facing = *f;
  return p;
}

inline Json trajectory_config_to_json(const TrajectoryConfig& c) {
  Json j;
  j["camera_height"] = c.camera_height;
  j["wall_distance"] = c.wall_distance;
  j["pitch"] = c.pitch;
  j["inter_n"] = c.inter_n;
  j["n_random"] = c.n_random;
  j["seed"] = c.seed;
  j["intrinsics"] = intrinsics_to_json(c.intrinsics);
  return j;
}

inline TrajectoryConfig trajectory_config_from_json(const Json& j) {
  TrajectoryConfig c;
  c.camera_height = jio::get_number(j, "camera_height");
  c.wall_distance = jio::get_number(j, "wall_distance");
  c.pitch = jio::get_number(j, "pitch");
  c.inter_n = static_cast<int>(jio::get_int(j, "inter_n"));
  c.n_random = static_cast<int>(jio::get_int(j, "n_random"));
  if (c.inter_n < 1) throw ParseError("inter_n must be at least 1");
  if (c.n_random < 0) throw ParseError("n_random must be non-negative");
  const Json& seed = jio::member(j, "seed");
  if (!seed.is_number_integer() && !seed.is_number_unsigned())
    throw ParseError("field 'seed' must be an integer");
  c.seed = seed.get<std::uint64_t>();
  c.intrinsics = intrinsics_from_json(jio::get_object(j, "intrinsics"));
  return c;
}

// ---------------------------------------------------------------------------
// Mesh

inline Json mesh_to_json(const SceneMesh& m) {
  Json j;
  Json verts = Json::array();
  for (const auto& v : m.vertices) verts.push_back(jio::vec3_to(v));
  j["vertices"] = std::move(verts);
  Json faces = Json::array();
  for (const auto& f : m.faces) faces.push_back(Json::array({f[0], f[1], f[2]}));
  j["faces"] = std::move(faces);
  Json colors = Json::array();
  for (const auto& c : m.colors) colors.push_back(jio::vec3_to(c));
  j["colors"] = std::move(colors);
  Json subs = Json::array();
  for (const auto& s : m.submeshes) {
    Json sv;
    sv["label"] = s.label;
    sv["begin"] = s.begin;
    sv["count"] = s.count;
    subs.push_back(std::move(sv));
  }
  j["submeshes"] = std::move(subs);
  return j;
}

inline SceneMesh mesh_from_json(const Json& j) {
  SceneMesh m;
  for (const auto& v : jio::get_array(j, "vertices"))
    m.vertices.push_back(jio::vec3_from(v, "vertex"));
  const int nv = static_cast<int>(m.vertices.size());
  for (const auto& f : jio::get_array(j, "faces")) {
    if (!f.is_array() || f.size() != 3 || !f[0].is_number_integer() ||
        !f[1].is_number_integer() || !f[2].is_number_integer())
      throw ParseError("faces must be [a, b, c]");
    std::array<int, 3> face{f[0].get<int>(), f[1].get<int>(), f[2].get<int>()};
    for (int idx : face)
      if (idx < 0 || idx >= nv) throw ParseError("face index out of range");
    m.faces.push_back(face);
  }
  for (const auto& c : jio::get_array(j, "colors"))
    m.colors.push_back(jio::vec3_from(c, "color"));
  if (m.colors.size() != m.vertices.size())
    throw ParseError("colors must match vertices");
  const int nf = static_cast<int>(m.faces.size());
  for (const auto& sv : jio::get_array(j, "submeshes")) {
    Submesh s;
    s.label = jio::get_string(sv, "label");
    s.begin = static_cast<int>(jio::get_int(sv, "begin"));
    s.count = static_cast<int>(jio::get_int(sv, "count"));
    if (s.begin < 0 || s.count < 0 || s.begin + s.count > nf)
      throw ParseError("submesh range out of bounds");
    m.submeshes.push_back(std::move(s));
  }
  return m;
}

}  // namespace homegen
