#pragma once

// Asset catalog and retrieval: rank entries against furniture descriptions
// via precomputed embeddings (cosine) or token overlap (Jaccard fallback),
// fit retrieved meshes to placed boxes, and assemble the full scene mesh.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homegen/error.hpp"
#include "homegen/floorplan.hpp"
#include "homegen/geometry.hpp"
#include "homegen/json_io.hpp"
#include "homegen/mesh_io.hpp"
#include "homegen/rng.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {

struct AssetEntry {
  std::string id;
  std::string description;
  std::vector<double> embedding;  // empty = absent
  std::string mesh;               // "primitive:<kind>" or path relative to catalog
  Vec3 dims;                      // native (length, width, height), meters
  std::string category;
};

struct AssetCatalog {
  std::vector<AssetEntry> entries;
  std::string base_dir;  // directory of the catalog file; "" for builtin

  const AssetEntry* find(const std::string& id) const {
    for (const auto& e : entries)
      if (e.id == id) return &e;
    return nullptr;
  }
};

namespace detail_assets {

inline void validate_entries(const std::vector<AssetEntry>& entries) {
  std::set<std::string> ids;
  std::size_t embed_dim = 0;
  for (const auto& e : entries) {
    if (e.id.empty()) throw ValidationError("catalog entry with empty id");
    if (!ids.insert(e.id).second)
      throw ValidationError("duplicate catalog id '" + e.id + "'");
    if (!(e.dims.x > 0 && e.dims.y > 0 && e.dims.z > 0))
      throw ValidationError("catalog entry '" + e.id + "' has non-positive dims");
    if (!e.embedding.empty()) {
      if (embed_dim == 0) embed_dim = e.embedding.size();
      if (e.embedding.size() != embed_dim)
        throw ValidationError("catalog entry '" + e.id +
                              "' embedding dimension mismatch");
    }
  }
}

inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline double jaccard(const std::string& a, const std::string& b) {
  auto ta = tokenize(a), tb = tokenize(b);
  std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na < 1e-24 || nb < 1e-24) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Stand-in for an offline text embedder: a deterministic token-hash vector.
/// Only used to pregenerate the bundled catalog; real catalogs ship vectors
/// from an actual embedding model.
inline std::vector<double> pseudo_embedding(const std::string& text, int dim = 16) {
  std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
  for (const auto& tok : tokenize(text)) {
    Rng rng(fnv1a64(tok));
    for (int i = 0; i < dim; ++i) v[i] += rng.uniform(-1.0, 1.0);
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 1e-12)
    for (double& x : v) x /= norm;
  return v;
}

}  // namespace detail_assets

// ---------------------------------------------------------------------------
// Catalog I/O (JSON lines, one entry per line)

inline AssetCatalog load_catalog(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open catalog '" + path + "'");
  AssetCatalog cat;
  auto slash = path.find_last_of('/');
  cat.base_dir = slash == std::string::npos ? "." : path.substr(0, slash);
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("catalog line " + std::to_string(line_no) + ": " +
                            e.what());
    }
    try {
      AssetEntry e;
      e.id = j.at("id").get<std::string>();
      e.description = j.at("description").get<std::string>();
      if (j.contains("embedding"))
        e.embedding = j.at("embedding").get<std::vector<double>>();
      e.mesh = j.at("mesh").get<std::string>();
      auto d = j.at("dims");
      e.dims = Vec3{d.at(0).get<double>(), d.at(1).get<double>(),
                    d.at(2).get<double>()};
      e.category = j.value("category", std::string());
      cat.entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("catalog line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  detail_assets::validate_entries(cat.entries);
  return cat;
}

inline void save_catalog(const AssetCatalog& cat, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& e : cat.entries) {
    nlohmann::json j;
    j["id"] = e.id;
    j["description"] = e.description;
    if (!e.embedding.empty()) j["embedding"] = e.embedding;
    j["mesh"] = e.mesh;
    j["dims"] = {e.dims.x, e.dims.y, e.dims.z};
    j["category"] = e.category;
    file << j.dump() << '\n';
  }
  if (!file) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Retrieval

struct ScoredAsset {
  std::string id;
  double score = 0.0;
};

namespace detail_assets {

inline std::vector<ScoredAsset> rank(const AssetCatalog& catalog, int k,
                                     const std::function<double(const AssetEntry&)>& score) {
  if (catalog.entries.empty()) throw ValidationError("empty asset catalog");
  if (k < 1) throw ValidationError("retrieval k must be >= 1");
  std::vector<ScoredAsset> out;
  out.reserve(catalog.entries.size());
  for (const auto& e : catalog.entries) out.push_back({e.id, score(e)});
  std::sort(out.begin(), out.end(), [](const ScoredAsset& a, const ScoredAsset& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  if (static_cast<int>(out.size()) > k) out.resize(static_cast<std::size_t>(k));
  return out;
}

}  // namespace detail_assets

/// Embedding query: descending cosine similarity. Entries without an
/// embedding (or with a dimension mismatch) score 0.
inline std::vector<ScoredAsset> retrieve(const std::vector<double>& query,
                                         const AssetCatalog& catalog, int k) {
  return detail_assets::rank(catalog, k, [&query](const AssetEntry& e) {
    return detail_assets::cosine(query, e.embedding);
  });
}

/// Text query: descending Jaccard token overlap against descriptions.
inline std::vector<ScoredAsset> retrieve(const std::string& query,
                                         const AssetCatalog& catalog, int k) {
  return detail_assets::rank(catalog, k, [&query](const AssetEntry& e) {
    return detail_assets::jaccard(query, e.description);
  });
}

// ---------------------------------------------------------------------------
// Fitting

struct AssetTransform {
  Vec3 scale{1, 1, 1};
  double yaw = 0.0;
  Vec3 translation;
  std::vector<std::string> warnings;
};

/// Non-uniform scale mapping native dims onto the box extents; yaw and
/// translation come from the box. Aspect mismatch beyond 3x is flagged.
inline AssetTransform fit_asset(const AssetEntry& entry, const PlacedBox& box) {
  if (!(entry.dims.x > 0 && entry.dims.y > 0 && entry.dims.z > 0))
    throw ValidationError("asset '" + entry.id + "' has non-positive dims");
  AssetTransform t;
  t.scale = Vec3{2.0 * box.half_extents.x / entry.dims.x,
                 2.0 * box.half_extents.y / entry.dims.y,
                 2.0 * box.half_extents.z / entry.dims.z};
  t.yaw = box.yaw;
  t.translation = box.center;
  double lo = std::min({t.scale.x, t.scale.y, t.scale.z});
  double hi = std::max({t.scale.x, t.scale.y, t.scale.z});
  if (lo > 0 && hi / lo > 3.0) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "distortion: scale ratio %.2f", hi / lo);
    t.warnings.emplace_back(buf);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Parametric primitive meshes. All generators produce a mesh centered at the
// origin whose AABB equals exactly (l, w, h); local front is +y.

namespace detail_assets {

inline void push_box(SceneMesh& m, Vec3 lo, Vec3 hi, Vec3 color) {
  int b = static_cast<int>(m.vertices.size());
  const Vec3 v[8] = {{lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z},
                     {lo.x, hi.y, lo.z}, {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z},
                     {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
  for (const auto& p : v) {
    m.vertices.push_back(p);
    m.colors.push_back(color);
  }
  const int f[12][3] = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7},
                        {0, 1, 5}, {0, 5, 4}, {2, 3, 7}, {2, 7, 6},
                        {0, 4, 7}, {0, 7, 3}, {1, 2, 6}, {1, 6, 5}};
  for (const auto& t : f) m.faces.push_back({b + t[0], b + t[1], b + t[2]});
}

/// Elliptic cylinder, z axis, segment count divisible by 4 so the AABB is
/// exactly (2rx, 2ry, h).
inline void push_cylinder(SceneMesh& m, Vec3 center, double rx, double ry,
                          double z0, double z1, Vec3 color, int n = 16) {
  int b = static_cast<int>(m.vertices.size());
  for (int ring = 0; ring < 2; ++ring) {
    double z = ring == 0 ? z0 : z1;
    for (int k = 0; k < n; ++k) {
      double th = 2.0 * kPi * k / n;
      m.vertices.push_back(
          {center.x + rx * std::cos(th), center.y + ry * std::sin(th), z});
      m.colors.push_back(color);
    }
  }
  int cb = static_cast<int>(m.vertices.size());
  m.vertices.push_back({center.x, center.y, z0});
  m.colors.push_back(color);
  m.vertices.push_back({center.x, center.y, z1});
  m.colors.push_back(color);
  for (int k = 0; k < n; ++k) {
    int k1 = (k + 1) % n;
    m.faces.push_back({b + k, b + k1, b + n + k1});
    m.faces.push_back({b + k, b + n + k1, b + n + k});
    m.faces.push_back({cb, b + k1, b + k});          // bottom cap, -z out
    m.faces.push_back({cb + 1, b + n + k, b + n + k1});  // top cap, +z out
  }
}

/// Elliptic UV sphere; even ring count keeps an equator ring and segment
/// count divisible by 4 keeps axis-aligned extremes, so the AABB is exact.
inline void push_sphere(SceneMesh& m, Vec3 center, Vec3 radii, Vec3 color,
                        int rings = 8, int segs = 16) {
  int north = static_cast<int>(m.vertices.size());
  m.vertices.push_back({center.x, center.y, center.z + radii.z});
  m.colors.push_back(color);
  int rows = rings - 1;
  int base = north + 1;
  for (int i = 1; i < rings; ++i) {
    double phi = kPi * i / rings;
    for (int k = 0; k < segs; ++k) {
      double th = 2.0 * kPi * k / segs;
      m.vertices.push_back({center.x + radii.x * std::sin(phi) * std::cos(th),
                            center.y + radii.y * std::sin(phi) * std::sin(th),
                            center.z + radii.z * std::cos(phi)});
      m.colors.push_back(color);
    }
  }
  int south = static_cast<int>(m.vertices.size());
  m.vertices.push_back({center.x, center.y, center.z - radii.z});
  m.colors.push_back(color);
  auto rv = [&](int row, int k) { return base + row * segs + (k % segs); };
  for (int k = 0; k < segs; ++k) {
    m.faces.push_back({north, rv(0, k), rv(0, k + 1)});
    m.faces.push_back({south, rv(rows - 1, k + 1), rv(rows - 1, k)});
  }
  for (int i = 0; i + 1 < rows; ++i)
    for (int k = 0; k < segs; ++k) {
      m.faces.push_back({rv(i, k), rv(i + 1, k), rv(i + 1, k + 1)});
      m.faces.push_back({rv(i, k), rv(i + 1, k + 1), rv(i, k + 1)});
    }
}

}  // namespace detail_assets

/// Builds a parametric primitive with AABB exactly (l, w, h), centered at the
/// origin. Unknown kinds fall back to a plain box.
inline SceneMesh make_primitive_mesh(const std::string& kind, Vec3 dims,
                                     Vec3 color) {
  using detail_assets::push_box;
  using detail_assets::push_cylinder;
  using detail_assets::push_sphere;
  const double l = dims.x, w = dims.y, h = dims.z;
  const double x = l / 2, y = w / 2, z = h / 2;
  SceneMesh m;
  if (kind == "cylinder") {
    push_cylinder(m, {0, 0, 0}, x, y, -z, z, color);
  } else if (kind == "sphere") {
    push_sphere(m, {0, 0, 0}, {x, y, z}, color);
  } else if (kind == "table") {
    // Top slab on four corner legs; back/front symmetric.
    double top = std::min(0.12 * h, 0.08);
    double leg = std::min({0.1 * l, 0.1 * w, 0.08});
    push_box(m, {-x, -y, z - top}, {x, y, z}, color);
    push_box(m, {-x, -y, -z}, {-x + leg, -y + leg, z - top}, color);
    push_box(m, {x - leg, -y, -z}, {x, -y + leg, z - top}, color);
    push_box(m, {-x, y - leg, -z}, {-x + leg, y, z - top}, color);
    push_box(m, {x - leg, y - leg, -z}, {x, y, z - top}, color);
  } else if (kind == "chair") {
    // Seat at mid height, backrest along the -y (rear) edge, corner legs.
    double seat_lo = -z + 0.4 * h, seat_hi = -z + 0.5 * h;
    double back = std::min(0.2 * w, 0.08);
    double leg = std::min({0.15 * l, 0.15 * w, 0.06});
    push_box(m, {-x, -y, seat_lo}, {x, y, seat_hi}, color);
    push_box(m, {-x, -y, seat_hi}, {x, -y + back, z}, color);
    push_box(m, {-x, -y, -z}, {-x + leg, -y + leg, seat_lo}, color);
    push_box(m, {x - leg, -y, -z}, {x, -y + leg, seat_lo}, color);
    push_box(m, {-x, y - leg, -z}, {-x + leg, y, seat_lo}, color);
    push_box(m, {x - leg, y - leg, -z}, {x, y, seat_lo}, color);
  } else if (kind == "sofa") {
    // Base, rear backrest, two arms.
    double base_hi = -z + 0.45 * h;
    double back = std::min(0.25 * w, 0.25);
    double arm = std::min(0.12 * l, 0.2);
    push_box(m, {-x, -y, -z}, {x, y, base_hi}, color);
    push_box(m, {-x, -y, base_hi}, {x, -y + back, z}, color);
    push_box(m, {-x, -y + back, base_hi}, {-x + arm, y, -z + 0.7 * h}, color);
    push_box(m, {x - arm, -y + back, base_hi}, {x, y, -z + 0.7 * h}, color);
  } else if (kind == "bed") {
    // Mattress with a rear headboard.
    double head = std::min(0.08 * w, 0.12);
    push_box(m, {-x, -y, -z}, {x, y, -z + 0.55 * h}, color);
    push_box(m, {-x, -y, -z + 0.55 * h}, {x, -y + head, z}, color);
  } else if (kind == "shelf") {
    // Side panels, back panel, three shelves.
    double panel = std::min({0.08 * l, 0.08 * w, 0.04});
    push_box(m, {-x, -y, -z}, {-x + panel, y, z}, color);
    push_box(m, {x - panel, -y, -z}, {x, y, z}, color);
    push_box(m, {-x + panel, -y, -z}, {x - panel, -y + panel, z}, color);
    for (int i = 0; i < 3; ++i) {
      double sz = -z + (0.25 + 0.25 * i) * h;
      push_box(m, {-x + panel, -y + panel, sz - panel / 2},
               {x - panel, y, sz + panel / 2}, color);
    }
  } else if (kind == "lamp_floor") {
    // Base plate, pole, shade at the top spanning the full footprint.
    double pole = std::min({0.12 * l, 0.12 * w, 0.05});
    push_box(m, {-0.4 * l, -0.4 * w, -z}, {0.4 * l, 0.4 * w, -z + 0.04 * h}, color);
    push_box(m, {-pole, -pole, -z + 0.04 * h}, {pole, pole, z - 0.25 * h}, color);
    push_cylinder(m, {0, 0, 0}, x, y, z - 0.25 * h, z, color);
  } else if (kind == "lamp_pendant") {
    // Hanging shade with a thin cord above.
    double cord = std::min({0.06 * l, 0.06 * w, 0.02});
    push_cylinder(m, {0, 0, 0}, x, y, -z, -z + 0.6 * h, color);
    push_box(m, {-cord, -cord, -z + 0.6 * h}, {cord, cord, z}, color);
  } else if (kind == "plant") {
    // Pot with a foliage ball filling the footprint.
    push_cylinder(m, {0, 0, 0}, 0.3 * l, 0.3 * w, -z, -z + 0.35 * h, color);
    push_sphere(m, {0, 0, (z + (-z + 0.3 * h)) / 2},
                {x, y, (h - 0.3 * h) / 2}, color);
  } else if (kind == "tv") {
    // Thin screen panel on a base plate; screen faces +y.
    double base_hi = -z + std::min(0.1 * h, 0.1);
    push_box(m, {-0.3 * l, -y, -z}, {0.3 * l, y, base_hi}, color);
    push_box(m, {-x, -y, base_hi}, {x, -y + 0.4 * w, z}, color);
  } else {
    push_box(m, {-x, -y, -z}, {x, y, z}, color);
  }
  return m;
}

/// Muted per-category tint so untextured exports are readable.
inline Vec3 category_color(const std::string& category) {
  static const std::map<std::string, Vec3> kColors = {
      {"seating", {0.55, 0.38, 0.25}},   {"table", {0.62, 0.45, 0.28}},
      {"bed", {0.78, 0.74, 0.68}},       {"storage", {0.50, 0.36, 0.24}},
      {"lighting", {0.92, 0.85, 0.55}},  {"electronics", {0.16, 0.16, 0.18}},
      {"decor", {0.32, 0.55, 0.32}},     {"appliance", {0.82, 0.83, 0.85}},
      {"plumbing", {0.93, 0.93, 0.95}},  {"textile", {0.58, 0.32, 0.32}}};
  auto it = kColors.find(category);
  return it == kColors.end() ? Vec3{0.6, 0.6, 0.6} : it->second;
}

/// Bundled starter catalog: parametric primitives with precomputed pseudo
/// embeddings, so the pipeline runs with zero external downloads.
inline AssetCatalog builtin_catalog() {
  struct Row {
    const char* id;
    const char* desc;
    const char* kind;
    double l, w, h;
    const char* cat;
  };
  static const Row rows[] = {
      {"sofa_fabric", "fabric three seat sofa couch", "sofa", 2.1, 0.95, 0.85, "seating"},
      {"loveseat", "small two seat loveseat sofa", "sofa", 1.5, 0.9, 0.8, "seating"},
      {"armchair", "upholstered armchair lounge chair", "sofa", 0.9, 0.85, 0.9, "seating"},
      {"dining_chair", "wooden dining chair", "chair", 0.45, 0.5, 0.9, "seating"},
      {"office_chair", "office desk swivel chair", "chair", 0.55, 0.55, 1.0, "seating"},
      {"stool", "round bar stool", "cylinder", 0.38, 0.38, 0.65, "seating"},
      {"dining_table", "wooden dining table", "table", 1.6, 0.9, 0.75, "table"},
      {"coffee_table", "low coffee table", "table", 1.1, 0.6, 0.45, "table"},
      {"desk", "office writing desk workstation", "table", 1.3, 0.65, 0.75, "table"},
      {"side_table", "small side end table", "table", 0.5, 0.5, 0.55, "table"},
      {"bed_double", "double bed with headboard mattress", "bed", 1.9, 2.1, 1.0, "bed"},
      {"bed_single", "single bed mattress", "bed", 1.0, 2.0, 0.9, "bed"},
      {"nightstand", "bedside nightstand drawer", "box", 0.45, 0.4, 0.55, "storage"},
      {"wardrobe", "tall wardrobe closet cabinet", "box", 1.2, 0.6, 2.0, "storage"},
      {"bookshelf", "open bookshelf shelving unit", "shelf", 0.9, 0.35, 1.8, "storage"},
      {"tv_stand", "low tv stand media console", "box", 1.4, 0.45, 0.5, "storage"},
      {"kitchen_cabinet", "kitchen counter cabinet unit", "box", 1.0, 0.6, 0.9, "storage"},
      {"television", "flat screen television tv", "tv", 1.2, 0.25, 0.75, "electronics"},
      {"floor_lamp", "standing floor lamp with shade", "lamp_floor", 0.4, 0.4, 1.6, "lighting"},
      {"pendant_lamp", "hanging pendant ceiling lamp", "lamp_pendant", 0.4, 0.4, 0.5, "lighting"},
      {"potted_plant", "green potted plant", "plant", 0.45, 0.45, 1.2, "decor"},
      {"rug", "flat woven area rug", "box", 2.0, 1.4, 0.02, "textile"},
      {"fridge", "kitchen refrigerator fridge", "box", 0.7, 0.7, 1.8, "appliance"},
      {"washing_machine", "laundry washing machine", "box", 0.6, 0.6, 0.85, "appliance"},
      {"toilet", "ceramic toilet", "box", 0.4, 0.65, 0.75, "plumbing"},
      {"bathtub", "white bathtub tub", "box", 1.7, 0.75, 0.55, "plumbing"},
      {"sink_vanity", "bathroom sink vanity", "box", 0.6, 0.5, 0.85, "plumbing"},
  };
  AssetCatalog cat;
  for (const Row& r : rows) {
    AssetEntry e;
    e.id = r.id;
    e.description = r.desc;
    e.embedding = detail_assets::pseudo_embedding(r.desc);
    e.mesh = std::string("primitive:") + r.kind;
    e.dims = Vec3{r.l, r.w, r.h};
    e.category = r.cat;
    cat.entries.push_back(std::move(e));
  }
  detail_assets::validate_entries(cat.entries);
  return cat;
}

// ---------------------------------------------------------------------------
// Scene assembly

namespace detail_assets {

/// Native asset mesh, centered so its AABB center sits at the origin.
inline SceneMesh native_mesh(const AssetCatalog& catalog, const AssetEntry& e) {
  SceneMesh m;
  if (e.mesh.rfind("primitive:", 0) == 0) {
    m = make_primitive_mesh(e.mesh.substr(10), e.dims, category_color(e.category));
  } else {
    std::string path = catalog.base_dir.empty() ? e.mesh
                                                : catalog.base_dir + "/" + e.mesh;
    m = import_mesh(path);
  }
  if (!m.vertices.empty()) {
    Vec3 c = m.bounds().center();
    for (auto& v : m.vertices) v = v - c;
  }
  return m;
}

}  // namespace detail_assets

/// Base house mesh plus every placed box realized as its fitted asset
/// (scale-to-box, yaw, translate-to-center). Boxes with no resolvable asset
/// get a primitive box and a warning.
inline SceneMesh assemble_scene(const Floorplan& f, double wall_height,
                                const std::vector<PlacedBox>& boxes,
                                const AssetCatalog& catalog,
                                std::vector<std::string>* warnings = nullptr) {
  SceneMesh scene = extrude_base_mesh(f, wall_height);
  std::map<std::string, SceneMesh> cache;
  for (const PlacedBox& box : boxes) {
    const AssetEntry* entry =
        box.asset_id.empty() ? nullptr : catalog.find(box.asset_id);
    SceneMesh native;
    Vec3 scale{1, 1, 1};
    if (entry != nullptr) {
      auto it = cache.find(entry->id);
      if (it == cache.end())
        it = cache.emplace(entry->id, detail_assets::native_mesh(catalog, *entry)).first;
      native = it->second;
      AssetTransform t = fit_asset(*entry, box);
      scale = t.scale;
    } else {
      if (warnings != nullptr)
        warnings->push_back("no asset for '" + box.label +
                            "': primitive box substituted");
      native = make_primitive_mesh(
          "box", box.half_extents * 2.0,
          category_color(entry != nullptr ? entry->category : ""));
      scale = Vec3{1, 1, 1};
    }
    const double c = std::cos(box.yaw), s = std::sin(box.yaw);
    for (auto& v : native.vertices) {
      Vec3 p{v.x * scale.x, v.y * scale.y, v.z * scale.z};
      v = Vec3{box.center.x + c * p.x - s * p.y,
               box.center.y + s * p.x + c * p.y, box.center.z + p.z};
    }
    SceneMesh part = std::move(native);
    part.submeshes.clear();
    scene.append(part, box.label);
  }
  return scene;
}

}  // namespace homegen
