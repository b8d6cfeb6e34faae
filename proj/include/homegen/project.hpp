#pragma once

// Project directory: one subdirectory-per-stage persistence of the pipeline
// state, plus a manifest of stage content hashes forming a linear chain so
// edits mark downstream artifacts stale.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "homegen/error.hpp"
#include "homegen/fsutil.hpp"
#include "homegen/json_io.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {

enum class Stage {
  kPrompt = 0,
  kFloorplan,
  kLayout,
  kRefine,
  kTrajectory,
  kDepth,
  kBake,
  kExport,
};

inline constexpr int kStageCount = 8;

inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::kPrompt: return "prompt";
    case Stage::kFloorplan: return "floorplan";
    case Stage::kLayout: return "layout";
    case Stage::kRefine: return "refine";
    case Stage::kTrajectory: return "trajectory";
    case Stage::kDepth: return "depth";
    case Stage::kBake: return "bake";
    case Stage::kExport: return "export";
  }
  return "?";
}

inline Stage stage_from_name(const std::string& name) {
  for (int i = 0; i < kStageCount; ++i)
    if (name == stage_name(static_cast<Stage>(i))) return static_cast<Stage>(i);
  throw ValidationError("unknown stage '" + name + "'");
}

inline Stage prev_stage(Stage s) {
  return static_cast<Stage>(static_cast<int>(s) - 1);
}

/// Upstream stages whose artifacts a stage reads. Most stages read the
/// prompt stage directly (seed, wall height, description), so a spec edit
/// marks them stale even when intermediate artifacts happen to be
/// byte-identical.
inline std::vector<Stage> stage_inputs(Stage s) {
  switch (s) {
    case Stage::kPrompt: return {};
    case Stage::kFloorplan: return {Stage::kPrompt};
    case Stage::kLayout: return {Stage::kFloorplan, Stage::kPrompt};
    case Stage::kRefine:
      return {Stage::kLayout, Stage::kFloorplan, Stage::kPrompt};
    case Stage::kTrajectory:
      return {Stage::kRefine, Stage::kFloorplan, Stage::kPrompt};
    case Stage::kDepth:
      return {Stage::kTrajectory, Stage::kRefine, Stage::kFloorplan,
              Stage::kPrompt};
    case Stage::kBake: return {Stage::kDepth, Stage::kTrajectory};
    case Stage::kExport: return {};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Manifest

struct StageRecord {
  std::string hash;
  std::map<std::string, std::string> inputs;  // upstream stage → hash at run time
};

struct Manifest {
  std::map<std::string, StageRecord> stages;

  bool has(Stage s) const { return stages.count(stage_name(s)) != 0; }

  /// Fresh = recorded, and every recorded input still matches the current
  /// hash of a stage that is itself fresh.
  bool fresh(Stage s) const {
    auto it = stages.find(stage_name(s));
    if (it == stages.end()) return false;
    for (const auto& [up, hash] : it->second.inputs) {
      auto uit = stages.find(up);
      if (uit == stages.end() || uit->second.hash != hash) return false;
      if (!fresh(stage_from_name(up))) return false;
    }
    return true;
  }

  void record(Stage s, std::string hash, const std::vector<Stage>& inputs) {
    StageRecord rec;
    rec.hash = std::move(hash);
    for (Stage input : inputs) {
      auto it = stages.find(stage_name(input));
      if (it == stages.end())
        throw ValidationError(std::string("stage ") + stage_name(s) +
                              " recorded before its input " + stage_name(input));
      rec.inputs[stage_name(input)] = it->second.hash;
    }
    stages[stage_name(s)] = std::move(rec);
  }
};

inline Json manifest_to_json(const Manifest& m) {
  Json stages = Json::object();
  for (const auto& [name, rec] : m.stages) {
    Json r;
    r["hash"] = rec.hash;
    r["inputs"] = Json::object();
    for (const auto& [up, h] : rec.inputs) r["inputs"][up] = h;
    stages[name] = std::move(r);
  }
  Json j;
  j["stages"] = std::move(stages);
  return j;
}

inline Manifest manifest_from_json(const Json& j) {
  Manifest m;
  for (const auto& [name, r] : jio::get_object(j, "stages").items()) {
    StageRecord rec;
    rec.hash = jio::get_string(r, "hash");
    for (const auto& [up, h] : jio::get_object(r, "inputs").items()) {
      if (!h.is_string()) throw ParseError("manifest input hash must be a string");
      rec.inputs[up] = h.get<std::string>();
    }
    m.stages[name] = std::move(rec);
  }
  return m;
}

// ---------------------------------------------------------------------------
// In-memory project state

struct ProjectState {
  HouseSpec spec;
  BubbleDiagram diagram;
  std::optional<Floorplan> floorplan;
  std::map<std::string, LayoutGraph> layouts;          // room key → graph
  std::map<std::string, std::vector<PlacedBox>> placed;
  std::map<std::string, RefineReport> refine_reports;
  std::optional<TrajectoryConfig> traj_config;
  std::vector<CameraPose> trajectory;

  bool has_trajectory() const { return traj_config.has_value(); }
};

// ---------------------------------------------------------------------------
// Directory layout and persistence

class ProjectDir {
 public:
  explicit ProjectDir(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const { return root_; }
  fs::path spec_file() const { return root_ / "spec.json"; }
  fs::path diagram_file() const { return root_ / "diagram.json"; }
  fs::path floorplan_file() const { return root_ / "floorplan.json"; }
  fs::path layout_dir() const { return root_ / "layout"; }
  fs::path placed_dir() const { return root_ / "placed"; }
  fs::path refine_dir() const { return root_ / "refine"; }
  fs::path trajectory_file() const { return root_ / "trajectory.json"; }
  fs::path mesh_file() const { return root_ / "mesh.gltf"; }
  fs::path baked_mesh_file() const { return root_ / "mesh_baked.gltf"; }
  fs::path depth_dir() const { return root_ / "depth"; }
  fs::path manifest_file() const { return root_ / "manifest.json"; }
  fs::path lock_file() const { return root_ / ".lock"; }
  fs::path default_fixture_dir() const { return root_ / "fixtures"; }

  fs::path layout_file(const std::string& room) const {
    return layout_dir() / (room + ".json");
  }
  fs::path placed_file(const std::string& room) const {
    return placed_dir() / (room + ".json");
  }
  fs::path refine_file(const std::string& room) const {
    return refine_dir() / (room + ".json");
  }
  fs::path depth_image_file(int pose_index) const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "pose_%04d.png", pose_index);
    return depth_dir() / buf;
  }

  void ensure_root() const {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw IoError("cannot create project directory '" + root_.string() + "'");
  }

  // --- manifest ---

  Manifest load_manifest() const {
    if (!fs::exists(manifest_file())) return {};
    return manifest_from_json(parse_json_file(manifest_file()));
  }

  void save_manifest(const Manifest& m) const {
    write_json_file(manifest_file(), manifest_to_json(m));
  }

  // --- per-stage artifacts ---

  void save_spec(const HouseSpec& s) const {
    write_json_file(spec_file(), house_spec_to_json(s));
  }
  void save_diagram(const BubbleDiagram& d) const {
    write_json_file(diagram_file(), diagram_to_json(d));
  }
  void save_floorplan(const Floorplan& f) const {
    write_json_file(floorplan_file(), floorplan_to_json(f));
  }
  void save_layout(const std::string& room, const LayoutGraph& g) const {
    ensure_dir(layout_dir());
    write_json_file(layout_file(room), layout_graph_to_json(g));
  }
  void save_placed(const std::string& room, const std::vector<PlacedBox>& boxes) const {
    ensure_dir(placed_dir());
    Json arr = Json::array();
    for (const auto& b : boxes) arr.push_back(placed_box_to_json(b));
    Json j;
    j["boxes"] = std::move(arr);
    write_json_file(placed_file(room), j);
  }
  void save_refine_report(const std::string& room, const RefineReport& r) const {
    ensure_dir(refine_dir());
    write_json_file(refine_file(room), refine_report_to_json(r));
  }
  void save_trajectory(const TrajectoryConfig& cfg,
                       const std::vector<CameraPose>& poses) const {
    Json arr = Json::array();
    for (const auto& p : poses) arr.push_back(camera_pose_to_json(p));
    Json j;
    j["config"] = trajectory_config_to_json(cfg);
    j["poses"] = std::move(arr);
    write_json_file(trajectory_file(), j);
  }

  std::vector<std::string> layout_rooms() const {
    return room_keys_in(layout_dir());
  }
  std::vector<std::string> placed_rooms() const {
    return room_keys_in(placed_dir());
  }

  /// Loads whatever stages are present; validates that each present stage
  /// has its upstream present.
  ProjectState load_state() const {
    ProjectState st;
    if (!fs::exists(spec_file()))
      throw IoError("not a project directory (no spec.json): '" + root_.string() + "'");
    st.spec = house_spec_from_json(parse_json_file(spec_file()));
    if (!fs::exists(diagram_file()))
      throw ValidationError("project has spec.json but no diagram.json");
    st.diagram = diagram_from_json(parse_json_file(diagram_file()));
    if (fs::exists(floorplan_file()))
      st.floorplan = floorplan_from_json(parse_json_file(floorplan_file()));
    for (const auto& room : layout_rooms()) {
      require(st.floorplan.has_value(), "layout present without floorplan");
      st.layouts[room] =
          layout_graph_from_json(parse_json_file(layout_file(room)));
    }
    for (const auto& room : placed_rooms()) {
      require(!st.layouts.empty(), "placed boxes present without layouts");
      Json j = parse_json_file(placed_file(room));
      std::vector<PlacedBox> boxes;
      for (const auto& b : jio::get_array(j, "boxes"))
        boxes.push_back(placed_box_from_json(b));
      st.placed[room] = std::move(boxes);
      if (fs::exists(refine_file(room)))
        st.refine_reports[room] =
            refine_report_from_json(parse_json_file(refine_file(room)));
    }
    if (fs::exists(trajectory_file())) {
      require(!st.placed.empty(), "trajectory present without placed boxes");
      Json j = parse_json_file(trajectory_file());
      st.traj_config = trajectory_config_from_json(jio::get_object(j, "config"));
      for (const auto& p : jio::get_array(j, "poses"))
        st.trajectory.push_back(camera_pose_from_json(p));
    }
    return st;
  }

  // --- stage content hashing ---

  /// Hash of every artifact file owned by the stage, in sorted path order.
  std::string stage_hash(Stage s) const {
    std::vector<fs::path> files;
    switch (s) {
      case Stage::kPrompt:
        files = {spec_file(), diagram_file()};
        break;
      case Stage::kFloorplan:
        files = {floorplan_file()};
        break;
      case Stage::kLayout:
        files = files_in(layout_dir());
        break;
      case Stage::kRefine: {
        files = files_in(placed_dir());
        auto rep = files_in(refine_dir());
        files.insert(files.end(), rep.begin(), rep.end());
        break;
      }
      case Stage::kTrajectory:
        files = {trajectory_file()};
        break;
      case Stage::kDepth: {
        files = files_in(depth_dir());
        files.push_back(mesh_file());
        break;
      }
      case Stage::kBake:
        files = {baked_mesh_file()};
        break;
      case Stage::kExport:
        return hex64(fnv1a64(""));
    }
    std::uint64_t h = fnv1a64("");
    for (const auto& f : files) {
      if (!fs::exists(f))
        throw IoError(std::string("stage ") + stage_name(s) +
                      " artifact missing: '" + f.string() + "'");
      auto bytes = read_binary_file(f);
      std::string_view sv(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      h = fnv1a64(f.filename().string(), h);
      h = fnv1a64(sv, h);
    }
    return hex64(h);
  }

  /// Recomputes the stage's hash and records it with its input links.
  void commit_stage(Manifest& m, Stage s) const {
    m.record(s, stage_hash(s), stage_inputs(s));
    save_manifest(m);
  }

 private:
  static void require(bool ok, const char* msg) {
    if (!ok) throw ValidationError(msg);
  }
  static void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create directory '" + p.string() + "'");
  }
  static std::vector<fs::path> files_in(const fs::path& dir) {
    if (!fs::exists(dir)) return {};
    auto files = list_files(dir);
    std::sort(files.begin(), files.end());
    return files;
  }
  static std::vector<std::string> room_keys_in(const fs::path& dir) {
    std::vector<std::string> rooms;
    for (const auto& f : files_in(dir))
      if (f.extension() == ".json") rooms.push_back(f.stem().string());
    return rooms;
  }

  fs::path root_;
};

// ---------------------------------------------------------------------------
// Directory lock: one command per project at a time.

class ProjectLock {
 public:
  explicit ProjectLock(const ProjectDir& dir) : path_(dir.lock_file()) {
    std::error_code ec;
    fs::create_directories(path_.parent_path(), ec);
    // O_EXCL semantics via noreplace open is not portable here; a create
    // check plus exclusive stream is enough for the one-writer contract.
    if (fs::exists(path_))
      throw ServiceError("project is locked by another command (" +
                         path_.string() + "); remove the file if stale");
    write_text_file_atomic(path_, "locked\n");
    held_ = true;
  }
  ProjectLock(const ProjectLock&) = delete;
  ProjectLock& operator=(const ProjectLock&) = delete;
  ~ProjectLock() {
    if (held_) {
      std::error_code ec;
      fs::remove(path_, ec);
    }
  }

 private:
  fs::path path_;
  bool held_ = false;
};

}  // namespace homegen
