#pragma once

// Stage orchestration over a project directory: prompt → floorplan → layout
// → refine → trajectory → depth, plus bake / texture handoff / export and
// staleness-driven rerun. Any stage error halts with the stage name while
// completed stages stay persisted.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "homegen/assets.hpp"
#include "homegen/bake.hpp"
#include "homegen/error.hpp"
#include "homegen/floorplan.hpp"
#include "homegen/image.hpp"
#include "homegen/json_io.hpp"
#include "homegen/layout.hpp"
#include "homegen/llm.hpp"
#include "homegen/mesh_io.hpp"
#include "homegen/project.hpp"
#include "homegen/refine.hpp"
#include "homegen/render.hpp"
#include "homegen/scene_ir.hpp"
#include "homegen/trajectory.hpp"

namespace homegen {

// Recorded external-diffusion settings written into the texture handoff.
inline constexpr double kHandoffGuidanceScale = 0.7;
inline constexpr double kHandoffOverlapFilter = 0.1;

struct PipelineOptions {
  std::uint64_t seed = 0;
  double total_area = 0.0;  // 0 → per-type priors
  double cell_size = kDefaultCellSize;
  double wall_height = 3.0;
  TrajectoryConfig trajectory;
};

struct StageRun {
  Stage stage;
  double ms = 0.0;
};

/// Wraps a stage error with the stage name and the exit code of its cause.
class StageFailure : public Error {
 public:
  StageFailure(Stage stage, int exit_code, const std::string& message)
      : Error(std::string("stage ") + stage_name(stage) + ": " + message),
        stage_(stage),
        exit_code_(exit_code) {}
  Stage stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  Stage stage_;
  int exit_code_;
};

inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const ServiceError*>(&e) != nullptr) return 3;
  if (dynamic_cast<const IoError*>(&e) != nullptr) return 4;
  return 2;  // validation, parse, infeasible
}

struct PipelineContext {
  ProjectDir dir;
  PipelineOptions opts;
  const LlmClient* llm = nullptr;
  const AssetCatalog* catalog = nullptr;
  std::vector<StageRun> runs;
  std::vector<std::string> warnings;

  PipelineContext(ProjectDir d, PipelineOptions o)
      : dir(std::move(d)), opts(std::move(o)) {}
};

namespace detail_pipe {

inline const RoomId& room_by_key(const BubbleDiagram& d, const std::string& key) {
  for (const auto& r : d.rooms)
    if (r.key() == key) return r;
  throw ValidationError("room '" + key + "' not in diagram");
}

inline std::string format_area(double area) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", area);
  return buf;
}

/// Top-1 text retrieval assigns each node an asset and, when the response
/// gave only a footprint, a height scaled from the asset's native shape.
inline void assign_assets(LayoutGraph& g, const AssetCatalog& catalog) {
  for (auto& node : g.nodes) {
    const std::string& query =
        node.description.empty() ? node.name : node.description;
    auto hits = retrieve(query, catalog, 1);
    node.asset_id = hits[0].id;
    if (node.height <= 0.0) {
      const AssetEntry* e = catalog.find(node.asset_id);
      double sx = node.length / e->dims.x;
      double sy = node.width / e->dims.y;
      double s = std::clamp((sx + sy) / 2.0, 0.4, 2.5);
      node.height = std::clamp(e->dims.z * s, 0.15, 2.8);
    }
  }
}

}  // namespace detail_pipe

// ---------------------------------------------------------------------------
// Stage runners

inline void stage_prompt(PipelineContext& ctx, const std::string& description) {
  if (ctx.llm == nullptr)
    throw ServiceError("prompt stage requires an LLM client");
  if (description.empty()) throw ValidationError("empty house description");

  HouseSpec spec;
  spec.description = description;
  spec.wall_height = ctx.opts.wall_height;
  spec.seed = ctx.opts.seed;

  std::string fp_prompt = render_prompt(
      floorplan_template(), {{"house_description", description}});
  auto [complete, diagram] = parse_floorplan_response(ctx.llm->complete(fp_prompt));
  (void)complete;

  std::string tx_prompt = render_prompt(
      texture_template(), {{"house_description", description}});
  spec.style_prompt = parse_texture_prompt(ctx.llm->complete(tx_prompt));

  ctx.dir.ensure_root();
  ctx.dir.save_spec(spec);
  ctx.dir.save_diagram(diagram);
  Manifest m = ctx.dir.load_manifest();
  ctx.dir.commit_stage(m, Stage::kPrompt);
}

inline void stage_floorplan(PipelineContext& ctx) {
  ProjectState st = ctx.dir.load_state();
  Floorplan f = synthesize_floorplan(st.diagram, ctx.opts.total_area,
                                     ctx.opts.cell_size);
  f = place_doors(f, st.diagram);
  ctx.dir.save_floorplan(f);
  Manifest m = ctx.dir.load_manifest();
  ctx.dir.commit_stage(m, Stage::kFloorplan);
}

inline void stage_layout(PipelineContext& ctx) {
  if (ctx.llm == nullptr)
    throw ServiceError("layout stage requires an LLM client");
  ProjectState st = ctx.dir.load_state();
  if (!st.floorplan) throw ValidationError("layout stage requires a floorplan");
  const Floorplan& f = *st.floorplan;

  for (const auto& room : st.diagram.rooms) {
    int idx = f.room_index(room.key());
    if (idx < 0)
      throw ValidationError("room '" + room.key() + "' missing from floorplan");
    std::map<std::string, std::string> binds = {
        {"room_type", room.original_name},
        {"house_descriptions", st.spec.description},
        {"room_area", detail_pipe::format_area(f.room_area(idx))},
        {"placement_functions", placement_functions_text()},
    };
    LayoutGraph furniture = parse_room_response(
        ctx.llm->complete(render_prompt(furniture_template(), binds)),
        RoomPromptKind::kFurniture);

    std::set<std::string> known;
    Json furniture_list = Json::array();
    for (const auto& n : furniture.nodes) {
      known.insert(n.name);
      furniture_list.push_back(n.name);
    }
    binds["furniture_list"] = furniture_list.dump();

    LayoutGraph ornament = parse_room_response(
        ctx.llm->complete(render_prompt(ornament_template(), binds)),
        RoomPromptKind::kOrnament, known);

    LayoutGraph merged = merge_layout_graphs(furniture, ornament);
    if (ctx.catalog != nullptr) detail_pipe::assign_assets(merged, *ctx.catalog);
    ctx.dir.save_layout(room.key(), merged);
  }
  Manifest m = ctx.dir.load_manifest();
  ctx.dir.commit_stage(m, Stage::kLayout);
}

inline void stage_refine(PipelineContext& ctx) {
  ProjectState st = ctx.dir.load_state();
  if (!st.floorplan || st.layouts.empty())
    throw ValidationError("refine stage requires layouts");
  const Floorplan& f = *st.floorplan;
  for (const auto& [key, graph] : st.layouts) {
    const RoomId& room = detail_pipe::room_by_key(st.diagram, key);
    std::vector<PlacedBox> boxes =
        place_furniture(room, f, graph, st.spec.wall_height, st.spec.seed);
    auto [refined, report] = refine_layout(boxes, f, room);
    ctx.dir.save_placed(key, refined);
    ctx.dir.save_refine_report(key, report);
  }
  Manifest m = ctx.dir.load_manifest();
  ctx.dir.commit_stage(m, Stage::kRefine);
}

inline void stage_trajectory(PipelineContext& ctx) {
  ProjectState st = ctx.dir.load_state();
  if (!st.floorplan || st.placed.empty())
    throw ValidationError("trajectory stage requires placed boxes");
  // An edited config persisted in the project survives reruns; options only
  // seed the first run.
  TrajectoryConfig cfg =
      st.has_trajectory() ? *st.traj_config : ctx.opts.trajectory;
  cfg.seed = st.spec.seed;
  validate_trajectory_config(cfg, st.spec.wall_height);
  std::vector<CameraPose> poses =
      build_trajectory(*st.floorplan, st.placed, cfg, &ctx.warnings);
  ctx.dir.save_trajectory(cfg, poses);
  Manifest m = ctx.dir.load_manifest();
  ctx.dir.commit_stage(m, Stage::kTrajectory);
}

inline void stage_depth(PipelineContext& ctx) {
  if (ctx.catalog == nullptr)
    throw ValidationError("depth stage requires an asset catalog");
  ProjectState st = ctx.dir.load_state();
  if (!st.floorplan || !st.has_trajectory())
    throw ValidationError("depth stage requires a trajectory");

  std::vector<PlacedBox> boxes;
  for (const auto& [key, room_boxes] : st.placed)
    boxes.insert(boxes.end(), room_boxes.begin(), room_boxes.end());
  SceneMesh mesh = assemble_scene(*st.floorplan, st.spec.wall_height, boxes,
                                  *ctx.catalog, &ctx.warnings);
  export_gltf(mesh, ctx.dir.mesh_file().string());

  std::error_code ec;
  fs::remove_all(ctx.dir.depth_dir(), ec);
  fs::create_directories(ctx.dir.depth_dir(), ec);
  if (ec) throw IoError("cannot create depth directory");

  detail_render::TriGrid grid(mesh);
  for (std::size_t i = 0; i < st.trajectory.size(); ++i) {
    DepthImage d = render_depth(grid, st.trajectory[i]);
    write_png_gray16(ctx.dir.depth_image_file(static_cast<int>(i)).string(),
                     depth_to_gray16(d));
  }
  Manifest m = ctx.dir.load_manifest();
  ctx.dir.commit_stage(m, Stage::kDepth);
}

// ---------------------------------------------------------------------------
// Driver

inline void run_stage(PipelineContext& ctx, Stage stage,
                      const std::function<void()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const StageFailure&) {
    throw;
  } catch (const Error& e) {
    throw StageFailure(stage, exit_code_for(e), e.what());
  }
  auto t1 = std::chrono::steady_clock::now();
  ctx.runs.push_back(
      {stage, std::chrono::duration<double, std::milli>(t1 - t0).count()});
}

/// prompt → floorplan → layout → refine → trajectory → depth.
inline void generate_project(PipelineContext& ctx, const std::string& description) {
  run_stage(ctx, Stage::kPrompt, [&] { stage_prompt(ctx, description); });
  run_stage(ctx, Stage::kFloorplan, [&] { stage_floorplan(ctx); });
  run_stage(ctx, Stage::kLayout, [&] { stage_layout(ctx); });
  run_stage(ctx, Stage::kRefine, [&] { stage_refine(ctx); });
  run_stage(ctx, Stage::kTrajectory, [&] { stage_trajectory(ctx); });
  run_stage(ctx, Stage::kDepth, [&] { stage_depth(ctx); });
}

/// Walks floorplan through depth re-running each stage that is stale or was
/// never recorded while its upstream is recorded. The prompt stage has no
/// upstream and is never re-run here; bake needs external images, so a stale
/// bake stays stale until the next `bake`.
inline std::vector<Stage> rerun_stale(PipelineContext& ctx) {
  std::vector<Stage> ran;
  if (!ctx.dir.load_manifest().has(Stage::kPrompt))
    throw ValidationError("project has no prompt stage; run generate first");
  const Stage chain[] = {Stage::kFloorplan, Stage::kLayout, Stage::kRefine,
                         Stage::kTrajectory, Stage::kDepth};
  for (Stage s : chain) {
    Manifest cur = ctx.dir.load_manifest();
    if (!cur.has(prev_stage(s))) break;
    if (cur.has(s) && cur.fresh(s)) continue;
    switch (s) {
      case Stage::kFloorplan: run_stage(ctx, s, [&] { stage_floorplan(ctx); }); break;
      case Stage::kLayout: run_stage(ctx, s, [&] { stage_layout(ctx); }); break;
      case Stage::kRefine: run_stage(ctx, s, [&] { stage_refine(ctx); }); break;
      case Stage::kTrajectory: run_stage(ctx, s, [&] { stage_trajectory(ctx); }); break;
      case Stage::kDepth: run_stage(ctx, s, [&] { stage_depth(ctx); }); break;
      default: break;
    }
    ran.push_back(s);
  }
  return ran;
}

// ---------------------------------------------------------------------------
// Edit

/// Replaces one stage artifact after validating the patch; re-records the
/// stage hash so downstream stages become stale. Derived stages (refine,
/// depth, bake, export) are not editable.
inline void edit_stage(PipelineContext& ctx, Stage stage, const Json& patch,
                       const std::string& room = "") {
  Manifest m = ctx.dir.load_manifest();
  if (!m.has(stage))
    throw ValidationError(std::string("stage ") + stage_name(stage) +
                          " not present in project");
  switch (stage) {
    case Stage::kPrompt: {
      if (!patch.is_object() ||
          (!patch.contains("spec") && !patch.contains("diagram")))
        throw ValidationError("prompt patch must contain 'spec' and/or 'diagram'");
      std::optional<HouseSpec> spec;
      std::optional<BubbleDiagram> diagram;
      if (patch.contains("spec")) spec = house_spec_from_json(patch["spec"]);
      if (patch.contains("diagram")) {
        diagram = diagram_from_json(patch["diagram"]);
        ValidationReport rep = validate_bubble_diagram(*diagram);
        if (!rep.pass())
          throw ValidationError("diagram patch invalid: " + rep.joined());
      }
      if (spec) ctx.dir.save_spec(*spec);
      if (diagram) ctx.dir.save_diagram(*diagram);
      break;
    }
    case Stage::kFloorplan: {
      Floorplan f = floorplan_from_json(patch);
      ctx.dir.save_floorplan(f);
      break;
    }
    case Stage::kLayout: {
      if (room.empty())
        throw ValidationError("layout edits require --room");
      if (!fs::exists(ctx.dir.layout_file(room)))
        throw ValidationError("no layout for room '" + room + "'");
      LayoutGraph g = layout_graph_from_json(patch);
      ValidationReport rep = validate_layout_graph(g);
      if (!rep.pass())
        throw ValidationError("layout patch invalid: " + rep.joined());
      if (ctx.catalog != nullptr) detail_pipe::assign_assets(g, *ctx.catalog);
      ctx.dir.save_layout(room, g);
      break;
    }
    case Stage::kTrajectory: {
      TrajectoryConfig cfg = trajectory_config_from_json(patch);
      ProjectState st = ctx.dir.load_state();
      validate_trajectory_config(cfg, st.spec.wall_height);
      if (!st.floorplan || st.placed.empty())
        throw ValidationError("trajectory edit requires placed boxes");
      std::vector<CameraPose> poses =
          build_trajectory(*st.floorplan, st.placed, cfg, &ctx.warnings);
      ctx.dir.save_trajectory(cfg, poses);
      break;
    }
    default:
      throw ValidationError(std::string("stage ") + stage_name(stage) +
                            " is derived; edit an upstream stage instead");
  }
  m.stages[stage_name(stage)].hash = ctx.dir.stage_hash(stage);
  ctx.dir.save_manifest(m);
}

// ---------------------------------------------------------------------------
// Eval

struct RoomEval {
  std::string room;
  int boxes = 0;
  double oob_before = 0.0;
  double oob_after = 0.0;
  int unresolved = 0;
};

struct EvalReport {
  std::vector<RoomEval> rooms;
  double aggregate_before = 0.0;
  double aggregate_after = 0.0;
  int total_boxes = 0;
  std::map<std::string, int> rule_histogram;
};

inline EvalReport evaluate_project(const ProjectDir& dir) {
  ProjectState st = dir.load_state();
  if (!st.floorplan) throw ValidationError("eval requires a floorplan");
  EvalReport rep;
  double bad_before = 0.0, bad_after = 0.0;
  for (const auto& [key, boxes] : st.placed) {
    RoomEval re;
    re.room = key;
    re.boxes = static_cast<int>(boxes.size());
    auto it = st.refine_reports.find(key);
    if (it != st.refine_reports.end()) {
      re.oob_before = it->second.oob_before;
      re.oob_after = it->second.oob_after;
      re.unresolved = static_cast<int>(it->second.unresolved.size());
    } else {
      const RoomId& room = detail_pipe::room_by_key(st.diagram, key);
      re.oob_after = oob_rate(boxes, *st.floorplan, room);
      re.oob_before = re.oob_after;
    }
    bad_before += re.oob_before * re.boxes;
    bad_after += re.oob_after * re.boxes;
    rep.total_boxes += re.boxes;
    for (const auto& b : boxes)
      rep.rule_histogram[placement_rule_name(b.rule_used)]++;
    rep.rooms.push_back(std::move(re));
  }
  if (rep.total_boxes > 0) {
    rep.aggregate_before = bad_before / rep.total_boxes;
    rep.aggregate_after = bad_after / rep.total_boxes;
  }
  return rep;
}

inline Json eval_report_to_json(const EvalReport& rep) {
  Json rooms = Json::array();
  for (const auto& r : rep.rooms) {
    Json j;
    j["room"] = r.room;
    j["boxes"] = r.boxes;
    j["oob_before"] = r.oob_before;
    j["oob_after"] = r.oob_after;
    j["unresolved"] = r.unresolved;
    rooms.push_back(std::move(j));
  }
  Json j;
  j["rooms"] = std::move(rooms);
  j["aggregate_oob_before"] = rep.aggregate_before;
  j["aggregate_oob_after"] = rep.aggregate_after;
  j["total_boxes"] = rep.total_boxes;
  j["rule_histogram"] = rep.rule_histogram;
  return j;
}

// ---------------------------------------------------------------------------
// Texture handoff and bake

/// Writes the external-inpainting bundle: the depth PNGs, a manifest pairing
/// each image with its pose, the diffusion prompt, and the recorded external
/// settings.
inline void texture_handoff(PipelineContext& ctx, const fs::path& out_dir) {
  Manifest m = ctx.dir.load_manifest();
  if (!m.has(Stage::kTrajectory) || !m.has(Stage::kDepth))
    throw ValidationError("texture handoff requires trajectory and depth stages");
  ProjectState st = ctx.dir.load_state();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "'");

  Json images = Json::array();
  for (std::size_t i = 0; i < st.trajectory.size(); ++i) {
    fs::path src = ctx.dir.depth_image_file(static_cast<int>(i));
    if (!fs::exists(src))
      throw IoError("missing depth image '" + src.string() + "'");
    fs::copy_file(src, out_dir / src.filename(),
                  fs::copy_options::overwrite_existing, ec);
    if (ec) throw IoError("cannot copy '" + src.string() + "'");
    Json entry;
    entry["file"] = src.filename().string();
    entry["pose"] = camera_pose_to_json(st.trajectory[i]);
    images.push_back(std::move(entry));
  }
  Json j;
  j["prompt"] = st.spec.style_prompt;
  j["guidance_scale"] = kHandoffGuidanceScale;
  j["overlap_filter"] = kHandoffOverlapFilter;
  j["depth_unit"] = "millimeters";
  j["images"] = std::move(images);
  write_json_file(out_dir / "handoff.json", j);
}

/// Ingests one RGB image per pose (named like the depth renders) and bakes
/// them into the mesh vertex colors.
inline void bake_project(PipelineContext& ctx, const fs::path& images_dir) {
  Manifest m = ctx.dir.load_manifest();
  if (!m.has(Stage::kDepth))
    throw ValidationError("bake requires the depth stage");
  ProjectState st = ctx.dir.load_state();

  std::vector<RgbImage> images;
  for (std::size_t i = 0; i < st.trajectory.size(); ++i) {
    fs::path file = images_dir / ctx.dir.depth_image_file(static_cast<int>(i))
                                     .filename();
    if (!fs::exists(file))
      throw ValidationError("image count mismatch: expected " +
                            std::to_string(st.trajectory.size()) +
                            " images, missing '" + file.filename().string() + "'");
    images.push_back(read_png_rgb(file.string()));
  }
  SceneMesh mesh = import_gltf(ctx.dir.mesh_file().string());
  SceneMesh baked = bake_vertex_colors(mesh, images, st.trajectory);
  export_gltf(baked, ctx.dir.baked_mesh_file().string());
  ctx.dir.commit_stage(m, Stage::kBake);
}

/// Exports the current mesh (baked when present) to OBJ or glTF.
inline void export_project(PipelineContext& ctx, MeshFormat format,
                           const fs::path& out) {
  fs::path source = fs::exists(ctx.dir.baked_mesh_file())
                        ? ctx.dir.baked_mesh_file()
                        : ctx.dir.mesh_file();
  if (!fs::exists(source))
    throw ValidationError("export requires the depth stage (no mesh present)");
  SceneMesh mesh = import_gltf(source.string());
  export_mesh(mesh, format, out.string());
}

}  // namespace homegen
