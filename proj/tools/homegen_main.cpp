// Command-line pipeline driver over a project directory.
//
// Exit codes: 0 success, 2 validation/parse, 3 external service, 4 I/O.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "homegen/llm_http.hpp"
#include "homegen/pipeline.hpp"

namespace {

using namespace homegen;

struct CliOptions {
  std::string project;
  bool offline = false;
  std::uint64_t seed = 0;
  std::string catalog_path;
  std::string endpoint;
  std::string model = "gpt-4";
  double temperature = 0.7;
  std::string fixtures;
  bool json = false;

  std::string description;
  double area = 0.0;
  double cell_size = kDefaultCellSize;
  double wall_height = 3.0;

  double camera_height = 1.5;
  double wall_distance = 0.5;
  double pitch_deg = -10.0;
  int inter_n = 10;
  int n_random = 20;
  int image_size = 512;

  std::string stage;
  std::string room;
  std::string patch_file;
  bool rerun_after = false;

  std::string out;
  std::string images;
  std::string format;
};

struct TrajectoryFlags {
  CLI::Option* camera_height = nullptr;
  CLI::Option* wall_distance = nullptr;
  CLI::Option* pitch_deg = nullptr;
  CLI::Option* inter_n = nullptr;
  CLI::Option* n_random = nullptr;
  CLI::Option* image_size = nullptr;
};

TrajectoryFlags add_trajectory_flags(CLI::App* cmd, CliOptions& opt) {
  TrajectoryFlags f;
  f.camera_height = cmd->add_option("--camera-height", opt.camera_height,
                                    "Camera height above the floor, meters");
  f.wall_distance = cmd->add_option("--wall-distance", opt.wall_distance,
                                    "Path offset from walls, meters");
  f.pitch_deg = cmd->add_option("--pitch-deg", opt.pitch_deg,
                                "Camera pitch, degrees (negative looks down)");
  f.inter_n = cmd->add_option("--inter-n", opt.inter_n,
                              "Interpolated poses per control-point pair");
  f.n_random = cmd->add_option("--n-random", opt.n_random,
                               "Extra object-centric poses");
  f.image_size = cmd->add_option("--image-size", opt.image_size,
                                 "Square depth image side, pixels");
  return f;
}

Intrinsics square_intrinsics(int side) {
  Intrinsics in;
  in.width = side;
  in.height = side;
  in.fx = in.fy = in.cx = in.cy = side / 2.0;
  return in;
}

TrajectoryConfig trajectory_from_flags(const CliOptions& opt) {
  TrajectoryConfig cfg;
  cfg.camera_height = opt.camera_height;
  cfg.wall_distance = opt.wall_distance;
  cfg.pitch = deg_to_rad(opt.pitch_deg);
  cfg.inter_n = opt.inter_n;
  cfg.n_random = opt.n_random;
  cfg.intrinsics = square_intrinsics(opt.image_size);
  return cfg;
}

PipelineOptions pipeline_options(const CliOptions& opt) {
  PipelineOptions po;
  po.seed = opt.seed;
  po.total_area = opt.area;
  po.cell_size = opt.cell_size;
  po.wall_height = opt.wall_height;
  po.trajectory = trajectory_from_flags(opt);
  return po;
}

LlmClient make_llm(const CliOptions& opt, const ProjectDir& dir) {
  ChatConfig cfg;
  cfg.endpoint = opt.endpoint;
  cfg.model = opt.model;
  cfg.temperature = opt.temperature;
  fs::path fixtures =
      opt.fixtures.empty() ? dir.default_fixture_dir() : fs::path(opt.fixtures);
  if (opt.offline) return LlmClient(cfg, fixtures, true);
  return LlmClient(cfg, fixtures, false, http_chat_complete);
}

AssetCatalog make_catalog(const CliOptions& opt) {
  if (opt.catalog_path.empty()) return builtin_catalog();
  return load_catalog(opt.catalog_path);
}

// --- reporting ------------------------------------------------------------

Json stage_runs_json(const std::vector<StageRun>& runs) {
  Json arr = Json::array();
  for (const auto& r : runs) {
    Json j;
    j["stage"] = stage_name(r.stage);
    j["ms"] = r.ms;
    arr.push_back(std::move(j));
  }
  return arr;
}

void print_stage_runs(const std::vector<StageRun>& runs) {
  for (const auto& r : runs)
    std::printf("stage %-11s %9.1f ms\n", stage_name(r.stage), r.ms);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

std::vector<std::string> stale_stages(const ProjectDir& dir) {
  Manifest m = dir.load_manifest();
  std::vector<std::string> out;
  for (int i = 0; i < kStageCount; ++i) {
    Stage s = static_cast<Stage>(i);
    if (m.has(s) && !m.fresh(s)) out.push_back(stage_name(s));
  }
  return out;
}

// --- floorplan debug image --------------------------------------------------

RgbImage floorplan_debug_image(const Floorplan& f) {
  auto room_color = [](int idx, std::uint8_t* rgb) {
    double hue = std::fmod(idx * 0.618033988749895, 1.0) * 6.0;
    double x = 1.0 - std::fabs(std::fmod(hue, 2.0) - 1.0);
    double rf = 0, gf = 0, bf = 0;
    switch (static_cast<int>(hue)) {
      case 0: rf = 1; gf = x; break;
      case 1: rf = x; gf = 1; break;
      case 2: gf = 1; bf = x; break;
      case 3: gf = x; bf = 1; break;
      case 4: rf = x; bf = 1; break;
      default: rf = 1; bf = x; break;
    }
    rgb[0] = static_cast<std::uint8_t>(64 + 191 * rf);
    rgb[1] = static_cast<std::uint8_t>(64 + 191 * gf);
    rgb[2] = static_cast<std::uint8_t>(64 + 191 * bf);
  };
  RgbImage img = RgbImage::filled(f.width, f.height, 24, 24, 24);
  for (int cy = 0; cy < f.height; ++cy) {
    for (int cx = 0; cx < f.width; ++cx) {
      int room = f.at(cx, cy);
      if (room < 0) continue;
      std::uint8_t rgb[3];
      room_color(room, rgb);
      img.set(cx, f.height - 1 - cy, rgb[0], rgb[1], rgb[2]);
    }
  }
  return img;
}

// --- commands ---------------------------------------------------------------

Json cmd_generate(const CliOptions& opt) {
  ProjectDir dir{fs::path(opt.project)};
  if (fs::exists(dir.manifest_file()))
    throw ValidationError("project already has recorded stages; use rerun or edit");
  ProjectLock lock(dir);
  LlmClient llm = make_llm(opt, dir);
  AssetCatalog catalog = make_catalog(opt);
  PipelineContext ctx(dir, pipeline_options(opt));
  ctx.llm = &llm;
  ctx.catalog = &catalog;
  generate_project(ctx, opt.description);

  EvalReport rep = evaluate_project(dir);
  ProjectState st = dir.load_state();
  if (!opt.json) {
    print_stage_runs(ctx.runs);
    print_warnings(ctx.warnings);
    std::printf("poses %zu\n", st.trajectory.size());
    std::printf("OOB after refine: %.1f%% (%d boxes)\n",
                rep.aggregate_after * 100.0, rep.total_boxes);
    std::printf("project %s\n", dir.root().string().c_str());
  }
  Json j;
  j["stages"] = stage_runs_json(ctx.runs);
  j["warnings"] = ctx.warnings;
  j["poses"] = st.trajectory.size();
  j["eval"] = eval_report_to_json(rep);
  return j;
}

Json cmd_rerun(const CliOptions& opt) {
  ProjectDir dir{fs::path(opt.project)};
  ProjectLock lock(dir);
  LlmClient llm = make_llm(opt, dir);
  AssetCatalog catalog = make_catalog(opt);
  PipelineContext ctx(dir, pipeline_options(opt));
  ctx.llm = &llm;
  ctx.catalog = &catalog;
  std::vector<Stage> ran = rerun_stale(ctx);
  if (!opt.json) {
    if (ran.empty()) std::printf("all stages fresh\n");
    print_stage_runs(ctx.runs);
    print_warnings(ctx.warnings);
  }
  Json j;
  j["stages"] = stage_runs_json(ctx.runs);
  j["warnings"] = ctx.warnings;
  j["stale"] = stale_stages(dir);
  return j;
}

Json cmd_edit(const CliOptions& opt) {
  ProjectDir dir{fs::path(opt.project)};
  ProjectLock lock(dir);
  LlmClient llm = make_llm(opt, dir);
  AssetCatalog catalog = make_catalog(opt);
  PipelineContext ctx(dir, pipeline_options(opt));
  ctx.llm = &llm;
  ctx.catalog = &catalog;
  Json patch = parse_json_file(opt.patch_file);
  edit_stage(ctx, stage_from_name(opt.stage), patch, opt.room);
  std::vector<Stage> ran;
  if (opt.rerun_after) ran = rerun_stale(ctx);
  std::vector<std::string> stale = stale_stages(dir);
  if (!opt.json) {
    std::printf("edited %s\n", opt.stage.c_str());
    print_stage_runs(ctx.runs);
    print_warnings(ctx.warnings);
    if (!stale.empty()) {
      std::printf("stale:");
      for (const auto& s : stale) std::printf(" %s", s.c_str());
      std::printf("\n");
    }
  }
  Json j;
  j["edited"] = opt.stage;
  j["stages"] = stage_runs_json(ctx.runs);
  j["stale"] = stale;
  return j;
}

Json cmd_eval(const CliOptions& opt) {
  ProjectDir dir{fs::path(opt.project)};
  ProjectLock lock(dir);
  if (!dir.load_manifest().has(Stage::kRefine))
    throw ValidationError("eval requires the refine stage");
  EvalReport rep = evaluate_project(dir);
  if (!opt.json) {
    std::printf("%-16s %6s %12s %12s %10s\n", "room", "boxes", "oob_before",
                "oob_after", "unresolved");
    for (const auto& r : rep.rooms)
      std::printf("%-16s %6d %11.1f%% %11.1f%% %10d\n", r.room.c_str(),
                  r.boxes, r.oob_before * 100.0, r.oob_after * 100.0,
                  r.unresolved);
    std::printf("aggregate OOB before: %.1f%%  after: %.1f%%  (%d boxes)\n",
                rep.aggregate_before * 100.0, rep.aggregate_after * 100.0,
                rep.total_boxes);
    for (const auto& [rule, n] : rep.rule_histogram)
      std::printf("rule %-14s %d\n", rule.c_str(), n);
  }
  return eval_report_to_json(rep);
}

Json cmd_trajectory(const CliOptions& opt, const TrajectoryFlags& flags) {
  ProjectDir dir{fs::path(opt.project)};
  ProjectLock lock(dir);
  AssetCatalog catalog = make_catalog(opt);
  PipelineContext ctx(dir, pipeline_options(opt));
  ctx.catalog = &catalog;

  Manifest m = dir.load_manifest();
  if (m.has(Stage::kTrajectory)) {
    ProjectState st = dir.load_state();
    TrajectoryConfig cfg = *st.traj_config;
    if (flags.camera_height->count()) cfg.camera_height = opt.camera_height;
    if (flags.wall_distance->count()) cfg.wall_distance = opt.wall_distance;
    if (flags.pitch_deg->count()) cfg.pitch = deg_to_rad(opt.pitch_deg);
    if (flags.inter_n->count()) cfg.inter_n = opt.inter_n;
    if (flags.n_random->count()) cfg.n_random = opt.n_random;
    if (flags.image_size->count())
      cfg.intrinsics = square_intrinsics(opt.image_size);
    edit_stage(ctx, Stage::kTrajectory, trajectory_config_to_json(cfg));
  } else {
    run_stage(ctx, Stage::kTrajectory, [&] { stage_trajectory(ctx); });
  }
  ProjectState st = dir.load_state();
  std::vector<std::string> stale = stale_stages(dir);
  if (!opt.json) {
    std::printf("poses %zu\n", st.trajectory.size());
    print_warnings(ctx.warnings);
    if (!stale.empty()) {
      std::printf("stale:");
      for (const auto& s : stale) std::printf(" %s", s.c_str());
      std::printf("\n");
    }
  }
  Json j;
  j["poses"] = st.trajectory.size();
  j["warnings"] = ctx.warnings;
  j["stale"] = stale;
  return j;
}

Json cmd_texture_handoff(const CliOptions& opt) {
  ProjectDir dir{fs::path(opt.project)};
  ProjectLock lock(dir);
  PipelineContext ctx(dir, pipeline_options(opt));
  texture_handoff(ctx, fs::path(opt.out));
  Json hj = parse_json_file(fs::path(opt.out) / "handoff.json");
  std::size_t n = hj["images"].size();
  if (!opt.json)
    std::printf("handoff %s (%zu images)\n", opt.out.c_str(), n);
  Json j;
  j["out"] = opt.out;
  j["images"] = n;
  return j;
}

Json cmd_bake(const CliOptions& opt) {
  ProjectDir dir{fs::path(opt.project)};
  ProjectLock lock(dir);
  PipelineContext ctx(dir, pipeline_options(opt));
  bake_project(ctx, fs::path(opt.images));
  if (!opt.json)
    std::printf("baked %s\n", dir.baked_mesh_file().string().c_str());
  Json j;
  j["baked"] = dir.baked_mesh_file().string();
  return j;
}

Json cmd_export(const CliOptions& opt) {
  ProjectDir dir{fs::path(opt.project)};
  ProjectLock lock(dir);
  PipelineContext ctx(dir, pipeline_options(opt));
  std::string format = opt.format;
  if (format.empty()) {
    std::string ext = fs::path(opt.out).extension().string();
    if (!ext.empty()) format = ext.substr(1);
  }
  if (format == "png") {
    ProjectState st = dir.load_state();
    if (!st.floorplan)
      throw ValidationError("floorplan debug image requires the floorplan stage");
    write_png_rgb(opt.out, floorplan_debug_image(*st.floorplan));
  } else {
    export_project(ctx, mesh_format_from_name(format), fs::path(opt.out));
  }
  if (!opt.json) std::printf("exported %s\n", opt.out.c_str());
  Json j;
  j["out"] = opt.out;
  j["format"] = format;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"House-scale 3D scene generation from a text description"};
  app.require_subcommand(1);
  CliOptions opt;

  auto add_common = [&](CLI::App* cmd, bool llm_flags) {
    cmd->add_option("--project", opt.project, "Project directory")->required();
    cmd->add_flag("--json", opt.json, "Machine-readable JSON report on stdout");
    if (llm_flags) {
      cmd->add_flag("--offline", opt.offline,
                    "Replay recorded fixtures; no network");
      cmd->add_option("--endpoint", opt.endpoint,
                      "Chat-completions endpoint URL");
      cmd->add_option("--model", opt.model, "Model name");
      cmd->add_option("--temperature", opt.temperature, "Sampling temperature");
      cmd->add_option("--fixtures", opt.fixtures,
                      "Fixture directory (default <project>/fixtures)");
      cmd->add_option("--catalog", opt.catalog_path, "Asset catalog JSONL");
    }
  };

  CLI::App* gen = app.add_subcommand("generate", "Run the full pipeline");
  add_common(gen, true);
  gen->add_option("description", opt.description, "House description")
      ->required();
  gen->add_option("--seed", opt.seed, "Generation seed");
  gen->add_option("--area", opt.area, "Total floor area, square meters");
  gen->add_option("--cell-size", opt.cell_size, "Grid cell size, meters");
  gen->add_option("--wall-height", opt.wall_height, "Wall height, meters");
  add_trajectory_flags(gen, opt);

  CLI::App* rerun = app.add_subcommand("rerun", "Re-run stale stages");
  add_common(rerun, true);

  CLI::App* edit = app.add_subcommand("edit", "Patch one stage's artifact");
  add_common(edit, true);
  edit->add_option("--stage", opt.stage, "Stage to edit")->required();
  edit->add_option("--room", opt.room, "Room key for layout edits");
  edit->add_option("--patch", opt.patch_file, "JSON patch file")->required();
  edit->add_flag("--rerun", opt.rerun_after, "Re-run stale stages afterwards");

  CLI::App* eval = app.add_subcommand("eval", "Print layout quality metrics");
  add_common(eval, false);

  CLI::App* traj =
      app.add_subcommand("trajectory", "Regenerate the camera trajectory");
  add_common(traj, false);
  TrajectoryFlags traj_flags = add_trajectory_flags(traj, opt);

  CLI::App* handoff = app.add_subcommand(
      "texture-handoff", "Bundle depth maps and poses for external inpainting");
  add_common(handoff, false);
  handoff->add_option("--out", opt.out, "Output directory")->required();

  CLI::App* bake =
      app.add_subcommand("bake", "Bake external images into vertex colors");
  add_common(bake, false);
  bake->add_option("--images", opt.images, "Directory of RGB images")
      ->required();

  CLI::App* exp = app.add_subcommand("export", "Export the scene mesh");
  add_common(exp, false);
  exp->add_option("--out", opt.out, "Output file")->required();
  exp->add_option("--format", opt.format, "obj, gltf, or png (floorplan)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  std::string command;
  Json report;
  int code = 0;
  std::string error_message;
  std::string error_stage;
  try {
    if (gen->parsed()) { command = "generate"; report = cmd_generate(opt); }
    else if (rerun->parsed()) { command = "rerun"; report = cmd_rerun(opt); }
    else if (edit->parsed()) { command = "edit"; report = cmd_edit(opt); }
    else if (eval->parsed()) { command = "eval"; report = cmd_eval(opt); }
    else if (traj->parsed()) { command = "trajectory"; report = cmd_trajectory(opt, traj_flags); }
    else if (handoff->parsed()) { command = "texture-handoff"; report = cmd_texture_handoff(opt); }
    else if (bake->parsed()) { command = "bake"; report = cmd_bake(opt); }
    else if (exp->parsed()) { command = "export"; report = cmd_export(opt); }
  } catch (const StageFailure& f) {
    code = f.exit_code();
    error_message = f.what();
    error_stage = stage_name(f.stage());
  } catch (const Error& e) {
    code = exit_code_for(e);
    error_message = e.what();
  } catch (const std::exception& e) {
    code = 1;
    error_message = e.what();
  }

  if (code != 0) {
    const char* kind = code == 3 ? "service" : code == 4 ? "io" : "validation";
    std::fprintf(stderr, "error (%s)%s%s: %s\n", kind,
                 error_stage.empty() ? "" : " at stage ",
                 error_stage.c_str(), error_message.c_str());
    if (opt.json) {
      Json j;
      j["command"] = command;
      j["ok"] = false;
      j["error"] = error_message;
      j["kind"] = kind;
      if (!error_stage.empty()) j["stage"] = error_stage;
      j["exit_code"] = code;
      std::printf("%s\n", j.dump(2).c_str());
    }
    return code;
  }

  if (opt.json) {
    report["command"] = command;
    report["ok"] = true;
    report["project"] = opt.project;
    std::printf("%s\n", report.dump(2).c_str());
  }
  return 0;
}
