#include "homegen/json_io.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "homegen/error.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {
namespace {

static bool veq(const Vec3& a, const Vec3& b) {
  return a.x == b.x && a.y == b.y && a.z == b.z;
}

static bool veq(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!veq(a[i], b[i])) return false;
  return true;
}

// Reference vectors from the published FNV-1a 64-bit test suite.
TEST(ContentHash, Fnv1a64ReferenceVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(ContentHash, Fnv1a64ChainsAcrossCalls) {
  EXPECT_EQ(fnv1a64("bar", fnv1a64("foo")), fnv1a64("foobar"));
}

TEST(ContentHash, Hex64Padding) {
  EXPECT_EQ(hex64(0), "0000000000000000");
  EXPECT_EQ(hex64(0xdeadbeefULL), "00000000deadbeef");
  EXPECT_EQ(hex64(0xffffffffffffffffULL), "ffffffffffffffff");
  EXPECT_EQ(hex64(0x0123456789abcdefULL), "0123456789abcdef");
}

TEST(ContentHash, HashOfCanonicalDump) {
  Json j;
  j["a"] = 1;
  EXPECT_EQ(canonical_dump(j), "{\"a\":1}");
  EXPECT_EQ(content_hash(j), "9c3e82dd6fcae8b1");
}

TEST(ContentHash, CanonicalDumpSortsKeys) {
  Json j;
  j["b"] = 1;
  j["a"] = 2;
  EXPECT_EQ(canonical_dump(j), "{\"a\":2,\"b\":1}");
  Json k;
  k["a"] = 2;
  k["b"] = 1;
  EXPECT_EQ(content_hash(j), content_hash(k));
}

class JsonFileTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("json_io_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(JsonFileTest, WriteThenParseRoundTrips) {
  Json j;
  j["name"] = "sofa1";
  j["size"] = Json::array({2.0, 0.9});
  fs::path p = dir_ / "g.json";
  write_json_file(p, j);
  EXPECT_EQ(parse_json_file(p), j);
  // Pretty-printed with a trailing newline, and no stray temp file left.
  std::ifstream in(p);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  EXPECT_EQ(text.back(), '\n');
  EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
}

TEST_F(JsonFileTest, MalformedFileRaisesParseErrorWithPath) {
  fs::path p = dir_ / "bad.json";
  std::ofstream(p) << "{not json";
  try {
    parse_json_file(p);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos);
  }
}

TEST_F(JsonFileTest, MissingFileRaisesIoError) {
  EXPECT_THROW(parse_json_file(dir_ / "absent.json"), IoError);
}

TEST(StrictAccess, MissingFieldNamesTheField) {
  Json j = Json::object();
  try {
    jio::get_string(j, "style_prompt");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("style_prompt"), std::string::npos);
  }
}

TEST(StrictAccess, TypeMismatchesThrow) {
  Json j;
  j["s"] = 5;
  j["n"] = "x";
  j["i"] = 1.5;
  j["b"] = 0;
  j["a"] = Json::object();
  j["o"] = Json::array();
  EXPECT_THROW(jio::get_string(j, "s"), ParseError);
  EXPECT_THROW(jio::get_number(j, "n"), ParseError);
  EXPECT_THROW(jio::get_int(j, "i"), ParseError);
  EXPECT_THROW(jio::get_bool(j, "b"), ParseError);
  EXPECT_THROW(jio::get_array(j, "a"), ParseError);
  EXPECT_THROW(jio::get_object(j, "o"), ParseError);
  EXPECT_THROW(jio::member(Json::array(), "k"), ParseError);
}

TEST(StrictAccess, IntAcceptsIntegersOnly) {
  Json j;
  j["k"] = 7;
  EXPECT_EQ(jio::get_int(j, "k"), 7);
  j["k"] = 7.0;  // stored as double
  EXPECT_THROW(jio::get_int(j, "k"), ParseError);
}

TEST(StrictAccess, Vec3RoundTripAndShapeChecks) {
  Vec3 v{1.5, -2.0, 0.25};
  EXPECT_TRUE(veq(jio::vec3_from(jio::vec3_to(v), "v"), v));
  EXPECT_THROW(jio::vec3_from(Json::array({1, 2}), "v"), ParseError);
  EXPECT_THROW(jio::vec3_from(Json::array({1, 2, "x"}), "v"), ParseError);
  EXPECT_THROW(jio::vec3_from(Json("nope"), "v"), ParseError);
}

TEST(RelaxedParse, ExactJsonPassesThrough) {
  Json j = parse_relaxed_json("{\"a\": [1, 2]}");
  EXPECT_EQ(j["a"][1], 2);
}

TEST(RelaxedParse, StripsCodeFence) {
  std::string text = "```json\n{\"rooms\": 3}\n```";
  EXPECT_EQ(parse_relaxed_json(text)["rooms"], 3);
  text = "  ```\n[1, 2]\n```  \n";
  EXPECT_EQ(parse_relaxed_json(text)[0], 1);
}

TEST(RelaxedParse, StripsTrailingCommas) {
  EXPECT_EQ(parse_relaxed_json("[1, 2, 3, ]").size(), 3u);
  EXPECT_EQ(parse_relaxed_json("{\"a\": 1,\n}")["a"], 1);
  EXPECT_EQ(parse_relaxed_json("```\n{\"a\": [1,],}\n```")["a"].size(), 1u);
}

TEST(RelaxedParse, CommasInsideStringsSurvive) {
  Json j = parse_relaxed_json("{\"s\": \"a,]b\"}");
  EXPECT_EQ(j["s"], "a,]b");
  j = parse_relaxed_json("{\"s\": \"quote\\\",]\", \"t\": [1,]}");
  EXPECT_EQ(j["s"], "quote\",]");
  EXPECT_EQ(j["t"].size(), 1u);
}

TEST(RelaxedParse, StillMalformedRaisesParseError) {
  EXPECT_THROW(parse_relaxed_json("not json at all"), ParseError);
  EXPECT_THROW(parse_relaxed_json("{\"a\": }"), ParseError);
  EXPECT_THROW(parse_relaxed_json(""), ParseError);
}

TEST(RelaxedParse, FenceWithoutCloseLeftAlone) {
  EXPECT_THROW(parse_relaxed_json("```json\n{\"a\": 1}"), ParseError);
  EXPECT_EQ(strip_code_fence("plain"), "plain");
}

TEST(HouseSpecJson, RoundTrip) {
  HouseSpec s;
  s.description = "a cozy cabin";
  s.style_prompt = "warm wood, candle light";
  s.wall_height = 2.7;
  s.seed = 0xfedcba9876543210ULL;
  HouseSpec back = house_spec_from_json(house_spec_to_json(s));
  EXPECT_EQ(back.description, s.description);
  EXPECT_EQ(back.style_prompt, s.style_prompt);
  EXPECT_DOUBLE_EQ(back.wall_height, s.wall_height);
  EXPECT_EQ(back.seed, s.seed);
}

TEST(HouseSpecJson, RejectsBadFields) {
  HouseSpec s;
  s.description = "x";
  s.style_prompt = "y";
  s.wall_height = 3.0;
  s.seed = 1;
  Json j = house_spec_to_json(s);
  Json bad = j;
  bad["wall_height"] = 0.0;
  EXPECT_THROW(house_spec_from_json(bad), ParseError);
  bad = j;
  bad["seed"] = "seven";
  EXPECT_THROW(house_spec_from_json(bad), ParseError);
  bad = j;
  bad.erase("description");
  EXPECT_THROW(house_spec_from_json(bad), ParseError);
}

TEST(DiagramJson, RoundTripKeepsOriginalNames) {
  BubbleDiagram d;
  d.rooms = make_room_ids({"dungeon1", "storage1"}, {"storage1", "storage2"});
  d.connections = {{"dungeon1", "storage1"}};
  d.front_door_rooms = {"dungeon1"};
  BubbleDiagram back = diagram_from_json(diagram_to_json(d));
  ASSERT_EQ(back.rooms.size(), 2u);
  EXPECT_EQ(back.rooms[0].original_name, "dungeon1");
  EXPECT_EQ(back.rooms[0].key(), "storage1");
  EXPECT_EQ(back.rooms[1].key(), "storage2");
  ASSERT_EQ(back.connections.size(), 1u);
  EXPECT_EQ(back.connections[0].first, "dungeon1");
  EXPECT_EQ(back.front_door_rooms, d.front_door_rooms);
}

TEST(DiagramJson, RejectsMalformedShapes) {
  BubbleDiagram d;
  d.rooms = make_room_ids({"bedroom1"}, {"bedroom1"});
  d.front_door_rooms = {"bedroom1"};
  Json j = diagram_to_json(d);
  Json bad = j;
  bad["connection"].push_back(Json::array({"only_one"}));
  EXPECT_THROW(diagram_from_json(bad), ParseError);
  bad = j;
  bad["modified_room_list"].push_back(42);
  EXPECT_THROW(diagram_from_json(bad), ParseError);
  bad = j;
  bad.erase("front_door");
  EXPECT_THROW(diagram_from_json(bad), ParseError);
}

static LayoutGraph sample_graph() {
  LayoutGraph g;
  FurnitureNode sofa;
  sofa.name = "sofa1";
  sofa.description = "a low grey sofa";
  sofa.length = 2.0;
  sofa.width = 0.9;
  sofa.height = 0.8;
  sofa.asset_id = "sofa_a";
  FurnitureNode table;
  table.name = "coffee_table1";
  table.description = "oak coffee table";
  table.length = 1.1;
  table.width = 0.6;
  g.nodes = {sofa, table};
  LayoutEdge e;
  e.child = "coffee_table1";
  e.rule = PlacementRule::kFront;
  e.anchor = "sofa1";
  g.edges = {e};
  return g;
}

TEST(LayoutGraphJson, RoundTripWithOptionalMaps) {
  LayoutGraph g = sample_graph();
  LayoutGraph back = layout_graph_from_json(layout_graph_to_json(g));
  ASSERT_EQ(back.nodes.size(), 2u);
  const FurnitureNode* sofa = back.find_node("sofa1");
  ASSERT_NE(sofa, nullptr);
  EXPECT_DOUBLE_EQ(sofa->height, 0.8);
  EXPECT_EQ(sofa->asset_id, "sofa_a");
  const FurnitureNode* table = back.find_node("coffee_table1");
  ASSERT_NE(table, nullptr);
  EXPECT_DOUBLE_EQ(table->height, 0.0);
  EXPECT_TRUE(table->asset_id.empty());
  ASSERT_EQ(back.edges.size(), 1u);
  EXPECT_EQ(back.edges[0].rule, PlacementRule::kFront);
  EXPECT_EQ(back.edges[0].anchor, "sofa1");
}

TEST(LayoutGraphJson, RejectsInconsistentMaps) {
  Json j = layout_graph_to_json(sample_graph());
  Json bad = j;
  bad["furniture_sizes"].erase("sofa1");
  EXPECT_THROW(layout_graph_from_json(bad), ParseError);
  bad = j;
  bad["furniture_sizes"]["ghost1"] = Json::array({1.0, 1.0});
  EXPECT_THROW(layout_graph_from_json(bad), ParseError);
  bad = j;
  bad["furniture_relations"][0][1] = "place_sideways";
  EXPECT_THROW(layout_graph_from_json(bad), ParseError);
  bad = j;
  bad["furniture_sizes"]["sofa1"] = Json::array({2.0});
  EXPECT_THROW(layout_graph_from_json(bad), ParseError);
}

static Floorplan sample_floorplan() {
  Floorplan f;
  f.cell_size = 0.5;
  f.width = 4;
  f.height = 3;
  f.rooms = make_room_ids({"living room1", "bedroom1"},
                          {"living_room1", "bedroom1"});
  f.grid = {0, 0, 1, 1, 0, 0, 1, 1, -1, -1, 1, 1};
  WallSegment w;
  w.room_a = 0;
  w.room_b = 1;
  w.vertical = true;
  w.fixed = 1.0;
  w.lo = 0.0;
  w.hi = 1.5;
  w.a_low_side = true;
  f.wall_segments = {w};
  DoorOpening d;
  d.room_a = 0;
  d.room_b = 1;
  d.vertical = true;
  d.fixed = 1.0;
  d.lo = 0.2;
  d.hi = 1.2;
  d.kind = DoorKind::kInterior;
  DoorOpening front = d;
  front.room_b = -1;
  front.kind = DoorKind::kFront;
  f.doors = {d, front};
  return f;
}

TEST(FloorplanJson, RoundTripReconstructsGridExactly) {
  Floorplan f = sample_floorplan();
  Floorplan back = floorplan_from_json(floorplan_to_json(f));
  EXPECT_EQ(back.grid, f.grid);
  EXPECT_EQ(back.width, f.width);
  EXPECT_EQ(back.height, f.height);
  EXPECT_DOUBLE_EQ(back.cell_size, f.cell_size);
  ASSERT_EQ(back.rooms.size(), 2u);
  EXPECT_EQ(back.rooms[0].original_name, "living room1");
  ASSERT_EQ(back.wall_segments.size(), 1u);
  EXPECT_TRUE(back.wall_segments[0].a_low_side);
  ASSERT_EQ(back.doors.size(), 2u);
  EXPECT_EQ(back.doors[1].kind, DoorKind::kFront);
}

TEST(FloorplanJson, RunLengthEncodingIsCompact) {
  Floorplan f = sample_floorplan();
  f.grid.assign(static_cast<std::size_t>(f.width * f.height), 0);
  Json j = floorplan_to_json(f);
  EXPECT_EQ(j["grid_rle"].size(), 1u);
  EXPECT_EQ(j["grid_rle"][0][1], 12);
}

TEST(FloorplanJson, RejectsCorruptGrids) {
  Json j = floorplan_to_json(sample_floorplan());
  Json bad = j;
  bad["grid_rle"][0][1] = 1000;  // overflows 4x3
  EXPECT_THROW(floorplan_from_json(bad), ParseError);
  bad = j;
  bad["grid_rle"] = Json::array({Json::array({0, 1})});  // underfills
  EXPECT_THROW(floorplan_from_json(bad), ParseError);
  bad = j;
  bad["grid_rle"][0][0] = 5;  // only 2 rooms
  EXPECT_THROW(floorplan_from_json(bad), ParseError);
  bad = j;
  bad["doors"][0]["kind"] = "garage";
  EXPECT_THROW(floorplan_from_json(bad), ParseError);
  bad = j;
  bad["cell_size"] = -0.5;
  EXPECT_THROW(floorplan_from_json(bad), ParseError);
}

TEST(PlacedBoxJson, RoundTripWithWarnings) {
  PlacedBox b;
  b.label = "sofa1";
  b.asset_id = "sofa_a";
  b.center = Vec3{1.0, 2.0, 0.4};
  b.half_extents = Vec3{1.0, 0.45, 0.4};
  b.yaw = 1.25;
  b.rule_used = PlacementRule::kWall;
  b.anchor_label = "";
  b.warnings = {"squeezed against east wall"};
  PlacedBox back = placed_box_from_json(placed_box_to_json(b));
  EXPECT_EQ(back.label, b.label);
  EXPECT_EQ(back.asset_id, b.asset_id);
  EXPECT_TRUE(veq(back.center, b.center));
  EXPECT_TRUE(veq(back.half_extents, b.half_extents));
  EXPECT_DOUBLE_EQ(back.yaw, b.yaw);
  EXPECT_EQ(back.rule_used, PlacementRule::kWall);
  EXPECT_EQ(back.warnings, b.warnings);
}

TEST(PlacedBoxJson, RejectsDegenerateBox) {
  PlacedBox b;
  b.label = "x";
  b.center = Vec3{0, 0, 0};
  b.half_extents = Vec3{1, 1, 1};
  b.rule_used = PlacementRule::kCenter;
  Json j = placed_box_to_json(b);
  j["half_extents"][2] = 0.0;
  EXPECT_THROW(placed_box_from_json(j), ParseError);
}

TEST(RefineReportJson, RoundTrip) {
  RefineReport r;
  BoxAdjustment a;
  a.label = "sofa1";
  a.translation = Vec3{0.1, -0.05, 0.0};
  a.yaw_delta = 0.02;
  a.z_snap = 0.4;
  r.adjustments = {a};
  r.oob_before = 0.25;
  r.oob_after = 0.0;
  r.unresolved = {"plant1"};
  r.iterations = 7;
  RefineReport back = refine_report_from_json(refine_report_to_json(r));
  ASSERT_EQ(back.adjustments.size(), 1u);
  EXPECT_EQ(back.adjustments[0].label, "sofa1");
  EXPECT_TRUE(veq(back.adjustments[0].translation, a.translation));
  EXPECT_DOUBLE_EQ(back.oob_before, 0.25);
  EXPECT_EQ(back.unresolved, r.unresolved);
  EXPECT_EQ(back.iterations, 7);
}

TEST(CameraJson, PoseRoundTripIsExact) {
  CameraPose p;
  p.rotation = Mat3::rotation_z(0.7);
  p.translation = Vec3{3.0, -1.0, 1.2};
  p.intrinsics = Intrinsics{128.0, 128.0, 128.0, 128.0, 256, 256};
  p.facing = Facing::kObject;
  CameraPose back = camera_pose_from_json(camera_pose_to_json(p));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      EXPECT_EQ(back.rotation.m[r][c], p.rotation.m[r][c]);
  EXPECT_TRUE(veq(back.translation, p.translation));
  EXPECT_EQ(back.intrinsics.width, 256);
  EXPECT_EQ(back.facing, Facing::kObject);
}

TEST(CameraJson, RejectsBadPose) {
  CameraPose p;
  p.intrinsics = Intrinsics{128.0, 128.0, 128.0, 128.0, 256, 256};
  Json j = camera_pose_to_json(p);
  Json bad = j;
  bad["rotation"] = Json::array({1, 0, 0});
  EXPECT_THROW(camera_pose_from_json(bad), ParseError);
  bad = j;
  bad["facing"] = "backwards";
  EXPECT_THROW(camera_pose_from_json(bad), ParseError);
  bad = j;
  bad["intrinsics"]["fx"] = 0.0;
  EXPECT_THROW(camera_pose_from_json(bad), ParseError);
}

TEST(TrajectoryConfigJson, RoundTripAndValidation) {
  TrajectoryConfig c;
  c.camera_height = 1.4;
  c.wall_distance = 0.6;
  c.pitch = -0.1;
  c.inter_n = 12;
  c.n_random = 3;
  c.seed = 99;
  c.intrinsics = Intrinsics{64.0, 64.0, 64.0, 64.0, 128, 128};
  TrajectoryConfig back = trajectory_config_from_json(trajectory_config_to_json(c));
  EXPECT_DOUBLE_EQ(back.camera_height, 1.4);
  EXPECT_EQ(back.inter_n, 12);
  EXPECT_EQ(back.n_random, 3);
  EXPECT_EQ(back.seed, 99u);

  Json j = trajectory_config_to_json(c);
  Json bad = j;
  bad["inter_n"] = 0;
  EXPECT_THROW(trajectory_config_from_json(bad), ParseError);
  bad = j;
  bad["n_random"] = -1;
  EXPECT_THROW(trajectory_config_from_json(bad), ParseError);
}

TEST(MeshJson, RoundTripAndBoundsChecks) {
  SceneMesh m;
  m.vertices = {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}};
  m.faces = {{0, 1, 2}};
  m.colors = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  Submesh s;
  s.label = "tri";
  s.begin = 0;
  s.count = 1;
  m.submeshes = {s};
  SceneMesh back = mesh_from_json(mesh_to_json(m));
  EXPECT_TRUE(veq(back.vertices, m.vertices));
  EXPECT_EQ(back.faces, m.faces);
  EXPECT_TRUE(veq(back.colors, m.colors));
  ASSERT_EQ(back.submeshes.size(), 1u);
  EXPECT_EQ(back.submeshes[0].label, "tri");

  Json j = mesh_to_json(m);
  Json bad = j;
  bad["faces"][0][2] = 9;
  EXPECT_THROW(mesh_from_json(bad), ParseError);
  bad = j;
  bad["colors"].erase(2);
  EXPECT_THROW(mesh_from_json(bad), ParseError);
  bad = j;
  bad["submeshes"][0]["count"] = 4;
  EXPECT_THROW(mesh_from_json(bad), ParseError);
}

}  // namespace
}  // namespace homegen
