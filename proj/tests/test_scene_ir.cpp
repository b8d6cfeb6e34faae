#include <gtest/gtest.h>

#include "homegen/scene_ir.hpp"

using namespace homegen;

TEST(RoomTypes, NamesRoundTrip) {
  for (int i = 0; i < kRoomTypeCount; ++i) {
    RoomType t = static_cast<RoomType>(i);
    auto back = room_type_from_name(room_type_name(t));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, t);
  }
  EXPECT_FALSE(room_type_from_name("dungeon").has_value());
  EXPECT_FALSE(room_type_from_name("").has_value());
}

TEST(SplitIndexedName, Basics) {
  auto s = split_indexed_name("storage2");
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->first, "storage");
  EXPECT_EQ(s->second, 2);
  EXPECT_FALSE(split_indexed_name("storage").has_value());
  EXPECT_FALSE(split_indexed_name("42").has_value());
  EXPECT_FALSE(split_indexed_name("room0").has_value());
  auto multi = split_indexed_name("bedroom12");
  ASSERT_TRUE(multi.has_value());
  EXPECT_EQ(multi->second, 12);
}

TEST(RoomMapping, ExoticNameMapsOntoCanonicalSlot) {
  // A fantasy room folds onto a canonical type; indices renumber per type in
  // order of appearance.
  std::vector<std::string> complete = {"dungeon1", "storage1"};
  std::vector<std::string> modified = {"storage1", "storage2"};
  EXPECT_TRUE(validate_room_mapping(complete, modified).pass());
  auto rooms = make_room_ids(complete, modified);
  ASSERT_EQ(rooms.size(), 2u);
  EXPECT_EQ(rooms[0].original_name, "dungeon1");
  EXPECT_EQ(rooms[0].canonical_type, RoomType::kStorage);
  EXPECT_EQ(rooms[0].index, 1);
  EXPECT_EQ(rooms[0].key(), "storage1");
  EXPECT_EQ(rooms[1].original_name, "storage1");
  EXPECT_EQ(rooms[1].key(), "storage2");
}

TEST(RoomMapping, RejectsBadShapes) {
  EXPECT_THROW(validate_room_mapping({"a1"}, {}), ValidationError);
  EXPECT_FALSE(validate_room_mapping({"a1"}, {"castle1"}).pass());
  EXPECT_FALSE(validate_room_mapping({"a1"}, {"bedroom"}).pass());
  // Duplicate key: the second bedroom1 should have been bedroom2.
  EXPECT_FALSE(
      validate_room_mapping({"a1", "b1"}, {"bedroom1", "bedroom1"}).pass());
  // Out-of-order indices are rejected even when the multiset is right.
  EXPECT_FALSE(
      validate_room_mapping({"a1", "b1"}, {"bedroom2", "bedroom1"}).pass());
  // Original names must also carry an index.
  EXPECT_FALSE(validate_room_mapping({"attic"}, {"storage1"}).pass());
}

static BubbleDiagram two_room_diagram() {
  BubbleDiagram d;
  d.rooms = make_room_ids({"living room1", "bedroom1"},
                          {"living_room1", "bedroom1"});
  d.connections = {{"living room1", "bedroom1"}};
  d.front_door_rooms = {"living room1"};
  return d;
}

TEST(BubbleDiagram, ValidDiagramPasses) {
  EXPECT_TRUE(validate_bubble_diagram(two_room_diagram()).pass());
}

TEST(BubbleDiagram, RejectsUnknownConnectionEndpoint) {
  BubbleDiagram d = two_room_diagram();
  d.connections.push_back({"living room1", "garage1"});
  EXPECT_FALSE(validate_bubble_diagram(d).pass());
}

TEST(BubbleDiagram, RejectsMissingFrontDoor) {
  BubbleDiagram d = two_room_diagram();
  d.front_door_rooms.clear();
  EXPECT_FALSE(validate_bubble_diagram(d).pass());
}

TEST(BubbleDiagram, RejectsDisconnectedRoom) {
  BubbleDiagram d = two_room_diagram();
  d.rooms.push_back(RoomId{"attic1", RoomType::kStorage, 1});
  EXPECT_FALSE(validate_bubble_diagram(d).pass());
}

TEST(BubbleDiagram, RejectsSelfConnection) {
  BubbleDiagram d = two_room_diagram();
  d.connections.push_back({"bedroom1", "bedroom1"});
  EXPECT_FALSE(validate_bubble_diagram(d).pass());
}

TEST(BubbleDiagram, FindRoomByOriginalName) {
  BubbleDiagram d = two_room_diagram();
  ASSERT_NE(d.find_room("living room1"), nullptr);
  EXPECT_EQ(d.find_room("living room1")->key(), "living_room1");
  EXPECT_EQ(d.find_room("no such room"), nullptr);
}

TEST(LayoutGraph, ValidGraphPasses) {
  LayoutGraph g;
  g.nodes = {FurnitureNode{"table1", "a table", 1.2, 0.8, 0.0, ""},
             FurnitureNode{"chair1", "a chair", 0.5, 0.5, 0.0, ""}};
  g.edges = {LayoutEdge{"table1", PlacementRule::kCenter, ""},
             LayoutEdge{"chair1", PlacementRule::kAround, "table1"}};
  EXPECT_TRUE(validate_layout_graph(g).pass());
}

TEST(LayoutGraph, RejectsAnchorRuleWithoutAnchor) {
  LayoutGraph g;
  g.nodes = {FurnitureNode{"chair1", "", 0.5, 0.5, 0.0, ""}};
  g.edges = {LayoutEdge{"chair1", PlacementRule::kAround, ""}};
  EXPECT_FALSE(validate_layout_graph(g).pass());
}

TEST(LayoutGraph, RejectsDanglingAnchorAndSelfAnchor) {
  LayoutGraph g;
  g.nodes = {FurnitureNode{"chair1", "", 0.5, 0.5, 0.0, ""}};
  g.edges = {LayoutEdge{"chair1", PlacementRule::kAround, "ghost1"}};
  EXPECT_FALSE(validate_layout_graph(g).pass());
  g.edges = {LayoutEdge{"chair1", PlacementRule::kAround, "chair1"}};
  EXPECT_FALSE(validate_layout_graph(g).pass());
}

TEST(LayoutGraph, RejectsAnchorCycle) {
  LayoutGraph g;
  g.nodes = {FurnitureNode{"a1", "", 0.5, 0.5, 0.0, ""},
             FurnitureNode{"b1", "", 0.5, 0.5, 0.0, ""}};
  g.edges = {LayoutEdge{"a1", PlacementRule::kBesides, "b1"},
             LayoutEdge{"b1", PlacementRule::kBesides, "a1"}};
  EXPECT_FALSE(validate_layout_graph(g).pass());
}

TEST(LayoutGraph, RejectsNonPositiveFootprintAndDuplicates) {
  LayoutGraph g;
  g.nodes = {FurnitureNode{"a1", "", 0.0, 0.5, 0.0, ""}};
  g.edges = {LayoutEdge{"a1", PlacementRule::kCenter, ""}};
  EXPECT_FALSE(validate_layout_graph(g).pass());
  g.nodes = {FurnitureNode{"a1", "", 0.5, 0.5, 0.0, ""},
             FurnitureNode{"a1", "", 0.5, 0.5, 0.0, ""}};
  EXPECT_FALSE(validate_layout_graph(g).pass());
}

TEST(PlacementRules, NameRoundTripAndRelativeSplit) {
  int relative = 0;
  for (int i = 0; i < 8; ++i) {
    PlacementRule r = static_cast<PlacementRule>(i);
    auto back = placement_rule_from_name(placement_rule_name(r));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, r);
    relative += is_room_relative_rule(r);
  }
  // corner, wall, center, ceiling stand alone; the other four need anchors.
  EXPECT_EQ(relative, 4);
  EXPECT_FALSE(placement_rule_from_name("place_nowhere").has_value());
}

TEST(PlacedBox, FrontFacesLocalPlusY) {
  PlacedBox b;
  b.yaw = 0.0;
  EXPECT_NEAR(b.front().x, 0.0, 1e-15);
  EXPECT_NEAR(b.front().y, 1.0, 1e-15);
  b.yaw = kPi / 2.0;
  EXPECT_NEAR(b.front().x, -1.0, 1e-12);
  EXPECT_NEAR(b.front().y, 0.0, 1e-12);
}

TEST(SceneMesh, AppendOffsetsIndicesAndLabels) {
  SceneMesh a;
  a.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  a.colors.assign(3, Vec3{1, 0, 0});
  a.faces = {{0, 1, 2}};
  a.submeshes = {Submesh{"first", 0, 1}};

  SceneMesh b;
  b.vertices = {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}};
  b.colors.assign(3, Vec3{0, 1, 0});
  b.faces = {{0, 1, 2}};

  a.append(b, "part");
  ASSERT_EQ(a.vertices.size(), 6u);
  ASSERT_EQ(a.faces.size(), 2u);
  EXPECT_EQ(a.faces[1][0], 3);
  ASSERT_EQ(a.submeshes.size(), 2u);
  EXPECT_EQ(a.submeshes[1].label, "part");
  EXPECT_EQ(a.submeshes[1].begin, 1);
  EXPECT_EQ(a.submeshes[1].count, 1);
}

TEST(SceneMesh, BoundsCoverAllVertices) {
  SceneMesh m;
  m.vertices = {{-1, 2, 0.5}, {3, -4, 2}, {0, 0, -1}};
  m.colors.assign(3, Vec3{});
  Aabb3 box = m.bounds();
  EXPECT_DOUBLE_EQ(box.lo.x, -1);
  EXPECT_DOUBLE_EQ(box.lo.y, -4);
  EXPECT_DOUBLE_EQ(box.lo.z, -1);
  EXPECT_DOUBLE_EQ(box.hi.x, 3);
  EXPECT_DOUBLE_EQ(box.hi.y, 2);
  EXPECT_DOUBLE_EQ(box.hi.z, 2);
}

TEST(CameraPose, ProjectRoundTripsPixelRay) {
  CameraPose p;
  p.translation = {2, 3, 1.5};
  p.rotation = Mat3::from_columns({1, 0, 0}, {0, 0, -1}, {0, 1, 0});
  p.intrinsics = Intrinsics{};  // 512x512, f = 256, c = 256

  Vec3 target = p.translation + p.forward() * 4.0;
  double px, py, depth;
  ASSERT_TRUE(p.project(target, px, py, depth));
  EXPECT_NEAR(px, 256.0, 1e-9);
  EXPECT_NEAR(py, 256.0, 1e-9);
  EXPECT_NEAR(depth, 4.0, 1e-12);

  // Projecting any point on a pixel's ray lands back on that pixel.
  for (int i = 0; i < 20; ++i) {
    double x = 17.0 + i * 11.3, y = 500.0 - i * 9.7;
    Vec3 dir = p.pixel_ray(x, y);
    EXPECT_NEAR(dir.norm(), 1.0, 1e-12);
    Vec3 q = p.translation + dir * 2.5;
    ASSERT_TRUE(p.project(q, px, py, depth));
    EXPECT_NEAR(px, x, 1e-9);
    EXPECT_NEAR(py, y, 1e-9);
  }

  Vec3 behind = p.translation - p.forward() * 1.0;
  EXPECT_FALSE(p.project(behind, px, py, depth));
}

TEST(DepthImage, BackgroundIsZero) {
  DepthImage d;
  d.width = 4;
  d.height = 2;
  d.depth.assign(8, 0.0);
  d.at(1, 1) = 3.5;
  EXPECT_DOUBLE_EQ(d.at(1, 1), 3.5);
  EXPECT_DOUBLE_EQ(d.at(0, 0), 0.0);
}
