#include "homegen/floorplan.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "homegen/error.hpp"
#include "homegen/json_io.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {
namespace {

static BubbleDiagram apartment_diagram() {
  BubbleDiagram d;
  d.rooms = make_room_ids(
      {"living room1", "kitchen1", "bedroom1", "bedroom2", "bathroom1"},
      {"living_room1", "kitchen1", "bedroom1", "bedroom2", "bathroom1"});
  d.connections = {{"living room1", "kitchen1"},
                   {"living room1", "bedroom1"},
                   {"living room1", "bedroom2"},
                   {"living room1", "bathroom1"}};
  d.front_door_rooms = {"living room1"};
  return d;
}

static BubbleDiagram dining_diagram() {
  BubbleDiagram d;
  d.rooms = make_room_ids({"dining_room1", "bedroom1", "bedroom2"},
                          {"dining_room1", "bedroom1", "bedroom2"});
  d.connections = {{"dining_room1", "bedroom1"}, {"dining_room1", "bedroom2"}};
  d.front_door_rooms = {"bedroom1"};
  return d;
}

static BubbleDiagram single_diagram() {
  BubbleDiagram d;
  d.rooms = make_room_ids({"bedroom1"}, {"bedroom1"});
  d.front_door_rooms = {"bedroom1"};
  return d;
}

// Independent adjacency oracle: longest shared-boundary run between two room
// ids, scanning the raw grid directly.
static int oracle_shared_run(const Floorplan& f, int a, int b) {
  auto at = [&](int x, int y) -> int {
    if (x < 0 || y < 0 || x >= f.width || y >= f.height) return -1;
    return f.grid[static_cast<std::size_t>(y) * f.width + x];
  };
  int best = 0;
  for (int x = 0; x <= f.width; ++x) {
    int run = 0;
    for (int y = 0; y < f.height; ++y) {
      int l = at(x - 1, y), r = at(x, y);
      run = ((l == a && r == b) || (l == b && r == a)) ? run + 1 : 0;
      best = std::max(best, run);
    }
  }
  for (int y = 0; y <= f.height; ++y) {
    int run = 0;
    for (int x = 0; x < f.width; ++x) {
      int d = at(x, y - 1), u = at(x, y);
      run = ((d == a && u == b) || (d == b && u == a)) ? run + 1 : 0;
      best = std::max(best, run);
    }
  }
  return best;
}

static int oracle_component_count(const std::vector<std::pair<int, int>>& cells) {
  if (cells.empty()) return 0;
  std::set<std::pair<int, int>> open(cells.begin(), cells.end());
  int components = 0;
  while (!open.empty()) {
    ++components;
    std::queue<std::pair<int, int>> q;
    q.push(*open.begin());
    open.erase(open.begin());
    while (!q.empty()) {
      auto [x, y] = q.front();
      q.pop();
      for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        auto it = open.find({x + dx, y + dy});
        if (it != open.end()) {
          q.push(*it);
          open.erase(it);
        }
      }
    }
  }
  return components;
}

TEST(Synthesize, DeterministicAcrossCalls) {
  BubbleDiagram d = apartment_diagram();
  Floorplan a = synthesize_floorplan(d);
  Floorplan b = synthesize_floorplan(d);
  EXPECT_EQ(floorplan_to_json(a).dump(), floorplan_to_json(b).dump());
  Floorplan da = place_doors(a, d);
  Floorplan db = place_doors(b, d);
  EXPECT_EQ(floorplan_to_json(da).dump(), floorplan_to_json(db).dump());
}

TEST(Synthesize, SingleRoomFillsRequestedSquare) {
  Floorplan f = synthesize_floorplan(single_diagram(), 16.0, 0.25);
  EXPECT_EQ(f.width, 16);
  EXPECT_EQ(f.height, 16);
  EXPECT_DOUBLE_EQ(f.room_area(0), 16.0);
  ASSERT_EQ(f.wall_segments.size(), 4u);
  for (const auto& w : f.wall_segments) {
    EXPECT_EQ(w.room_a, 0);
    EXPECT_EQ(w.room_b, -1);
    EXPECT_DOUBLE_EQ(w.length(), 4.0);
  }
}

TEST(Synthesize, GridIsAPartitionIntoConnectedRooms) {
  BubbleDiagram d = apartment_diagram();
  Floorplan f = synthesize_floorplan(d);
  const int n = static_cast<int>(f.rooms.size());
  for (auto v : f.grid) {
    EXPECT_GE(v, 0);  // guillotine partition leaves no unassigned cells
    EXPECT_LT(v, n);
  }
  std::vector<std::pair<int, int>> house;
  for (int r = 0; r < n; ++r) {
    auto cells = f.room_cells(r);
    EXPECT_FALSE(cells.empty());
    EXPECT_EQ(oracle_component_count(cells), 1) << f.rooms[r].key();
    house.insert(house.end(), cells.begin(), cells.end());
  }
  EXPECT_EQ(oracle_component_count(house), 1);
}

TEST(Synthesize, AreasTrackPriorsAndTotal) {
  BubbleDiagram d = apartment_diagram();
  double total = 48.0;
  Floorplan f = synthesize_floorplan(d, total);
  double sum = 0;
  std::map<std::string, double> area;
  for (int r = 0; r < static_cast<int>(f.rooms.size()); ++r) {
    sum += f.room_area(r);
    area[f.rooms[r].key()] = f.room_area(r);
  }
  double ring = (2.0 * (f.width + f.height)) * f.cell_size * f.cell_size;
  EXPECT_NEAR(sum, total, ring);
  EXPECT_GT(area["living_room1"], area["bathroom1"]);
  EXPECT_GT(area["bedroom1"], area["bathroom1"]);
  for (const auto& [key, a] : area) EXPECT_GE(a, kMinRoomArea * 0.5) << key;
}

TEST(Synthesize, ConnectionsBecomeSharedWalls) {
  for (const BubbleDiagram& d : {apartment_diagram(), dining_diagram()}) {
    Floorplan f = synthesize_floorplan(d);
    const int need =
        static_cast<int>(std::ceil(kDoorWidth / f.cell_size - 1e-9));
    for (const auto& [a, b] : d.connections) {
      int ia = f.room_index(d.find_room(a)->key());
      int ib = f.room_index(d.find_room(b)->key());
      EXPECT_GE(oracle_shared_run(f, ia, ib), need) << a << " - " << b;
    }
  }
}

TEST(Synthesize, WallSegmentsMatchGridBoundaries) {
  Floorplan f = synthesize_floorplan(dining_diagram());
  for (const auto& w : f.wall_segments) {
    EXPECT_GT(w.length(), 0.0);
    // Sample the cell pair across the middle of the segment.
    double mid = (w.lo + w.hi) / 2;
    int fixed_cell = static_cast<int>(std::round(w.fixed / f.cell_size));
    int along = static_cast<int>(mid / f.cell_size);
    int la, lb;
    if (w.vertical) {
      la = f.at(fixed_cell - 1, along);
      lb = fixed_cell < f.width ? f.at(fixed_cell, along) : -1;
    } else {
      la = f.at(along, fixed_cell - 1);
      lb = fixed_cell < f.height ? f.at(along, fixed_cell) : -1;
    }
    if (fixed_cell == 0) la = -1;
    std::set<int> got{la, lb};
    std::set<int> want{w.room_a, w.room_b};
    EXPECT_EQ(got, want) << "wall at fixed=" << w.fixed;
  }
}

TEST(Synthesize, InfeasibleAreasAreTypedErrors) {
  BubbleDiagram two;
  two.rooms = make_room_ids({"bedroom1", "bedroom2"}, {"bedroom1", "bedroom2"});
  two.connections = {{"bedroom1", "bedroom2"}};
  two.front_door_rooms = {"bedroom1"};
  EXPECT_THROW(synthesize_floorplan(two, 6.0), InfeasibleError);
  EXPECT_THROW(synthesize_floorplan(two, 0.5), InfeasibleError);
  BubbleDiagram bad = two;
  bad.front_door_rooms = {};
  EXPECT_THROW(synthesize_floorplan(bad), ValidationError);
  EXPECT_THROW(synthesize_floorplan(two, 0.0, -0.1), ValidationError);
}

TEST(Doors, OnePerConnectionAndFrontRoom) {
  BubbleDiagram d = apartment_diagram();
  Floorplan f = place_doors(synthesize_floorplan(d), d);
  int interior = 0, front = 0;
  for (const auto& door : f.doors) {
    if (door.kind == DoorKind::kInterior) ++interior;
    if (door.kind == DoorKind::kFront) {
      ++front;
      EXPECT_EQ(door.room_b, -1);
      EXPECT_EQ(f.rooms[door.room_a].key(), "living_room1");
    }
    EXPECT_NEAR(door.hi - door.lo, kDoorWidth, 1e-12);
  }
  EXPECT_EQ(interior, static_cast<int>(d.connections.size()));
  EXPECT_EQ(front, 1);
}

TEST(Doors, EveryDoorLiesInsideItsWallOffTheCorners) {
  BubbleDiagram d = apartment_diagram();
  Floorplan f = place_doors(synthesize_floorplan(d), d);
  for (const auto& door : f.doors) {
    const WallSegment* host = nullptr;
    for (const auto& w : f.wall_segments) {
      if (w.vertical != door.vertical || w.fixed != door.fixed) continue;
      std::set<int> wr{w.room_a, w.room_b}, dr{door.room_a, door.room_b};
      if (wr != dr) continue;
      if (door.lo >= w.lo - 1e-9 && door.hi <= w.hi + 1e-9) {
        host = &w;
        break;
      }
    }
    ASSERT_NE(host, nullptr);
    EXPECT_GE(door.lo, host->lo + f.cell_size - 1e-9);
    EXPECT_LE(door.hi, host->hi - f.cell_size + 1e-9);
  }
}

TEST(Doors, CenterSnapsToCellGrid) {
  BubbleDiagram d = single_diagram();
  Floorplan f = place_doors(synthesize_floorplan(d, 16.0, 0.25), d);
  ASSERT_EQ(f.doors.size(), 1u);
  const DoorOpening& door = f.doors[0];
  // Walls span [0, 4]; the centered cut lands at 0.25 * round(4 / 0.5) = 2.
  EXPECT_NEAR((door.lo + door.hi) / 2, 2.0, 1e-12);
  EXPECT_EQ(door.kind, DoorKind::kFront);
}

TEST(Doors, PaperExampleDiagramGetsTwoInteriorOneFront) {
  BubbleDiagram d = dining_diagram();
  Floorplan f = place_doors(synthesize_floorplan(d), d);
  int interior = 0, front = 0;
  for (const auto& door : f.doors) {
    if (door.kind == DoorKind::kInterior) ++interior;
    else ++front;
  }
  EXPECT_EQ(interior, 2);
  EXPECT_EQ(front, 1);
  // The front door belongs to bedroom1 and opens to the exterior.
  const DoorOpening* fd = nullptr;
  for (const auto& door : f.doors)
    if (door.kind == DoorKind::kFront) fd = &door;
  ASSERT_NE(fd, nullptr);
  EXPECT_EQ(f.rooms[fd->room_a].key(), "bedroom1");
  EXPECT_EQ(fd->room_b, -1);
}

TEST(Decompose, RectangleMaskIsOneRectangle) {
  std::vector<std::pair<int, int>> cells;
  for (int y = 2; y < 5; ++y)
    for (int x = 1; x < 7; ++x) cells.emplace_back(x, y);
  auto rects = decompose_mask(cells);
  ASSERT_EQ(rects.size(), 1u);
  EXPECT_EQ(rects[0], (CellRect{1, 2, 7, 5}));
}

// Brute-force partition oracle: every mask cell covered exactly once and no
// rectangle covers a non-mask cell.
static void expect_exact_partition(const std::vector<std::pair<int, int>>& cells,
                                   const std::vector<CellRect>& rects) {
  std::map<std::pair<int, int>, int> cover;
  for (const auto& r : rects)
    for (int y = r.y0; y < r.y1; ++y)
      for (int x = r.x0; x < r.x1; ++x) cover[{x, y}]++;
  std::set<std::pair<int, int>> mask(cells.begin(), cells.end());
  EXPECT_EQ(cover.size(), mask.size());
  for (const auto& [cell, count] : cover) {
    EXPECT_EQ(count, 1);
    EXPECT_TRUE(mask.count(cell));
  }
}

TEST(Decompose, LShapePartitionsExactly) {
  std::vector<std::pair<int, int>> cells;
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 2; ++x) cells.emplace_back(x, y);
  for (int y = 0; y < 2; ++y)
    for (int x = 2; x < 5; ++x) cells.emplace_back(x, y);
  auto rects = decompose_mask(cells);
  EXPECT_EQ(rects.size(), 2u);
  expect_exact_partition(cells, rects);
}

TEST(Decompose, PlusShapePartitionsExactly) {
  std::vector<std::pair<int, int>> cells;
  for (int y = 0; y < 9; ++y)
    for (int x = 3; x < 6; ++x) cells.emplace_back(x, y);
  for (int y = 3; y < 6; ++y)
    for (int x = 0; x < 9; ++x)
      if (x < 3 || x >= 6) cells.emplace_back(x, y);
  auto rects = decompose_mask(cells);
  expect_exact_partition(cells, rects);
  auto again = decompose_mask(cells);
  EXPECT_EQ(rects.size(), again.size());
  for (std::size_t i = 0; i < rects.size(); ++i) EXPECT_EQ(rects[i], again[i]);
}

TEST(Decompose, EmptyMaskIsError) {
  EXPECT_THROW(decompose_mask({}), ValidationError);
}

TEST(Decompose, RoomRectanglesCoverRoomArea) {
  Floorplan f = synthesize_floorplan(apartment_diagram());
  for (int r = 0; r < static_cast<int>(f.rooms.size()); ++r) {
    double covered = 0;
    for (const auto& rect : rectangles_of_room(f, r)) covered += rect.area();
    EXPECT_NEAR(covered, f.room_area(r), 1e-9);
  }
}

// Mesh helpers for the extrusion checks.
static double submesh_area(const SceneMesh& m, const Submesh& s) {
  double area = 0;
  for (int i = s.begin; i < s.begin + s.count; ++i) {
    const auto& f = m.faces[static_cast<std::size_t>(i)];
    Vec3 a = m.vertices[static_cast<std::size_t>(f[0])];
    Vec3 b = m.vertices[static_cast<std::size_t>(f[1])];
    Vec3 c = m.vertices[static_cast<std::size_t>(f[2])];
    area += 0.5 * (b - a).cross(c - a).norm();
  }
  return area;
}

static Vec3 face_normal(const SceneMesh& m, int i) {
  const auto& f = m.faces[static_cast<std::size_t>(i)];
  Vec3 a = m.vertices[static_cast<std::size_t>(f[0])];
  Vec3 b = m.vertices[static_cast<std::size_t>(f[1])];
  Vec3 c = m.vertices[static_cast<std::size_t>(f[2])];
  return (b - a).cross(c - a).normalized();
}

TEST(Extrude, SingleRoomAreasMatchClosedForm) {
  BubbleDiagram d = single_diagram();
  Floorplan f = place_doors(synthesize_floorplan(d, 16.0, 0.25), d);
  SceneMesh m = extrude_base_mesh(f, 3.0);
  std::map<std::string, double> area;
  for (const auto& s : m.submeshes) area[s.label] += submesh_area(m, s);
  EXPECT_NEAR(area["bedroom1/floor"], 16.0, 1e-9);
  EXPECT_NEAR(area["bedroom1/ceiling"], 16.0, 1e-9);
  // Four 4 m x 3 m sheets minus one door opening.
  EXPECT_NEAR(area["bedroom1/wall"], 4 * (4.0 * 3.0) - kDoorWidth * kDoorHeight,
              1e-9);
  for (const auto& face : m.faces)
    for (int idx : face) {
      EXPECT_GE(idx, 0);
      EXPECT_LT(idx, static_cast<int>(m.vertices.size()));
    }
}

TEST(Extrude, FloorAndCeilingNormalConventions) {
  BubbleDiagram d = single_diagram();
  Floorplan f = place_doors(synthesize_floorplan(d, 16.0, 0.25), d);
  SceneMesh m = extrude_base_mesh(f, 2.5);
  for (const auto& s : m.submeshes) {
    for (int i = s.begin; i < s.begin + s.count; ++i) {
      Vec3 n = face_normal(m, i);
      if (s.label.ends_with("/floor")) EXPECT_NEAR(n.z, 1.0, 1e-12);
      if (s.label.ends_with("/ceiling")) EXPECT_NEAR(n.z, -1.0, 1e-12);
      if (s.label.ends_with("/wall")) EXPECT_NEAR(n.z, 0.0, 1e-12);
    }
  }
  double zmax = 0;
  for (const auto& v : m.vertices) zmax = std::max(zmax, v.z);
  EXPECT_DOUBLE_EQ(zmax, 2.5);
}

TEST(Extrude, BalconyHasNoCeiling) {
  BubbleDiagram d;
  d.rooms = make_room_ids({"living room1", "balcony1"},
                          {"living_room1", "balcony1"});
  d.connections = {{"living room1", "balcony1"}};
  d.front_door_rooms = {"living room1"};
  Floorplan f = place_doors(synthesize_floorplan(d), d);
  SceneMesh m = extrude_base_mesh(f, 3.0);
  std::set<std::string> labels;
  for (const auto& s : m.submeshes) labels.insert(s.label);
  EXPECT_TRUE(labels.count("living_room1/ceiling"));
  EXPECT_TRUE(labels.count("balcony1/floor"));
  EXPECT_FALSE(labels.count("balcony1/ceiling"));
}

TEST(Extrude, DoorCutsReduceWallArea) {
  BubbleDiagram d = dining_diagram();
  Floorplan f = synthesize_floorplan(d);
  SceneMesh solid = extrude_base_mesh(f, 3.0);
  SceneMesh cut = extrude_base_mesh(place_doors(f, d), 3.0);
  auto wall_area = [](const SceneMesh& m) {
    double area = 0;
    for (const auto& s : m.submeshes)
      if (s.label.ends_with("/wall")) {
        for (int i = s.begin; i < s.begin + s.count; ++i) {
          const auto& f = m.faces[static_cast<std::size_t>(i)];
          Vec3 a = m.vertices[static_cast<std::size_t>(f[0])];
          Vec3 b = m.vertices[static_cast<std::size_t>(f[1])];
          Vec3 c = m.vertices[static_cast<std::size_t>(f[2])];
          area += 0.5 * (b - a).cross(c - a).norm();
        }
      }
    return area;
  };
  // Each wall sheet is one-sided per room; an interior door cuts the sheet on
  // both rooms' sides, a front door only one.
  double expected =
      wall_area(solid) - (2 * 2 + 1) * kDoorWidth * kDoorHeight;
  EXPECT_NEAR(wall_area(cut), expected, 1e-9);
  EXPECT_THROW(extrude_base_mesh(f, 0.0), ValidationError);
}

TEST(Extrude, PriorsTableMatchesDocumentedValues) {
  EXPECT_DOUBLE_EQ(room_area_prior(RoomType::kLivingRoom), 18.0);
  EXPECT_DOUBLE_EQ(room_area_prior(RoomType::kBathroom), 5.0);
  EXPECT_DOUBLE_EQ(room_area_prior(RoomType::kUnknown), 84.0 / 9.0);
  BubbleDiagram d = apartment_diagram();
  // living 18 + kitchen 10 + bedrooms 24 + bathroom 5
  EXPECT_DOUBLE_EQ(default_total_area(d), 57.0);
}

}  // namespace
}  // namespace homegen
