#include "homegen/llm.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "homegen/error.hpp"
#include "homegen/fsutil.hpp"
#include "homegen/json_io.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {
namespace {

const fs::path kFixtureRoot = HOMEGEN_TEST_FIXTURES;

// Anchors the ornament corpus may reference from a furniture pass.
const std::set<std::string> kCorpusAnchors = {
    "table1",       "sofa1", "kitchen_cabinet1", "nightstand1",
    "sideboard1",   "desk1", "coffee_table1"};

static std::vector<fs::path> corpus_files(const std::string& sub) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kFixtureRoot / sub))
    if (e.is_regular_file()) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  EXPECT_GE(out.size(), sub == "malformed" ? 10u : 10u);
  return out;
}

static std::vector<std::string> placeholder_names(const PromptTemplate& t) {
  std::vector<std::string> names;
  for (const auto& [pos, name] : find_placeholders(t.body)) names.push_back(name);
  return names;
}

TEST(Templates, PlaceholderInventory) {
  auto fp = placeholder_names(floorplan_template());
  EXPECT_EQ(fp, std::vector<std::string>{"house_description"});

  auto fu = placeholder_names(furniture_template());
  // {room_type} appears twice: once for the room name and once, verbatim from
  // the instruction text, inside the area sentence.
  EXPECT_EQ(fu, (std::vector<std::string>{"room_type", "house_descriptions",
                                          "room_type", "room_area",
                                          "placement_functions"}));

  auto orn = placeholder_names(ornament_template());
  EXPECT_EQ(orn, (std::vector<std::string>{"room_type", "house_descriptions",
                                           "room_type", "furniture_list",
                                           "room_area", "placement_functions"}));

  auto tex = placeholder_names(texture_template());
  EXPECT_EQ(tex, std::vector<std::string>{"house_description"});
}

TEST(Templates, AreaSentenceKeepsRoomTypePlaceholder) {
  EXPECT_NE(furniture_template().body.find(
                "an area of {room_type} square meters"),
            std::string::npos);
  EXPECT_NE(furniture_template().body.find("{room_area} square meters room"),
            std::string::npos);
}

TEST(Templates, JsonExamplesAreNotPlaceholders) {
  // Literal braces in the embedded examples must survive rendering.
  const std::string& body = furniture_template().body;
  EXPECT_NE(body.find("{\"sofa1\": \"An L-shape sofa"), std::string::npos);
  EXPECT_NE(body.find("{<furniture_name>: <description>}"), std::string::npos);
  EXPECT_NE(body.find("[\"chair1\", \"place_around\", \"table1\"]"),
            std::string::npos);
  EXPECT_NE(ornament_template().body.find("[\"pear\", \"place_top\", \"table1\"]"),
            std::string::npos);
  EXPECT_NE(floorplan_template().body.find(
                "[[dining_room1, bedroom1], [dining_room1, bedroom2]]"),
            std::string::npos);
  EXPECT_NE(floorplan_template().body.find("transform \"dungeon1\" to \"storage1\""),
            std::string::npos);
}

TEST(Templates, LookupCoversAllIds) {
  EXPECT_EQ(prompt_template(PromptTemplateId::kFloorplanAndMap).id,
            PromptTemplateId::kFloorplanAndMap);
  EXPECT_EQ(prompt_template(PromptTemplateId::kTexture).id,
            PromptTemplateId::kTexture);
}

TEST(Templates, PlacementFunctionsTextListsAllEightRules) {
  std::string t = placement_functions_text();
  for (int i = 0; i < kPlacementRuleCount; ++i)
    EXPECT_NE(t.find(placement_rule_name(static_cast<PlacementRule>(i))),
              std::string::npos)
        << t;
  EXPECT_EQ(std::count(t.begin(), t.end(), ','), kPlacementRuleCount - 1);
}

TEST(Render, SubstitutesEveryOccurrence) {
  std::map<std::string, std::string> ctx = {
      {"room_type", "kitchen1"},
      {"house_descriptions", "a tuscan farmhouse"},
      {"room_area", "12.5"},
      {"placement_functions", placement_functions_text()}};
  std::string rendered = render_prompt(furniture_template(), ctx);
  EXPECT_EQ(rendered.find('{'), rendered.find("{\"sofa1\""));
  EXPECT_NE(rendered.find("for a kitchen1 located"), std::string::npos);
  EXPECT_NE(rendered.find("an area of kitchen1 square meters"),
            std::string::npos);
  EXPECT_NE(rendered.find("12.5 square meters room"), std::string::npos);
  EXPECT_EQ(rendered.find("{room_type}"), std::string::npos);
}

TEST(Render, UnboundPlaceholderNamesOffender) {
  try {
    render_prompt(texture_template(), {});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("house_description"),
              std::string::npos);
  }
}

TEST(Render, IdentityOnPlaceholderFreeBody) {
  PromptTemplate t{PromptTemplateId::kTexture, "no markers {not one} {X} {}"};
  EXPECT_EQ(render_prompt(t, {}), t.body);
}

TEST(FloorplanParse, CorpusParsesCompletely) {
  for (const auto& f : corpus_files("floorplan")) {
    SCOPED_TRACE(f.filename().string());
    auto [complete, diagram] = parse_floorplan_response(read_text_file(f));
    EXPECT_EQ(complete.size(), diagram.rooms.size());
    EXPECT_TRUE(validate_bubble_diagram(diagram).pass());
  }
}

TEST(FloorplanParse, ConnectionListLiteral) {
  std::string text = read_text_file(kFixtureRoot / "floorplan" /
                                    "03_dining_two_bedrooms.txt");
  auto [complete, d] = parse_floorplan_response(text);
  ASSERT_EQ(d.connections.size(), 2u);
  EXPECT_EQ(d.connections[0].first, "dining_room1");
  EXPECT_EQ(d.connections[0].second, "bedroom1");
  EXPECT_EQ(d.connections[1].first, "dining_room1");
  EXPECT_EQ(d.connections[1].second, "bedroom2");
}

TEST(FloorplanParse, DungeonMapsToStorage) {
  std::string text = read_text_file(kFixtureRoot / "floorplan" / "02_castle.txt");
  auto [complete, d] = parse_floorplan_response(text);
  const RoomId* dungeon = d.find_room("dungeon1");
  ASSERT_NE(dungeon, nullptr);
  EXPECT_EQ(dungeon->canonical_type, RoomType::kStorage);
  EXPECT_EQ(dungeon->key(), "storage1");
  const RoomId* armory = d.find_room("armory1");
  ASSERT_NE(armory, nullptr);
  EXPECT_EQ(armory->key(), "storage2");
}

TEST(FloorplanParse, MissingFieldIsNamed) {
  try {
    parse_floorplan_response(read_text_file(
        kFixtureRoot / "malformed" / "floorplan_missing_front_door.txt"));
    FAIL() << "expected ResponseError";
  } catch (const ResponseError& e) {
    EXPECT_NE(std::string(e.what()).find("front_door"), std::string::npos);
    EXPECT_FALSE(e.raw().empty());
  }
}

TEST(FloorplanParse, MalformedSeedsRaiseTypedErrors) {
  for (const auto& f : corpus_files("malformed")) {
    if (f.filename().string().rfind("floorplan", 0) != 0) continue;
    SCOPED_TRACE(f.filename().string());
    EXPECT_THROW(parse_floorplan_response(read_text_file(f)), ResponseError);
  }
}

TEST(RoomParse, FurnitureCorpusParsesCompletely) {
  for (const auto& f : corpus_files("furniture")) {
    SCOPED_TRACE(f.filename().string());
    LayoutGraph g = parse_room_response(read_text_file(f),
                                        RoomPromptKind::kFurniture);
    EXPECT_FALSE(g.nodes.empty());
    // Every node carries exactly one placement edge.
    EXPECT_EQ(g.edges.size(), g.nodes.size());
    EXPECT_TRUE(validate_layout_graph(g).pass());
  }
}

TEST(RoomParse, OrnamentCorpusParsesCompletely) {
  for (const auto& f : corpus_files("ornament")) {
    SCOPED_TRACE(f.filename().string());
    LayoutGraph g = parse_room_response(read_text_file(f),
                                        RoomPromptKind::kOrnament,
                                        kCorpusAnchors);
    EXPECT_FALSE(g.nodes.empty());
    EXPECT_EQ(g.edges.size(), g.nodes.size());
  }
}

TEST(RoomParse, AroundTripleLiteral) {
  LayoutGraph g = parse_room_response(
      read_text_file(kFixtureRoot / "furniture" / "02_dining.txt"),
      RoomPromptKind::kFurniture);
  const LayoutEdge* chair = nullptr;
  for (const auto& e : g.edges)
    if (e.child == "chair1") chair = &e;
  ASSERT_NE(chair, nullptr);
  EXPECT_EQ(chair->rule, PlacementRule::kAround);
  EXPECT_EQ(chair->anchor, "table1");
}

TEST(RoomParse, RelationlessNodesDefaultToCenter) {
  LayoutGraph g = parse_room_response(
      read_text_file(kFixtureRoot / "furniture" / "09_no_relations.txt"),
      RoomPromptKind::kFurniture);
  ASSERT_EQ(g.edges.size(), 2u);
  for (const auto& e : g.edges) {
    EXPECT_EQ(e.rule, PlacementRule::kCenter);
    EXPECT_TRUE(e.anchor.empty());
  }
}

TEST(RoomParse, AnchorRuleWithoutAnchorFallsBackToCenter) {
  LayoutGraph g = parse_room_response(
      read_text_file(kFixtureRoot / "furniture" / "10_anchorless_besides.txt"),
      RoomPromptKind::kFurniture);
  const LayoutEdge* lamp = nullptr;
  for (const auto& e : g.edges)
    if (e.child == "lamp1") lamp = &e;
  ASSERT_NE(lamp, nullptr);
  EXPECT_EQ(lamp->rule, PlacementRule::kCenter);
}

TEST(RoomParse, DescriptionWithoutSizeIsDropped) {
  LayoutGraph g = parse_room_response(
      read_text_file(kFixtureRoot / "furniture" / "11_extra_description.txt"),
      RoomPromptKind::kFurniture);
  EXPECT_EQ(g.nodes.size(), 1u);
  EXPECT_EQ(g.nodes[0].name, "dresser1");
  // The relation aimed at the dropped node is skipped, not an error.
  EXPECT_EQ(g.edges.size(), 1u);
}

TEST(RoomParse, RoomRelativeRuleDropsAnchor) {
  std::string text =
      "{\"furniture_descriptions\": {\"rug1\": \"a rug\", \"sofa1\": \"a sofa\"},"
      " \"furniture_sizes\": {\"rug1\": [1.0, 1.0], \"sofa1\": [1.8, 0.8]},"
      " \"furniture_relations\": [[\"sofa1\", \"place_wall\", \"\"],"
      " [\"rug1\", \"place_center\", \"sofa1\"]]}";
  LayoutGraph g = parse_room_response(text, RoomPromptKind::kFurniture);
  for (const auto& e : g.edges)
    if (e.child == "rug1") EXPECT_TRUE(e.anchor.empty());
}

TEST(RoomParse, SelfAnchorCleared) {
  std::string text =
      "{\"furniture_descriptions\": {\"desk1\": \"a desk\"},"
      " \"furniture_sizes\": {\"desk1\": [1.2, 0.6]},"
      " \"furniture_relations\": [[\"desk1\", \"place_front\", \"desk1\"]]}";
  LayoutGraph g = parse_room_response(text, RoomPromptKind::kFurniture);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_TRUE(g.edges[0].anchor.empty());
  EXPECT_EQ(g.edges[0].rule, PlacementRule::kCenter);
}

TEST(RoomParse, OrnamentAcceptsBothFieldSpellings) {
  std::string alias = read_text_file(kFixtureRoot / "ornament" /
                                     "03_kitchen_alias.txt");
  LayoutGraph g = parse_room_response(alias, RoomPromptKind::kOrnament,
                                      kCorpusAnchors);
  EXPECT_EQ(g.nodes.size(), 2u);
  // The furniture pass does not accept ornament_* spellings.
  std::string orn = read_text_file(kFixtureRoot / "ornament" / "04_bedroom.txt");
  EXPECT_THROW(parse_room_response(orn, RoomPromptKind::kFurniture),
               ResponseError);
}

TEST(RoomParse, KnownAnchorsGateDanglingReferences) {
  std::string text = read_text_file(kFixtureRoot / "ornament" / "02_living.txt");
  // With the furniture names known the parse succeeds...
  LayoutGraph g =
      parse_room_response(text, RoomPromptKind::kOrnament, {"sofa1"});
  EXPECT_EQ(g.nodes.size(), 2u);
  // ...and without them the dangling anchor is a typed error.
  EXPECT_THROW(parse_room_response(text, RoomPromptKind::kOrnament),
               ResponseError);
}

TEST(RoomParse, MalformedSeedsRaiseTypedErrors) {
  for (const auto& f : corpus_files("malformed")) {
    if (f.filename().string().rfind("room", 0) != 0) continue;
    SCOPED_TRACE(f.filename().string());
    EXPECT_THROW(
        parse_room_response(read_text_file(f), RoomPromptKind::kFurniture),
        ResponseError);
  }
}

TEST(TextureParse, CorpusParsesCompletely) {
  for (const auto& f : corpus_files("texture")) {
    SCOPED_TRACE(f.filename().string());
    EXPECT_FALSE(parse_texture_prompt(read_text_file(f)).empty());
  }
}

TEST(TextureParse, FieldNameIsCaseSensitive) {
  EXPECT_THROW(parse_texture_prompt("{\"Prompt\": \"style\"}"), ResponseError);
  EXPECT_THROW(parse_texture_prompt("{\"prompt\": \"\"}"), ResponseError);
  EXPECT_THROW(parse_texture_prompt("{\"prompt\": 42}"), ResponseError);
  EXPECT_THROW(parse_texture_prompt("[\"prompt\"]"), ResponseError);
}

// Deterministic fuzz: truncations and structural mutations of valid corpus
// text must parse or raise a typed error, never crash.
TEST(Fuzz, MutatedResponsesAlwaysRaiseTypedErrors) {
  std::vector<std::string> seeds;
  for (const auto& sub : {"floorplan", "furniture", "ornament", "texture"})
    for (const auto& f : corpus_files(sub)) seeds.push_back(read_text_file(f));
  for (const auto& f : corpus_files("malformed"))
    seeds.push_back(read_text_file(f));

  auto probe = [](const std::string& text) {
    try {
      parse_floorplan_response(text);
    } catch (const Error&) {
    }
    try {
      parse_room_response(text, RoomPromptKind::kFurniture);
    } catch (const Error&) {
    }
    try {
      parse_room_response(text, RoomPromptKind::kOrnament, kCorpusAnchors);
    } catch (const Error&) {
    }
    try {
      parse_texture_prompt(text);
    } catch (const Error&) {
    }
  };

  int cases = 0;
  for (const auto& seed : seeds) {
    for (std::size_t cut = 1; cut < seed.size(); cut += 17) {
      probe(seed.substr(0, cut));
      ++cases;
    }
    for (std::size_t at = 0; at < seed.size(); at += 23) {
      std::string mutated = seed;
      mutated[at] = mutated[at] == '{' ? '[' : '{';
      probe(mutated);
      ++cases;
    }
    std::string doubled = seed + seed;
    probe(doubled);
    ++cases;
  }
  EXPECT_GT(cases, 1000);
}

TEST(Transport, ChatConfigBounds) {
  ChatConfig c;
  EXPECT_NO_THROW(validate_chat_config(c));
  c.temperature = 2.1;
  EXPECT_THROW(validate_chat_config(c), ValidationError);
  c.temperature = 0.7;
  c.top_p = 0.0;
  EXPECT_THROW(validate_chat_config(c), ValidationError);
  c.top_p = 1.5;
  EXPECT_THROW(validate_chat_config(c), ValidationError);
}

TEST(Transport, PromptHashIsRenderedTextHash) {
  EXPECT_EQ(prompt_hash("hello"), hex64(fnv1a64("hello")));
  EXPECT_NE(prompt_hash("hello"), prompt_hash("hello "));
}

class TransportTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("llm_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(TransportTest, ReplayReturnsRecordedBytes) {
  std::string prompt = "describe a sofa";
  std::string response = "{\"prompt\": \"a sofa\"}\n";
  record_fixture(dir_, prompt_hash(prompt), response);
  EXPECT_EQ(replay(dir_, prompt_hash(prompt)), response);
}

TEST_F(TransportTest, MissingFixtureIsServiceError) {
  try {
    replay(dir_, prompt_hash("never recorded"));
    FAIL() << "expected ServiceError";
  } catch (const ServiceError& e) {
    EXPECT_NE(std::string(e.what()).find("no fixture"), std::string::npos);
  }
}

TEST_F(TransportTest, OnlineClientRecordsForLaterReplay) {
  int calls = 0;
  ChatTransport fake = [&](const ChatConfig&, const std::string& prompt) {
    ++calls;
    return "echo: " + prompt;
  };
  LlmClient online(ChatConfig{}, dir_, false, fake);
  EXPECT_EQ(online.complete("ping"), "echo: ping");
  EXPECT_EQ(calls, 1);

  LlmClient offline(ChatConfig{}, dir_, true);
  EXPECT_EQ(offline.complete("ping"), "echo: ping");
  EXPECT_EQ(calls, 1);
  EXPECT_THROW(offline.complete("pong"), ServiceError);
}

TEST_F(TransportTest, OnlineWithoutTransportIsServiceError) {
  LlmClient c(ChatConfig{}, dir_, false);
  EXPECT_THROW(c.complete("ping"), ServiceError);
}

TEST_F(TransportTest, ClientValidatesConfigAtConstruction) {
  ChatConfig bad;
  bad.temperature = -1.0;
  EXPECT_THROW(LlmClient(bad, dir_, true), ValidationError);
}

}  // namespace
}  // namespace homegen
