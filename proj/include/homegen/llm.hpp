#pragma once

// Chat-model bridge: the four instruction templates, placeholder rendering,
// response parsing into scene_ir types, and a transport that either calls a
// chat-completion HTTP endpoint or replays recorded fixtures byte-for-byte.
// Fixtures are keyed by the hash of the rendered prompt text, so any change
// to a prompt automatically separates its recordings.

#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "homegen/error.hpp"
#include "homegen/fsutil.hpp"
#include "homegen/json_io.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {

// ---------------------------------------------------------------------------
// Errors

/// Parse failure for a model response; carries the raw text so callers can
/// persist it for inspection or fixture capture.
class ResponseError : public ParseError {
 public:
  ResponseError(const std::string& what, std::string raw)
      : ParseError(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

// ---------------------------------------------------------------------------
// Templates

enum class PromptTemplateId { kFloorplanAndMap, kFurniture, kOrnament, kTexture };

struct PromptTemplate {
  PromptTemplateId id;
  std::string body;
};

/// List of the eight placement rule names, used to bind {placement_functions}.
inline std::string placement_functions_text() {
  std::string out;
  for (int i = 0; i < kPlacementRuleCount; ++i) {
    if (i) out += ", ";
    out += placement_rule_name(static_cast<PlacementRule>(i));
  }
  return out;
}

// The instruction texts below are fixed. Placeholders use {lower_snake}
// markers; everything else, including the JSON-shaped examples with their
// literal braces, is emitted as-is.

inline const PromptTemplate& floorplan_template() {
  static const PromptTemplate t{
      PromptTemplateId::kFloorplanAndMap,
      "1. You will be provided a text description of a house delimited by "
      "\"\" which includes the house's style (e.g., gothic) and type (e.g., a "
      "castle); there might be additional information provided.\n"
      "\n"
      "2. You need to generate four things: 1) the complete list of rooms in "
      "the house, 2) the modified list of rooms in the house, 3) the "
      "connection of each room, and 4) what rooms the front doors are at.\n"
      "\n"
      "3. For 1) the complete list of rooms in the house, you need to "
      "generate a list of rooms one by one with an index at the end, and "
      "repeat for those rooms that occur more than once but with incrementing "
      "indices. For example, if there are two bedrooms and one dining room, "
      "the generated response should be \"[bedroom1, bedroom2, dining "
      "room1]\". The list of rooms should be diverse, with different room "
      "types and room functionalities. Examples of rooms generated at this "
      "step include \"library\", \"wine_celler\" and \"entrance\".\n"
      "\n"
      "4. For 2) the modified list of rooms in the house, you need to "
      "transform each room generated in step 1) based on their style and "
      "functionality so that it is from the list: \"kitchen\", \"storage\", "
      "\"bathroom\", \"study_room\", \"balcony\", \"living_room\", "
      "\"bedroom\", \"entrance\", \"dining_room\" and \"unknown\". For "
      "example, \"dungeon\" has a similar property to \"storage\" so you just "
      "transform \"dungeon1\" to \"storage1\", if there are no existing "
      "storage rooms. Else, you need to transform \"dungeon1\" to "
      "\"storage2\". If the room is so different from any existing room in "
      "the accepted list, just transform the room into \"unknown\". You "
      "should return the answer for 2) in the form of a list as well. Make "
      "sure that each room in the modified room list corresponds to each room "
      "in the complete room list that has the same index.\n"
      "\n"
      "5. For 3) the connection of each room in its original name, please "
      "generate, for each room, the rooms that are connected to the room in "
      "the form of tuples. For example, if dining hall1 is connected to "
      "bedroom1 and bedroom2, but bedroom1 and bedroom2 are not "
      "interconnected, the generated response should be \"[[dining_room1, "
      "bedroom1], [dining_room1, bedroom2]]\".\n"
      "\n"
      "6. For 4) what rooms the front doors are at, please generate the rooms "
      "that contain a front door, the door acting as the only entrance to the "
      "house. For example, if the front door is located in bedroom1, please "
      "generate \"[bedroom1]\".\n"
      "\n"
      "7. Return your answer in the form of a JSON file, with field names "
      "\"complete_room_list\", \"modified_room_list\", \"connection\", and "
      "\"front_door\" corresponding to each of the questions 1) to 4) above.\n"
      "\n"
      "House description: \"{house_description}\"\n"};
  return t;
}

inline const PromptTemplate& furniture_template() {
  static const PromptTemplate t{
      PromptTemplateId::kFurniture,
      "Task: Design a 3D indoor scene for a {room_type} located within a "
      "{house_descriptions}. Ensure that the design fits within an area of "
      "{room_type} square meters. Provide the details as a scene graph, "
      "structured in a JSON format.\n"
      "\n"
      "Requirements:\n"
      "\n"
      "1. Furniture Description:\n"
      "    - Enumerate through the list of furniture with their descriptions, "
      "take into consideration the area and style of the room when you are "
      "generating. You can include any furniture but please keep them "
      "diverse. If an item appears multiple times, append an index.\n"
      "    - Example: {\"sofa1\": \"An L-shape sofa made with cozy "
      "material\"}\n"
      "    - Return format: {<furniture_name>: <description>}.\n"
      "\n"
      "2. Furniture Size:\n"
      "    - For each furniture piece, provide its dimensions (length and "
      "width) in meters, keeping in mind the {room_area} square meters room "
      "area.\n"
      "    - Return format: {<furniture_name>: [length(meters), "
      "width(meters)]}.\n"
      "\n"
      "3. Furniture Relations:\n"
      "    - A list of the furniture, the positioning of the furniture (from "
      "{placement_functions}), and the anchor furniture to which the "
      "furniture points to.\n"
      "    - For example, if a chair is placed around a table, your response "
      "should be [\"chair1\", \"place_around\", \"table1\"]. If the furniture "
      "itself is an anchor, like the table which is placed at the center of "
      "the room, your response should be [\"table1\", \"place_center\", "
      "\"\"]. Use similar formatting for all the furniture.\n"
      "\n"
      "Output: Provide the information in a JSON structure:\n"
      "\n"
      "{\"furniture_descriptions\": {...},\n"
      "\n"
      "    \"furniture_sizes\": {...},\n"
      "\n"
      "    \"furniture_relations\": [...] }\n"};
  return t;
}

inline const PromptTemplate& ornament_template() {
  static const PromptTemplate t{
      PromptTemplateId::kOrnament,
      "Task: Design a 3D indoor scene for a {room_type} located within a "
      "{house_descriptions}. Ensure that the design fits within an area of "
      "{room_type} square meters. Provide the details as a scene graph, "
      "structured in a JSON format. The available furniture in the room are "
      "{furniture_list}.\n"
      "\n"
      "Requirements:\n"
      "\n"
      "1. Ornament Description:\n"
      "    - Enumerate through the list of ornaments with their descriptions, "
      "take into consideration the area and style of the room when you are "
      "generating. You can include any ornaments but please keep them "
      "interesting. If an item appears multiple times, append an index.\n"
      "    - Example: {\"coffee_machine1\": \"A small coffee machine to be "
      "used at home\"}\n"
      "    - Return format: {<ornament_name>: <description>}.\n"
      "\n"
      "2. Ornament Size:\n"
      "    - For each ornament, provide its dimensions (length and width) in "
      "meters, keeping in mind the {room_area} square meters room area.\n"
      "    - Return format: {<ornament_name>: [length(meters), "
      "width(meters)]}.\n"
      "\n"
      "3. Ornament Relations:\n"
      "    - A list of the ornament, the positioning of the ornament (from "
      "{placement_functions}), and the anchor furniture to which the ornament "
      "points to.\n"
      "    - For example, if a pear is placed on top of a \"table1\", your "
      "response should be [\"pear\", \"place_top\", \"table1\"]. Use similar "
      "formatting for all the ornaments.\n"
      "\n"
      "Output: Provide the information in a JSON structure:\n"
      "\n"
      "{\"furniture_descriptions\": {...},\n"
      "\n"
      "    \"furniture_sizes\": {...},\n"
      "\n"
      "    \"furniture_relations\": [...] }\n"};
  return t;
}

inline const PromptTemplate& texture_template() {
  static const PromptTemplate t{
      PromptTemplateId::kTexture,
      "You are a professional 3D indoor designer. You are given a house with "
      "the description {house_description}. Based on this house description, "
      "you need to do two things:\n"
      "1. Elaborate the description to include the detailed aesthetic style "
      "and appearance of the whole house. Make sure that the elaboration is "
      "creative and diverse, but sticks to the description's original "
      "requirements.\n"
      "2. Simplify the description that you have elaborated into a prompt "
      "that will be fed into a text-to-image generation model. The simplified "
      "prompt should include only the stylistic color and theme information "
      "of the whole house.\n"
      "3. Return your answer as a JSON file with the field name \"prompt\".\n"};
  return t;
}

inline const PromptTemplate& prompt_template(PromptTemplateId id) {
  switch (id) {
    case PromptTemplateId::kFloorplanAndMap: return floorplan_template();
    case PromptTemplateId::kFurniture: return furniture_template();
    case PromptTemplateId::kOrnament: return ornament_template();
    case PromptTemplateId::kTexture: return texture_template();
  }
  return floorplan_template();
}

/// Placeholder markers: a brace-wrapped lower_snake identifier.
inline std::vector<std::pair<std::size_t, std::string>> find_placeholders(
    const std::string& body) {
  std::vector<std::pair<std::size_t, std::string>> out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{') continue;
    std::size_t k = i + 1;
    while (k < body.size() &&
           ((body[k] >= 'a' && body[k] <= 'z') || body[k] == '_'))
      ++k;
    if (k > i + 1 && k < body.size() && body[k] == '}')
      out.emplace_back(i, body.substr(i + 1, k - i - 1));
  }
  return out;
}

/// Substitutes every placeholder from `context`. Unbound placeholders raise
/// ValidationError naming the first offender.
inline std::string render_prompt(const PromptTemplate& t,
                                 const std::map<std::string, std::string>& context) {
  std::string out;
  out.reserve(t.body.size());
  std::size_t pos = 0;
  for (const auto& [at, name] : find_placeholders(t.body)) {
    out.append(t.body, pos, at - pos);
    auto it = context.find(name);
    if (it == context.end())
      throw ValidationError("unbound placeholder " + name);
    out += it->second;
    pos = at + name.size() + 2;
  }
  out.append(t.body, pos, std::string::npos);
  return out;
}

// ---------------------------------------------------------------------------
// Response parsing

/// Extracts the floorplan response: the original room names plus the mapped
/// diagram. Both mapping and diagram invariants must hold.
inline std::pair<std::vector<std::string>, BubbleDiagram>
parse_floorplan_response(const std::string& text) {
  Json j;
  try {
    j = parse_relaxed_json(text);
  } catch (const ParseError& e) {
    throw ResponseError(e.what(), text);
  }
  auto get_list = [&](const char* key) {
    if (!j.is_object() || !j.contains(key))
      throw ResponseError(std::string("missing field ") + key, text);
    const Json& v = j[key];
    if (!v.is_array())
      throw ResponseError(std::string("field ") + key + " must be a list", text);
    return &v;
  };
  const Json* complete = get_list("complete_room_list");
  const Json* modified = get_list("modified_room_list");
  const Json* connection = get_list("connection");
  const Json* front_door = get_list("front_door");

  auto strings = [&](const Json& arr, const char* key) {
    std::vector<std::string> out;
    for (const auto& v : arr) {
      if (!v.is_string())
        throw ResponseError(std::string(key) + " entries must be strings", text);
      out.push_back(v.get<std::string>());
    }
    return out;
  };
  std::vector<std::string> cl = strings(*complete, "complete_room_list");
  std::vector<std::string> ml = strings(*modified, "modified_room_list");

  try {
    ValidationReport mapping = validate_room_mapping(cl, ml);
    if (!mapping.pass())
      throw ResponseError("room mapping invalid: " + mapping.joined(), text);
    BubbleDiagram d;
    d.rooms = make_room_ids(cl, ml);
    for (const auto& e : *connection) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
        throw ResponseError("connection entries must be [room, room]", text);
      d.connections.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    d.front_door_rooms = strings(*front_door, "front_door");
    ValidationReport rep = validate_bubble_diagram(d);
    if (!rep.pass())
      throw ResponseError("diagram invalid: " + rep.joined(), text);
    return {std::move(cl), std::move(d)};
  } catch (const ResponseError&) {
    throw;
  } catch (const Error& e) {
    throw ResponseError(e.what(), text);
  }
}

enum class RoomPromptKind { kFurniture, kOrnament };

/// Parses a furniture or ornament response into a LayoutGraph fragment.
/// Nodes come from the intersection of descriptions and sizes; any node
/// without a relation triple defaults to a room-relative place_center.
/// The ornament pass accepts anchors naming furniture from the first pass
/// via `known_anchors`. Ornament responses may use either furniture_* or
/// ornament_* field names.
inline LayoutGraph parse_room_response(
    const std::string& text, RoomPromptKind kind,
    const std::set<std::string>& known_anchors = {}) {
  Json j;
  try {
    j = parse_relaxed_json(text);
  } catch (const ParseError& e) {
    throw ResponseError(e.what(), text);
  }
  if (!j.is_object()) throw ResponseError("response must be a JSON object", text);

  auto pick = [&](const char* primary, const char* alias) -> const Json* {
    if (j.contains(primary)) return &j[primary];
    if (kind == RoomPromptKind::kOrnament && j.contains(alias)) return &j[alias];
    throw ResponseError(std::string("missing field ") + primary, text);
  };
  // For the ornament pass the canonical names are ornament_*, with the
  // furniture_* spellings from the shared output example accepted too.
  const char* d_name = kind == RoomPromptKind::kFurniture ? "furniture_descriptions" : "ornament_descriptions";
  const char* s_name = kind == RoomPromptKind::kFurniture ? "furniture_sizes" : "ornament_sizes";
  const char* r_name = kind == RoomPromptKind::kFurniture ? "furniture_relations" : "ornament_relations";
  const Json* desc = pick(d_name, "furniture_descriptions");
  const Json* sizes = pick(s_name, "furniture_sizes");
  const Json* relations = pick(r_name, "furniture_relations");
  if (!desc->is_object())
    throw ResponseError(std::string(d_name) + " must be an object", text);
  if (!sizes->is_object())
    throw ResponseError(std::string(s_name) + " must be an object", text);
  if (!relations->is_array())
    throw ResponseError(std::string(r_name) + " must be a list", text);

  LayoutGraph g;
  for (auto it = desc->begin(); it != desc->end(); ++it) {
    if (!it.value().is_string())
      throw ResponseError("description for '" + it.key() + "' must be a string", text);
    auto sz = sizes->find(it.key());
    if (sz == sizes->end()) continue;  // description without size: dropped
    const Json& s = *sz;
    if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
      throw ResponseError("size for '" + it.key() + "' must be [length, width]", text);
    FurnitureNode n;
    n.name = it.key();
    n.description = it.value().get<std::string>();
    n.length = s[0].get<double>();
    n.width = s[1].get<double>();
    g.nodes.push_back(std::move(n));
  }

  std::set<std::string> with_relation;
  for (const auto& e : *relations) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_string() ||
        !e[1].is_string() || !e[2].is_string())
      throw ResponseError("relations must be [child, rule, anchor]", text);
    std::string child = e[0].get<std::string>();
    std::string rule_name = e[1].get<std::string>();
    std::string anchor = e[2].get<std::string>();
    if (!g.find_node(child)) continue;  // relation for a dropped/absent node
    auto rule = placement_rule_from_name(rule_name);
    if (!rule)
      throw ResponseError("unknown placement rule '" + rule_name + "'", text);
    if (anchor == child) anchor.clear();  // self-reference carries nothing
    if (!anchor.empty() && !g.find_node(anchor) && !known_anchors.count(anchor))
      throw ResponseError("dangling anchor '" + anchor + "' for '" + child + "'", text);
    if (anchor.empty() && !is_room_relative_rule(*rule)) {
      // An anchor rule without an anchor cannot be applied; fall back to a
      // room-relative default and remember why.
      g.edges.push_back(LayoutEdge{child, PlacementRule::kCenter, ""});
      with_relation.insert(child);
      continue;
    }
    if (!anchor.empty() && is_room_relative_rule(*rule)) {
      // Room-relative rules ignore anchors; drop the reference.
      anchor.clear();
    }
    g.edges.push_back(LayoutEdge{child, *rule, anchor});
    with_relation.insert(child);
  }
  for (const auto& n : g.nodes) {
    if (!with_relation.count(n.name))
      g.edges.push_back(LayoutEdge{n.name, PlacementRule::kCenter, ""});
  }

  ValidationReport rep = validate_layout_graph(g);
  // Anchors naming furniture from the furniture pass are resolved later,
  // after the two fragments merge; ignore those violations here.
  for (const auto& v : rep.violations) {
    bool external = false;
    for (const auto& a : known_anchors) {
      if (v.find("'" + a + "'") != std::string::npos &&
          v.rfind("dangling anchor", 0) == 0) {
        external = true;
        break;
      }
    }
    if (!external) throw ResponseError("layout invalid: " + v, text);
  }
  return g;
}

/// Extracts the diffusion prompt ("prompt" field, case-sensitive).
inline std::string parse_texture_prompt(const std::string& text) {
  Json j;
  try {
    j = parse_relaxed_json(text);
  } catch (const ParseError& e) {
    throw ResponseError(e.what(), text);
  }
  if (!j.is_object() || !j.contains("prompt"))
    throw ResponseError("missing field prompt", text);
  if (!j["prompt"].is_string())
    throw ResponseError("field prompt must be a string", text);
  std::string p = j["prompt"].get<std::string>();
  if (p.empty()) throw ResponseError("field prompt is empty", text);
  return p;
}

// ---------------------------------------------------------------------------
// Transport

struct ChatConfig {
  double temperature = 0.7;
  double top_p = 1.0;
  double penalty = 0.0;
  std::string endpoint;  // e.g. "http://host:port/v1/chat/completions"
  std::string model = "gpt-4";
  int max_retries = 2;
  int timeout_sec = 60;
};

inline void validate_chat_config(const ChatConfig& c) {
  if (c.temperature < 0.0 || c.temperature > 2.0)
    throw ValidationError("temperature must be in [0, 2]");
  if (!(c.top_p > 0.0) || c.top_p > 1.0)
    throw ValidationError("top_p must be in (0, 1]");
}

inline std::string prompt_hash(const std::string& rendered_prompt) {
  return hex64(fnv1a64(rendered_prompt));
}

/// Reads a recorded response for a rendered prompt. Missing fixture is a
/// ServiceError so offline runs fail loudly rather than silently invent data.
inline std::string replay(const fs::path& fixture_dir,
                          const std::string& hash) {
  fs::path file = fixture_dir / (hash + ".txt");
  std::error_code ec;
  if (!fs::exists(file, ec))
    throw ServiceError("no fixture for prompt hash " + hash + " under '" +
                       fixture_dir.string() + "'");
  return read_text_file(file);
}

inline void record_fixture(const fs::path& fixture_dir,
                           const std::string& hash,
                           const std::string& response) {
  write_text_file_atomic(fixture_dir / (hash + ".txt"), response);
}

/// Online transport signature; the HTTP implementation lives in
/// llm_http.hpp so offline consumers never compile the HTTP stack.
using ChatTransport =
    std::function<std::string(const ChatConfig&, const std::string&)>;

/// Prompt transport. Offline mode replays fixtures; online mode calls the
/// injected transport and records the response for future replay.
class LlmClient {
 public:
  LlmClient(ChatConfig config, fs::path fixture_dir, bool offline,
            ChatTransport transport = nullptr)
      : config_(std::move(config)),
        fixture_dir_(std::move(fixture_dir)),
        offline_(offline),
        transport_(std::move(transport)) {
    validate_chat_config(config_);
  }

  bool offline() const { return offline_; }
  const fs::path& fixture_dir() const { return fixture_dir_; }

  std::string complete(const std::string& prompt) const {
    std::string hash = prompt_hash(prompt);
    if (offline_) return replay(fixture_dir_, hash);
    if (!transport_)
      throw ServiceError("online mode requires a chat transport");
    std::string response = transport_(config_, prompt);
    record_fixture(fixture_dir_, hash, response);
    return response;
  }

 private:
  ChatConfig config_;
  fs::path fixture_dir_;
  bool offline_ = true;
  ChatTransport transport_;
};

}  // namespace homegen
