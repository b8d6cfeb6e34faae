#pragma once

// Mesh export/import: OBJ with per-vertex colors (x y z r g b extension) and
// glTF 2.0 with an embedded base64 buffer. Submesh labels become named
// objects (OBJ) or nodes (glTF). Import supports the subset we emit.

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homegen/error.hpp"
#include "homegen/geometry.hpp"
#include "homegen/scene_ir.hpp"

namespace homegen {

enum class MeshFormat { kObj, kGltf };

inline MeshFormat mesh_format_from_name(const std::string& name) {
  if (name == "obj") return MeshFormat::kObj;
  if (name == "gltf") return MeshFormat::kGltf;
  throw ValidationError("unknown mesh format '" + name + "'");
}

namespace detail_mesh {

inline void append_number(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline const char* kBase64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(const std::vector<std::uint8_t>& data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= data.size(); i += 3) {
    std::uint32_t n = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(kBase64Alphabet[(n >> 18) & 63]);
    out.push_back(kBase64Alphabet[(n >> 12) & 63]);
    out.push_back(kBase64Alphabet[(n >> 6) & 63]);
    out.push_back(kBase64Alphabet[n & 63]);
  }
  if (i + 1 == data.size()) {
    std::uint32_t n = data[i] << 16;
    out.push_back(kBase64Alphabet[(n >> 18) & 63]);
    out.push_back(kBase64Alphabet[(n >> 12) & 63]);
    out += "==";
  } else if (i + 2 == data.size()) {
    std::uint32_t n = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(kBase64Alphabet[(n >> 18) & 63]);
    out.push_back(kBase64Alphabet[(n >> 12) & 63]);
    out.push_back(kBase64Alphabet[(n >> 6) & 63]);
    out += "=";
  }
  return out;
}

inline std::vector<std::uint8_t> base64_decode(const std::string& text) {
  int lut[256];
  for (int i = 0; i < 256; ++i) lut[i] = -1;
  for (int i = 0; i < 64; ++i)
    lut[static_cast<unsigned char>(kBase64Alphabet[i])] = i;
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  std::uint32_t acc = 0;
  int bits = 0;
  for (char ch : text) {
    if (ch == '=' || ch == '\n' || ch == '\r') continue;
    int v = lut[static_cast<unsigned char>(ch)];
    if (v < 0) throw IoError("invalid base64 character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xff));
    }
  }
  return out;
}

template <typename T>
void append_raw(std::vector<std::uint8_t>& buf, const T& v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  buf.insert(buf.end(), p, p + sizeof(T));
}

/// Submesh ranges in face order; a single unnamed range when none are set.
inline std::vector<Submesh> effective_submeshes(const SceneMesh& mesh) {
  if (!mesh.submeshes.empty()) return mesh.submeshes;
  if (mesh.faces.empty()) return {};
  Submesh all;
  all.label = "mesh";
  all.begin = 0;
  all.count = static_cast<int>(mesh.faces.size());
  return {all};
}

}  // namespace detail_mesh

// ---------------------------------------------------------------------------
// OBJ

inline void export_obj(const SceneMesh& mesh, const std::string& path) {
  std::string out;
  out.reserve(mesh.vertices.size() * 64 + mesh.faces.size() * 24);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    const Vec3 c = i < mesh.colors.size() ? mesh.colors[i] : Vec3{0.7, 0.7, 0.7};
    out += "v ";
    detail_mesh::append_number(out, v.x);
    out += ' ';
    detail_mesh::append_number(out, v.y);
    out += ' ';
    detail_mesh::append_number(out, v.z);
    out += ' ';
    detail_mesh::append_number(out, c.x);
    out += ' ';
    detail_mesh::append_number(out, c.y);
    out += ' ';
    detail_mesh::append_number(out, c.z);
    out += '\n';
  }
  auto subs = detail_mesh::effective_submeshes(mesh);
  std::size_t next_sub = 0;
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    while (next_sub < subs.size() &&
           fi == static_cast<std::size_t>(subs[next_sub].begin)) {
      out += "o " + subs[next_sub].label + "\n";
      ++next_sub;
    }
    const auto& f = mesh.faces[fi];
    out += "f ";
    detail_mesh::append_number(out, f[0] + 1);
    out += ' ';
    detail_mesh::append_number(out, f[1] + 1);
    out += ' ';
    detail_mesh::append_number(out, f[2] + 1);
    out += '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for '" + path + "'");
}

inline SceneMesh import_obj(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open '" + path + "'");
  SceneMesh mesh;
  std::string line;
  auto close_submesh = [&mesh]() {
    if (!mesh.submeshes.empty() && mesh.submeshes.back().count < 0)
      mesh.submeshes.back().count =
          static_cast<int>(mesh.faces.size()) - mesh.submeshes.back().begin;
  };
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag.empty() || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z))
        throw IoError("obj: bad vertex at line " + std::to_string(line_no));
      double r, g, b;
      if (ss >> r >> g >> b)
        mesh.colors.push_back({r, g, b});
      else
        mesh.colors.push_back({0.7, 0.7, 0.7});
      mesh.vertices.push_back({x, y, z});
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        // "i", "i/j", "i//k" forms; only the vertex index matters.
        int v = 0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || v <= 0 ||
            v > static_cast<int>(mesh.vertices.size()))
          throw IoError("obj: bad face index at line " + std::to_string(line_no));
        idx.push_back(v - 1);
      }
      if (idx.size() < 3)
        throw IoError("obj: face with <3 vertices at line " + std::to_string(line_no));
      for (std::size_t k = 2; k < idx.size(); ++k)
        mesh.faces.push_back({idx[0], idx[k - 1], idx[k]});
    } else if (tag == "o" || tag == "g") {
      close_submesh();
      std::string name;
      std::getline(ss, name);
      while (!name.empty() && name.front() == ' ') name.erase(name.begin());
      Submesh sub;
      sub.label = name;
      sub.begin = static_cast<int>(mesh.faces.size());
      sub.count = -1;
      mesh.submeshes.push_back(sub);
    }
  }
  close_submesh();
  return mesh;
}

// ---------------------------------------------------------------------------
// glTF 2.0, single embedded buffer

inline void export_gltf(const SceneMesh& mesh, const std::string& path) {
  using nlohmann::json;
  json doc;
  doc["asset"] = {{"version", "2.0"}, {"generator", "homegen"}};
  doc["scene"] = 0;
  doc["scenes"] = json::array({json{{"nodes", json::array()}}});

  auto subs = detail_mesh::effective_submeshes(mesh);
  if (!subs.empty()) {
    // Buffer layout: positions f32 | colors f32 | per-submesh u32 indices.
    std::vector<std::uint8_t> buf;
    const std::size_t vcount = mesh.vertices.size();
    Vec3 lo = mesh.bounds().lo, hi = mesh.bounds().hi;
    for (const auto& v : mesh.vertices) {
      detail_mesh::append_raw(buf, static_cast<float>(v.x));
      detail_mesh::append_raw(buf, static_cast<float>(v.y));
      detail_mesh::append_raw(buf, static_cast<float>(v.z));
    }
    const std::size_t colors_off = buf.size();
    for (std::size_t i = 0; i < vcount; ++i) {
      const Vec3 c = i < mesh.colors.size() ? mesh.colors[i] : Vec3{0.7, 0.7, 0.7};
      detail_mesh::append_raw(buf, static_cast<float>(c.x));
      detail_mesh::append_raw(buf, static_cast<float>(c.y));
      detail_mesh::append_raw(buf, static_cast<float>(c.z));
    }

    doc["bufferViews"] = json::array();
    doc["accessors"] = json::array();
    doc["meshes"] = json::array();
    doc["nodes"] = json::array();

    doc["bufferViews"].push_back({{"buffer", 0},
                                  {"byteOffset", 0},
                                  {"byteLength", colors_off},
                                  {"target", 34962}});
    doc["bufferViews"].push_back({{"buffer", 0},
                                  {"byteOffset", colors_off},
                                  {"byteLength", buf.size() - colors_off},
                                  {"target", 34962}});
    doc["accessors"].push_back(
        {{"bufferView", 0},
         {"componentType", 5126},
         {"count", vcount},
         {"type", "VEC3"},
         {"min", {static_cast<float>(lo.x), static_cast<float>(lo.y),
                  static_cast<float>(lo.z)}},
         {"max", {static_cast<float>(hi.x), static_cast<float>(hi.y),
                  static_cast<float>(hi.z)}}});
    doc["accessors"].push_back({{"bufferView", 1},
                                {"componentType", 5126},
                                {"count", vcount},
                                {"type", "VEC3"}});

    for (std::size_t si = 0; si < subs.size(); ++si) {
      const Submesh& sub = subs[si];
      const std::size_t idx_off = buf.size();
      for (int fi = sub.begin; fi < sub.begin + sub.count; ++fi)
        for (int k = 0; k < 3; ++k)
          detail_mesh::append_raw(buf, static_cast<std::uint32_t>(mesh.faces[fi][k]));
      doc["bufferViews"].push_back({{"buffer", 0},
                                    {"byteOffset", idx_off},
                                    {"byteLength", buf.size() - idx_off},
                                    {"target", 34963}});
      doc["accessors"].push_back({{"bufferView", 2 + si},
                                  {"componentType", 5125},
                                  {"count", sub.count * 3},
                                  {"type", "SCALAR"}});
      doc["meshes"].push_back(
          {{"name", sub.label},
           {"primitives",
            json::array({json{{"attributes", {{"POSITION", 0}, {"COLOR_0", 1}}},
                              {"indices", 2 + si},
                              {"mode", 4}}})}});
      doc["nodes"].push_back({{"name", sub.label}, {"mesh", si}});
      doc["scenes"][0]["nodes"].push_back(si);
    }

    doc["buffers"] = json::array(
        {json{{"byteLength", buf.size()},
              {"uri", "data:application/octet-stream;base64," +
                          detail_mesh::base64_encode(buf)}}});
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  std::string text = doc.dump(1);
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw IoError("write failed for '" + path + "'");
}

inline SceneMesh import_gltf(const std::string& path) {
  using nlohmann::json;
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(file);
  } catch (const json::exception& e) {
    throw IoError("gltf: parse failure: " + std::string(e.what()));
  }
  SceneMesh mesh;
  if (!doc.contains("meshes")) return mesh;

  std::vector<std::uint8_t> buf;
  {
    const auto& buffers = doc.at("buffers");
    if (buffers.size() != 1) throw IoError("gltf: expected a single buffer");
    std::string uri = buffers[0].at("uri").get<std::string>();
    const std::string prefix = "data:application/octet-stream;base64,";
    if (uri.rfind(prefix, 0) != 0) throw IoError("gltf: expected embedded buffer");
    buf = detail_mesh::base64_decode(uri.substr(prefix.size()));
  }
  auto view_bytes = [&](int accessor_idx, std::size_t elem_size,
                        std::size_t& count) -> const std::uint8_t* {
    const auto& acc = doc.at("accessors").at(accessor_idx);
    count = acc.at("count").get<std::size_t>();
    const auto& view = doc.at("bufferViews").at(acc.at("bufferView").get<int>());
    std::size_t off = view.value("byteOffset", std::size_t{0});
    off += acc.value("byteOffset", std::size_t{0});
    if (off + count * elem_size > buf.size())
      throw IoError("gltf: accessor out of buffer bounds");
    return buf.data() + off;
  };

  bool vertices_loaded = false;
  for (const auto& node : doc.at("nodes")) {
    const auto& gmesh = doc.at("meshes").at(node.at("mesh").get<int>());
    for (const auto& prim : gmesh.at("primitives")) {
      if (!vertices_loaded) {
        std::size_t n;
        const auto* p =
            view_bytes(prim.at("attributes").at("POSITION").get<int>(), 12, n);
        for (std::size_t i = 0; i < n; ++i) {
          float xyz[3];
          std::memcpy(xyz, p + i * 12, 12);
          mesh.vertices.push_back({xyz[0], xyz[1], xyz[2]});
        }
        if (prim.at("attributes").contains("COLOR_0")) {
          const auto* pc =
              view_bytes(prim.at("attributes").at("COLOR_0").get<int>(), 12, n);
          for (std::size_t i = 0; i < n; ++i) {
            float rgb[3];
            std::memcpy(rgb, pc + i * 12, 12);
            mesh.colors.push_back({rgb[0], rgb[1], rgb[2]});
          }
        } else {
          mesh.colors.assign(mesh.vertices.size(), Vec3{0.7, 0.7, 0.7});
        }
        vertices_loaded = true;
      }
      std::size_t n;
      const auto* pi = view_bytes(prim.at("indices").get<int>(), 4, n);
      if (n % 3 != 0) throw IoError("gltf: index count not a multiple of 3");
      Submesh sub;
      sub.label = node.value("name", std::string("mesh"));
      sub.begin = static_cast<int>(mesh.faces.size());
      sub.count = static_cast<int>(n / 3);
      for (std::size_t i = 0; i < n; i += 3) {
        std::uint32_t idx[3];
        std::memcpy(idx, pi + i * 4, 12);
        mesh.faces.push_back({static_cast<int>(idx[0]), static_cast<int>(idx[1]),
                              static_cast<int>(idx[2])});
      }
      mesh.submeshes.push_back(sub);
    }
  }
  return mesh;
}

// ---------------------------------------------------------------------------

inline void export_mesh(const SceneMesh& mesh, MeshFormat format,
                        const std::string& path) {
  for (const auto& f : mesh.faces)
    for (int k = 0; k < 3; ++k)
      if (f[k] < 0 || f[k] >= static_cast<int>(mesh.vertices.size()))
        throw ValidationError("mesh has out-of-range face index");
  if (format == MeshFormat::kObj)
    export_obj(mesh, path);
  else
    export_gltf(mesh, path);
}

/// Dispatch on extension: .obj or .gltf.
inline SceneMesh import_mesh(const std::string& path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "obj") return import_obj(path);
  if (ext == "gltf") return import_gltf(path);
  throw ValidationError("unsupported mesh extension '" + ext + "'");
}

}  // namespace homegen
