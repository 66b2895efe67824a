#include "spmap/map/ply_io.h"

#include <cstring>
#include <fstream>
#include <sstream>

namespace spmap {

namespace {

template <typename T>
void writeRaw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T readRaw(std::istream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

void writeVertexHeader(std::ostream& out, size_t vertex_count) {
  out << "ply\n"
      << "format binary_little_endian 1.0\n"
      << "element vertex " << vertex_count << "\n"
      << "property float x\n"
      << "property float y\n"
      << "property float z\n"
      << "property ushort semantic_id\n"
      << "property uint instance_id\n"
      << "property uint superpoint_id\n";
}

void writeVertices(std::ostream& out, const LabeledPoints& points) {
  for (size_t i = 0; i < points.size(); ++i) {
    writeRaw(out, points.positions[i].x());
    writeRaw(out, points.positions[i].y());
    writeRaw(out, points.positions[i].z());
    writeRaw(out, points.semantic_ids[i]);
    writeRaw(out, points.instance_ids[i]);
    writeRaw(out, points.superpoint_ids[i]);
  }
}

}  // namespace

LabeledPoints pointsFromMesh(const LabeledMesh& mesh) {
  LabeledPoints points;
  points.positions = mesh.vertices;
  points.semantic_ids = mesh.semantic_ids;
  points.instance_ids = mesh.instance_ids;
  points.superpoint_ids = mesh.superpoint_labels;
  return points;
}

void writeMeshPly(const LabeledMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw PlyError("writeMeshPly: cannot open " + path);
  }
  writeVertexHeader(out, mesh.vertices.size());
  out << "element face " << mesh.triangles.size() << "\n"
      << "property list uchar int vertex_indices\n"
      << "end_header\n";
  writeVertices(out, pointsFromMesh(mesh));
  for (const auto& triangle : mesh.triangles) {
    writeRaw<uint8_t>(out, 3);
    for (uint32_t index : triangle) {
      writeRaw<int32_t>(out, static_cast<int32_t>(index));
    }
  }
}

void writePointsPly(const LabeledPoints& points, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw PlyError("writePointsPly: cannot open " + path);
  }
  writeVertexHeader(out, points.size());
  out << "end_header\n";
  writeVertices(out, points);
}

LabeledPoints readLabeledPly(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw PlyError("readLabeledPly: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line != "ply") {
    throw PlyError("readLabeledPly: not a PLY file: " + path);
  }

  size_t vertex_count = 0;
  size_t face_count = 0;
  std::vector<std::string> vertex_properties;
  std::string current_element;
  bool binary_le = false;
  while (std::getline(in, line)) {
    std::istringstream tokens(line);
    std::string keyword;
    tokens >> keyword;
    if (keyword == "comment") {
      continue;
    }
    if (keyword == "format") {
      std::string format;
      tokens >> format;
      binary_le = (format == "binary_little_endian");
    } else if (keyword == "element") {
      std::string name;
      size_t count = 0;
      tokens >> name >> count;
      current_element = name;
      if (name == "vertex") {
        vertex_count = count;
      } else if (name == "face") {
        face_count = count;
      } else {
        throw PlyError("readLabeledPly: unsupported element " + name);
      }
    } else if (keyword == "property") {
      if (current_element == "vertex") {
        std::string type, name;
        tokens >> type >> name;
        vertex_properties.push_back(type + " " + name);
      }
    } else if (keyword == "end_header") {
      break;
    }
  }

  const std::vector<std::string> want = {
      "float x",           "float y",          "float z",
      "ushort semantic_id", "uint instance_id", "uint superpoint_id"};
  if (!binary_le || vertex_properties != want) {
    throw PlyError("readLabeledPly: unsupported vertex layout in " + path);
  }

  LabeledPoints points;
  points.positions.reserve(vertex_count);
  points.semantic_ids.reserve(vertex_count);
  points.instance_ids.reserve(vertex_count);
  points.superpoint_ids.reserve(vertex_count);
  for (size_t i = 0; i < vertex_count; ++i) {
    const float x = readRaw<float>(in);
    const float y = readRaw<float>(in);
    const float z = readRaw<float>(in);
    points.positions.emplace_back(x, y, z);
    points.semantic_ids.push_back(readRaw<uint16_t>(in));
    points.instance_ids.push_back(readRaw<uint32_t>(in));
    points.superpoint_ids.push_back(readRaw<uint32_t>(in));
  }
  if (!in) {
    throw PlyError("readLabeledPly: truncated vertex data in " + path);
  }
  (void)face_count;  // faces are not needed by any consumer
  return points;
}

}  // namespace spmap
