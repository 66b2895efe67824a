#ifndef SPMAP_MAP_PLY_IO_H_
#define SPMAP_MAP_PLY_IO_H_

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "spmap/map/mesh_extraction.h"

namespace spmap {

struct PlyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Labeled point set, the vertex payload of mesh.ply / points.ply.
struct LabeledPoints {
  std::vector<Eigen::Vector3f> positions;
  std::vector<uint16_t> semantic_ids;
  std::vector<uint32_t> instance_ids;
  std::vector<uint32_t> superpoint_ids;

  size_t size() const { return positions.size(); }
};

LabeledPoints pointsFromMesh(const LabeledMesh& mesh);

// Binary little-endian PLY with per-vertex x/y/z, semantic_id (ushort),
// instance_id (uint), superpoint_id (uint); mesh variant adds faces.
void writeMeshPly(const LabeledMesh& mesh, const std::string& path);
void writePointsPly(const LabeledPoints& points, const std::string& path);

// Reads files produced by the writers above (faces, when present, are
// skipped). Throws PlyError on unknown layouts.
LabeledPoints readLabeledPly(const std::string& path);

}  // namespace spmap

#endif  // SPMAP_MAP_PLY_IO_H_
