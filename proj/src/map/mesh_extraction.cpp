#include "spmap/map/mesh_extraction.h"

#include <cmath>
#include <limits>

#include "spmap/map/marching_cubes_tables.h"

namespace spmap {

namespace {

// Bourke cube layout: bottom quad 0-3, top quad 4-7.
constexpr int kCornerOffsets[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};

constexpr int kEdgeCorners[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
    {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

struct EdgeKey {
  GridIndex base;
  int axis_code = 0;  // 1 = +x, 2 = +y, 4 = +z from base
  bool operator==(const EdgeKey&) const = default;
};

struct EdgeKeyHash {
  size_t operator()(const EdgeKey& key) const {
    return GridIndexHash()(key.base) * 31 + static_cast<size_t>(key.axis_code);
  }
};

// Canonical key for the grid edge between two corner voxels: the
// lexicographically smaller endpoint plus the axis.
EdgeKey canonicalEdgeKey(const GridIndex& a, const GridIndex& b) {
  EdgeKey key;
  const GridIndex& lo = a <= b ? a : b;
  const GridIndex& hi = a <= b ? b : a;
  key.base = lo;
  key.axis_code = (hi.x - lo.x) + 2 * (hi.y - lo.y) + 4 * (hi.z - lo.z);
  return key;
}

SuperpointLabel nearestVotedLabel(const LabelTsdfMap& map,
                                  const Eigen::Vector3f& vertex) {
  const Point3d p = vertex.cast<double>();
  const GridIndex center = map.worldToVoxel(p);
  SuperpointLabel best_label = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int dz = -1; dz <= 1; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const GridIndex index{center.x + dx, center.y + dy, center.z + dz};
        const Voxel* voxel = map.voxelPtr(index);
        if (voxel == nullptr || voxel->votes.empty()) {
          continue;
        }
        const double dist = (map.voxelCenter(index) - p).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best_label = *LabelTsdfMap::voxelLabel(*voxel);
        }
      }
    }
  }
  return best_label;
}

}  // namespace

LabeledMesh extractLabeledMesh(const LabelTsdfMap& map,
                               const SemanticAssignment& semantics,
                               const InstanceAssignment& instances) {
  if (map.empty()) {
    throw EmptyMapError("extractLabeledMesh: map has no observed voxels");
  }

  LabeledMesh mesh;
  std::unordered_map<EdgeKey, uint32_t, EdgeKeyHash> edge_vertices;

  auto emitVertex = [&](const GridIndex& ga, const GridIndex& gb, float va,
                        float vb) -> uint32_t {
    const EdgeKey key = canonicalEdgeKey(ga, gb);
    auto it = edge_vertices.find(key);
    if (it != edge_vertices.end()) {
      return it->second;
    }
    const Point3d pa = map.voxelCenter(ga);
    const Point3d pb = map.voxelCenter(gb);
    double t = 0.5;
    if (std::abs(vb - va) > 1e-12f) {
      t = (0.0 - va) / (vb - va);
    }
    t = std::clamp(t, 0.0, 1.0);
    const Point3d position = pa + t * (pb - pa);
    const uint32_t index = static_cast<uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back(position.cast<float>());
    edge_vertices.emplace(key, index);
    return index;
  };

  map.forEachVoxelSorted([&](const GridIndex& base, const Voxel& voxel) {
    if (voxel.weight <= 0.f) {
      return;
    }
    GridIndex corner_index[8];
    const Voxel* corner[8];
    float value[8];
    for (int i = 0; i < 8; ++i) {
      corner_index[i] = GridIndex{base.x + kCornerOffsets[i][0],
                                  base.y + kCornerOffsets[i][1],
                                  base.z + kCornerOffsets[i][2]};
      corner[i] = i == 0 ? &voxel : map.voxelPtr(corner_index[i]);
      if (corner[i] == nullptr || corner[i]->weight <= 0.f) {
        return;  // cell not fully observed
      }
      value[i] = corner[i]->tsdf;
    }

    int cube_index = 0;
    for (int i = 0; i < 8; ++i) {
      if (value[i] < 0.f) {
        cube_index |= 1 << i;
      }
    }
    if (kMcEdgeTable[cube_index] == 0) {
      return;
    }

    uint32_t edge_vertex[12];
    for (int e = 0; e < 12; ++e) {
      if (kMcEdgeTable[cube_index] & (1 << e)) {
        const int a = kEdgeCorners[e][0];
        const int b = kEdgeCorners[e][1];
        edge_vertex[e] =
            emitVertex(corner_index[a], corner_index[b], value[a], value[b]);
      }
    }

    for (int i = 0; kMcTriTable[cube_index][i] != -1; i += 3) {
      mesh.triangles.push_back({edge_vertex[kMcTriTable[cube_index][i]],
                                edge_vertex[kMcTriTable[cube_index][i + 1]],
                                edge_vertex[kMcTriTable[cube_index][i + 2]]});
    }
  });

  mesh.superpoint_labels.resize(mesh.vertices.size(), 0);
  mesh.semantic_ids.resize(mesh.vertices.size(), kBackgroundClass);
  mesh.instance_ids.resize(mesh.vertices.size(), 0);
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    const SuperpointLabel label = nearestVotedLabel(map, mesh.vertices[i]);
    mesh.superpoint_labels[i] = label;
    if (label == 0) {
      continue;
    }
    auto sem_it = semantics.find(label);
    if (sem_it != semantics.end()) {
      mesh.semantic_ids[i] = sem_it->second;
    }
    auto inst_it = instances.find(label);
    if (inst_it != instances.end()) {
      mesh.instance_ids[i] = inst_it->second;
    }
  }
  return mesh;
}

}  // namespace spmap
