#ifndef SPMAP_MAP_MESH_EXTRACTION_H_
#define SPMAP_MAP_MESH_EXTRACTION_H_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "spmap/core/frame.h"
#include "spmap/map/label_tsdf_map.h"

namespace spmap {

struct LabeledMesh {
  std::vector<Eigen::Vector3f> vertices;
  std::vector<SuperpointLabel> superpoint_labels;  // 0 = unlabeled
  std::vector<uint16_t> semantic_ids;
  std::vector<uint32_t> instance_ids;
  std::vector<std::array<uint32_t, 3>> triangles;
};

using SemanticAssignment = std::unordered_map<SuperpointLabel, ClassId>;
using InstanceAssignment = std::unordered_map<SuperpointLabel, uint32_t>;

// Marching-cubes surface at the TSDF zero crossing over observed voxels.
// Each vertex carries the superpoint label of its nearest voted voxel,
// mapped through the supplied assignments (absent labels map to background
// semantics and instance 0). Throws EmptyMapError on an empty map.
LabeledMesh extractLabeledMesh(const LabelTsdfMap& map,
                               const SemanticAssignment& semantics,
                               const InstanceAssignment& instances);

}  // namespace spmap

#endif  // SPMAP_MAP_MESH_EXTRACTION_H_
