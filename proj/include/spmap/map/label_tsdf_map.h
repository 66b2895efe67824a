#ifndef SPMAP_MAP_LABEL_TSDF_MAP_H_
#define SPMAP_MAP_LABEL_TSDF_MAP_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "spmap/core/camera.h"
#include "spmap/core/frame.h"
#include "spmap/core/grid_index.h"

namespace spmap {

using SuperpointLabel = uint32_t;  // global, minted from 1; 0 = none

struct VoteCount {
  SuperpointLabel label = 0;
  uint32_t count = 0;
};

struct Voxel {
  float tsdf = 0.f;
  float weight = 0.f;
  // Superpoint vote histogram, sorted by label, counts >= 1.
  std::vector<VoteCount> votes;
};

struct EmptyMapError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sparse block-hashed voxel grid carrying TSDF geometry and per-voxel
// superpoint vote histograms.
class LabelTsdfMap {
 public:
  struct Config {
    double voxel_size = 0.01;  // meters
    double truncation = 0.04;  // meters, >= 2 * voxel_size
    int block_side = 16;       // voxels per block edge
    double observation_weight = 1.0;
    // Coarse occupancy cells (for superpoint distance queries) cover this
    // many voxels per edge.
    int coarse_factor = 4;
  };

  explicit LabelTsdfMap(const Config& config);

  const Config& config() const { return config_; }

  // Standard weighted projective-TSDF update of every voxel within
  // +-truncation of the observed surface along each valid-depth pixel ray.
  void integrateDepth(const Frame& frame);

  // Increments the superpoint vote of the voxel containing world_point,
  // allocating its block if needed, and records coarse occupancy.
  void castVote(const Point3d& world_point, SuperpointLabel label);

  // Vote-histogram argmax; ties break toward the smallest label, empty
  // histograms yield nullopt.
  static std::optional<SuperpointLabel> voxelLabel(const Voxel& voxel);

  // Label of the voxel containing world_point, if allocated and voted.
  std::optional<SuperpointLabel> labelAtPoint(const Point3d& world_point) const;

  // Walks each valid-depth pixel ray of the given instance from the start of
  // the truncation band to the observed surface point; the first voted voxel
  // contributes one hit for its current label.
  std::map<SuperpointLabel, int> raycastInstance(const Frame& frame,
                                                 InstanceId instance_id) const;

  // Folds every histogram entry of old_label into new_label.
  void renameVotes(SuperpointLabel old_label, SuperpointLabel new_label);

  // Batched renameVotes: one sweep applying label -> survivor for all pairs.
  void applyVoteRemap(
      const std::unordered_map<SuperpointLabel, SuperpointLabel>& remap);

  // --- Geometry/addressing -------------------------------------------------
  GridIndex worldToVoxel(const Point3d& p) const;
  Point3d voxelCenter(const GridIndex& index) const;
  const Voxel* voxelPtr(const GridIndex& index) const;
  Voxel& allocateVoxel(const GridIndex& index);

  // --- Superpoint occupancy ------------------------------------------------
  // Approximate minimum distance (meters) between two superpoints' voxel
  // sets, computed on the coarse occupancy grid. Returns infinity when either
  // superpoint has no occupancy.
  double approxSuperpointDistance(SuperpointLabel a, SuperpointLabel b) const;

  // --- Introspection -------------------------------------------------------
  size_t blockCount() const { return blocks_.size(); }
  bool empty() const { return blocks_.empty(); }
  size_t approxMemoryBytes() const;
  uint64_t totalVoteMass() const;

  // Visits every allocated voxel in deterministic (sorted-block) order.
  void forEachVoxelSorted(
      const std::function<void(const GridIndex&, const Voxel&)>& fn) const;

 private:
  struct Block {
    explicit Block(int side) : voxels(static_cast<size_t>(side) * side * side) {}
    std::vector<Voxel> voxels;
  };

  struct Occupancy {
    std::unordered_set<GridIndex, GridIndexHash> cells;
    GridIndex bbox_min{0, 0, 0};
    GridIndex bbox_max{0, 0, 0};
    void insert(const GridIndex& cell);
    void merge(const Occupancy& other);
  };

  Block& allocateBlock(const GridIndex& block_index);
  const Voxel* voxelPtrInBlock(const Block* block, const GridIndex& voxel,
                               const GridIndex& block_index) const;
  void blockOf(const GridIndex& voxel, GridIndex* block_index,
               size_t* linear_index) const;

  Config config_;
  std::unordered_map<GridIndex, std::unique_ptr<Block>, GridIndexHash> blocks_;
  std::unordered_map<SuperpointLabel, Occupancy> occupancy_;
};

}  // namespace spmap

#endif  // SPMAP_MAP_LABEL_TSDF_MAP_H_
