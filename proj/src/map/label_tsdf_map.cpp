#include "spmap/map/label_tsdf_map.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spmap {

namespace {

int floorDiv(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) {
    --q;
  }
  return q;
}

int floorMod(int a, int b) { return a - floorDiv(a, b) * b; }

}  // namespace

LabelTsdfMap::LabelTsdfMap(const Config& config) : config_(config) {
  if (config_.voxel_size <= 0.0) {
    throw std::invalid_argument("LabelTsdfMap: voxel_size must be > 0");
  }
  if (config_.truncation < 2.0 * config_.voxel_size) {
    throw std::invalid_argument(
        "LabelTsdfMap: truncation must be >= 2 * voxel_size");
  }
  if (config_.block_side < 1 || config_.coarse_factor < 1) {
    throw std::invalid_argument("LabelTsdfMap: bad block/coarse sizes");
  }
}

GridIndex LabelTsdfMap::worldToVoxel(const Point3d& p) const {
  return GridIndex{
      static_cast<int32_t>(std::floor(p.x() / config_.voxel_size)),
      static_cast<int32_t>(std::floor(p.y() / config_.voxel_size)),
      static_cast<int32_t>(std::floor(p.z() / config_.voxel_size))};
}

Point3d LabelTsdfMap::voxelCenter(const GridIndex& index) const {
  return Point3d((index.x + 0.5) * config_.voxel_size,
                 (index.y + 0.5) * config_.voxel_size,
                 (index.z + 0.5) * config_.voxel_size);
}

void LabelTsdfMap::blockOf(const GridIndex& voxel, GridIndex* block_index,
                           size_t* linear_index) const {
  const int side = config_.block_side;
  block_index->x = floorDiv(voxel.x, side);
  block_index->y = floorDiv(voxel.y, side);
  block_index->z = floorDiv(voxel.z, side);
  const int lx = floorMod(voxel.x, side);
  const int ly = floorMod(voxel.y, side);
  const int lz = floorMod(voxel.z, side);
  *linear_index = (static_cast<size_t>(lz) * side + ly) * side + lx;
}

LabelTsdfMap::Block& LabelTsdfMap::allocateBlock(const GridIndex& block_index) {
  auto it = blocks_.find(block_index);
  if (it == blocks_.end()) {
    it = blocks_.emplace(block_index, std::make_unique<Block>(config_.block_side))
             .first;
  }
  return *it->second;
}

const Voxel* LabelTsdfMap::voxelPtr(const GridIndex& index) const {
  GridIndex block_index;
  size_t linear = 0;
  blockOf(index, &block_index, &linear);
  auto it = blocks_.find(block_index);
  if (it == blocks_.end()) {
    return nullptr;
  }
  return &it->second->voxels[linear];
}

Voxel& LabelTsdfMap::allocateVoxel(const GridIndex& index) {
  GridIndex block_index;
  size_t linear = 0;
  blockOf(index, &block_index, &linear);
  return allocateBlock(block_index).voxels[linear];
}

void LabelTsdfMap::integrateDepth(const Frame& frame) {
  const Point3d origin = frame.pose.translation();
  const double truncation = config_.truncation;
  const double voxel_size = config_.voxel_size;
  const float observation_weight =
      static_cast<float>(config_.observation_weight);

  const int w = frame.depth.width();
  const int h = frame.depth.height();
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const float d = frame.depth(u, v);
      if (d <= 0.f || !std::isfinite(d)) {
        continue;
      }
      const Point3d surface =
          backproject(u, v, d, frame.intrinsics, frame.pose);
      const Point3d ray = surface - origin;
      const double surface_distance = ray.norm();
      if (surface_distance < 1e-9) {
        continue;
      }
      const Point3d direction = ray / surface_distance;
      const double t_start = std::max(0.0, surface_distance - truncation);
      const double t_end = surface_distance + truncation;

      // Amanatides-Woo traversal visits every voxel the ray passes through.
      const Point3d start = origin + t_start * direction;
      GridIndex current = worldToVoxel(start);
      const GridIndex last = worldToVoxel(origin + t_end * direction);

      double t_max[3];
      double t_delta[3];
      int step[3];
      const int32_t current_xyz[3] = {current.x, current.y, current.z};
      for (int axis = 0; axis < 3; ++axis) {
        const double dir = direction[axis];
        if (std::abs(dir) < 1e-12) {
          step[axis] = 0;
          t_max[axis] = std::numeric_limits<double>::infinity();
          t_delta[axis] = std::numeric_limits<double>::infinity();
        } else {
          step[axis] = dir > 0 ? 1 : -1;
          const double boundary =
              (current_xyz[axis] + (dir > 0 ? 1.0 : 0.0)) * voxel_size;
          t_max[axis] = t_start + (boundary - start[axis]) / dir;
          t_delta[axis] = voxel_size / std::abs(dir);
        }
      }

      double t = t_start;
      while (true) {
        Voxel& voxel = allocateVoxel(current);
        double sdf =
            surface_distance - (voxelCenter(current) - origin).norm();
        sdf = std::clamp(sdf, -truncation, truncation);
        voxel.tsdf = (voxel.tsdf * voxel.weight +
                      static_cast<float>(sdf) * observation_weight) /
                     (voxel.weight + observation_weight);
        voxel.weight += observation_weight;

        if (current == last || t > t_end) {
          break;
        }
        int axis = 0;
        if (t_max[1] < t_max[0]) {
          axis = 1;
        }
        if (t_max[2] < t_max[axis]) {
          axis = 2;
        }
        t = t_max[axis];
        t_max[axis] += t_delta[axis];
        if (axis == 0) {
          current.x += step[0];
        } else if (axis == 1) {
          current.y += step[1];
        } else {
          current.z += step[2];
        }
      }
    }
  }
}

void LabelTsdfMap::Occupancy::insert(const GridIndex& cell) {
  if (cells.empty()) {
    bbox_min = bbox_max = cell;
  } else {
    bbox_min.x = std::min(bbox_min.x, cell.x);
    bbox_min.y = std::min(bbox_min.y, cell.y);
    bbox_min.z = std::min(bbox_min.z, cell.z);
    bbox_max.x = std::max(bbox_max.x, cell.x);
    bbox_max.y = std::max(bbox_max.y, cell.y);
    bbox_max.z = std::max(bbox_max.z, cell.z);
  }
  cells.insert(cell);
}

void LabelTsdfMap::Occupancy::merge(const Occupancy& other) {
  for (const GridIndex& cell : other.cells) {
    insert(cell);
  }
}

void LabelTsdfMap::castVote(const Point3d& world_point, SuperpointLabel label) {
  const GridIndex index = worldToVoxel(world_point);
  Voxel& voxel = allocateVoxel(index);
  auto it = std::lower_bound(
      voxel.votes.begin(), voxel.votes.end(), label,
      [](const VoteCount& vc, SuperpointLabel l) { return vc.label < l; });
  if (it != voxel.votes.end() && it->label == label) {
    ++it->count;
  } else {
    voxel.votes.insert(it, VoteCount{label, 1});
  }

  const int f = config_.coarse_factor;
  occupancy_[label].insert(GridIndex{floorDiv(index.x, f), floorDiv(index.y, f),
                                     floorDiv(index.z, f)});
}

std::optional<SuperpointLabel> LabelTsdfMap::voxelLabel(const Voxel& voxel) {
  if (voxel.votes.empty()) {
    return std::nullopt;
  }
  SuperpointLabel best_label = 0;
  uint32_t best_count = 0;
  for (const VoteCount& vc : voxel.votes) {
    // votes are sorted by label, so strict > keeps the smallest label on ties.
    if (vc.count > best_count) {
      best_count = vc.count;
      best_label = vc.label;
    }
  }
  return best_label;
}

std::optional<SuperpointLabel> LabelTsdfMap::labelAtPoint(
    const Point3d& world_point) const {
  const Voxel* voxel = voxelPtr(worldToVoxel(world_point));
  if (voxel == nullptr) {
    return std::nullopt;
  }
  return voxelLabel(*voxel);
}

std::map<SuperpointLabel, int> LabelTsdfMap::raycastInstance(
    const Frame& frame, InstanceId instance_id) const {
  std::map<SuperpointLabel, int> hits;
  const Point3d origin = frame.pose.translation();
  const double step = config_.voxel_size * 0.5;

  const int w = frame.depth.width();
  const int h = frame.depth.height();
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (frame.panoptic_mask(u, v) != instance_id) {
        continue;
      }
      const float d = frame.depth(u, v);
      if (d <= 0.f || !std::isfinite(d)) {
        continue;
      }
      const Point3d surface =
          backproject(u, v, d, frame.intrinsics, frame.pose);
      const Point3d ray = surface - origin;
      const double surface_distance = ray.norm();
      if (surface_distance < 1e-9) {
        continue;
      }
      const Point3d direction = ray / surface_distance;
      const double t_start = std::max(0.0, surface_distance - config_.truncation);

      GridIndex previous{INT32_MAX, INT32_MAX, INT32_MAX};
      for (double t = t_start; t <= surface_distance + 0.5 * step; t += step) {
        const double t_clamped = std::min(t, surface_distance);
        const GridIndex index = worldToVoxel(origin + t_clamped * direction);
        if (index == previous) {
          continue;
        }
        previous = index;
        const Voxel* voxel = voxelPtr(index);
        if (voxel != nullptr && !voxel->votes.empty()) {
          ++hits[*voxelLabel(*voxel)];
          break;
        }
      }
    }
  }
  return hits;
}

void LabelTsdfMap::renameVotes(SuperpointLabel old_label,
                               SuperpointLabel new_label) {
  if (old_label == new_label) {
    throw std::invalid_argument("renameVotes: labels must differ");
  }
  applyVoteRemap({{old_label, new_label}});
}

void LabelTsdfMap::applyVoteRemap(
    const std::unordered_map<SuperpointLabel, SuperpointLabel>& remap) {
  if (remap.empty()) {
    return;
  }
  for (auto& [block_index, block] : blocks_) {
    for (Voxel& voxel : block->voxels) {
      bool touched = false;
      for (const VoteCount& vc : voxel.votes) {
        if (remap.count(vc.label) > 0) {
          touched = true;
          break;
        }
      }
      if (!touched) {
        continue;
      }
      std::map<SuperpointLabel, uint32_t> folded;
      for (const VoteCount& vc : voxel.votes) {
        auto it = remap.find(vc.label);
        const SuperpointLabel target =
            it == remap.end() ? vc.label : it->second;
        folded[target] += vc.count;
      }
      voxel.votes.clear();
      voxel.votes.reserve(folded.size());
      for (const auto& [label, count] : folded) {
        voxel.votes.push_back(VoteCount{label, count});
      }
      voxel.votes.shrink_to_fit();
    }
  }
  // Fold coarse occupancy the same way.
  for (const auto& [old_label, new_label] : remap) {
    auto it = occupancy_.find(old_label);
    if (it == occupancy_.end()) {
      continue;
    }
    occupancy_[new_label].merge(it->second);
    occupancy_.erase(old_label);
  }
}

double LabelTsdfMap::approxSuperpointDistance(SuperpointLabel a,
                                              SuperpointLabel b) const {
  auto it_a = occupancy_.find(a);
  auto it_b = occupancy_.find(b);
  if (it_a == occupancy_.end() || it_b == occupancy_.end() ||
      it_a->second.cells.empty() || it_b->second.cells.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  const Occupancy* small = &it_a->second;
  const Occupancy* large = &it_b->second;
  if (small->cells.size() > large->cells.size()) {
    std::swap(small, large);
  }

  // Fast path: sharing or touching a coarse cell counts as contact.
  for (const GridIndex& cell : small->cells) {
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (large->cells.count(
                  GridIndex{cell.x + dx, cell.y + dy, cell.z + dz}) > 0) {
            return 0.0;
          }
        }
      }
    }
  }

  const double cell_size = config_.voxel_size * config_.coarse_factor;
  auto bboxGap = [&](int min_a, int max_a, int min_b, int max_b) {
    if (max_a < min_b) return static_cast<double>(min_b - max_a - 1);
    if (max_b < min_a) return static_cast<double>(min_a - max_b - 1);
    return 0.0;
  };
  const double gx = bboxGap(small->bbox_min.x, small->bbox_max.x,
                            large->bbox_min.x, large->bbox_max.x);
  const double gy = bboxGap(small->bbox_min.y, small->bbox_max.y,
                            large->bbox_min.y, large->bbox_max.y);
  const double gz = bboxGap(small->bbox_min.z, small->bbox_max.z,
                            large->bbox_min.z, large->bbox_max.z);
  const double bbox_gap =
      cell_size * std::sqrt(gx * gx + gy * gy + gz * gz);
  // Far-apart superpoints do not need an exact distance; the bounding-box
  // gap is a valid lower bound and already drives the confidence to ~0.
  if (bbox_gap > 1.0) {
    return bbox_gap;
  }

  // Cap the pairwise scan; a strided subsample keeps the cost bounded and
  // only ever overestimates the distance.
  constexpr size_t kMaxCells = 512;
  auto sample = [](const std::unordered_set<GridIndex, GridIndexHash>& cells) {
    std::vector<GridIndex> out;
    const size_t stride = cells.size() / kMaxCells + 1;
    out.reserve(cells.size() / stride + 1);
    size_t i = 0;
    for (const GridIndex& cell : cells) {
      if (i++ % stride == 0) {
        out.push_back(cell);
      }
    }
    return out;
  };
  const std::vector<GridIndex> cells_a = sample(small->cells);
  const std::vector<GridIndex> cells_b = sample(large->cells);

  double best_sq = std::numeric_limits<double>::infinity();
  for (const GridIndex& ca : cells_a) {
    for (const GridIndex& cb : cells_b) {
      const double dx = static_cast<double>(ca.x - cb.x);
      const double dy = static_cast<double>(ca.y - cb.y);
      const double dz = static_cast<double>(ca.z - cb.z);
      best_sq = std::min(best_sq, dx * dx + dy * dy + dz * dz);
    }
  }
  // Center distance minus one cell approximates the surface-to-surface gap.
  return std::max(0.0, cell_size * (std::sqrt(best_sq) - 1.0));
}

size_t LabelTsdfMap::approxMemoryBytes() const {
  size_t bytes = 0;
  for (const auto& [index, block] : blocks_) {
    bytes += sizeof(GridIndex) + sizeof(Block);
    bytes += block->voxels.capacity() * sizeof(Voxel);
    for (const Voxel& voxel : block->voxels) {
      bytes += voxel.votes.capacity() * sizeof(VoteCount);
    }
  }
  for (const auto& [label, occupancy] : occupancy_) {
    bytes += sizeof(label) + occupancy.cells.size() * sizeof(GridIndex) * 2;
  }
  return bytes;
}

uint64_t LabelTsdfMap::totalVoteMass() const {
  uint64_t mass = 0;
  for (const auto& [index, block] : blocks_) {
    for (const Voxel& voxel : block->voxels) {
      for (const VoteCount& vc : voxel.votes) {
        mass += vc.count;
      }
    }
  }
  return mass;
}

void LabelTsdfMap::forEachVoxelSorted(
    const std::function<void(const GridIndex&, const Voxel&)>& fn) const {
  std::vector<const std::pair<const GridIndex, std::unique_ptr<Block>>*>
      sorted;
  sorted.reserve(blocks_.size());
  for (const auto& entry : blocks_) {
    sorted.push_back(&entry);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  const int side = config_.block_side;
  for (const auto* entry : sorted) {
    const GridIndex& block_index = entry->first;
    const Block& block = *entry->second;
    size_t linear = 0;
    for (int lz = 0; lz < side; ++lz) {
      for (int ly = 0; ly < side; ++ly) {
        for (int lx = 0; lx < side; ++lx, ++linear) {
          const GridIndex voxel_index{block_index.x * side + lx,
                                      block_index.y * side + ly,
                                      block_index.z * side + lz};
          fn(voxel_index, block.voxels[linear]);
        }
      }
    }
  }
}

}  // namespace spmap
