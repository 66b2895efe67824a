#ifndef SPMAP_CORE_GRID_INDEX_H_
#define SPMAP_CORE_GRID_INDEX_H_

#include <cstdint>
#include <functional>

namespace spmap {

// Integer cell coordinates for voxel, block, and coarse-occupancy grids.
struct GridIndex {
  int32_t x = 0;
  int32_t y = 0;
  int32_t z = 0;

  bool operator==(const GridIndex&) const = default;
  auto operator<=>(const GridIndex&) const = default;
};

struct GridIndexHash {
  size_t operator()(const GridIndex& index) const {
    // Large-prime mixing; collisions only cost probing, equality is exact.
    const uint64_t p1 = 73856093ull;
    const uint64_t p2 = 19349669ull;
    const uint64_t p3 = 83492791ull;
    return static_cast<size_t>(static_cast<uint64_t>(index.x) * p1 ^
                               static_cast<uint64_t>(index.y) * p2 ^
                               static_cast<uint64_t>(index.z) * p3);
  }
};

}  // namespace spmap

#endif  // SPMAP_CORE_GRID_INDEX_H_
