#ifndef SPMAP_SYNTH_NOISE_H_
#define SPMAP_SYNTH_NOISE_H_

#include <cstdint>
#include <vector>

#include "spmap/core/frame.h"

namespace spmap {

// Perturbation model emulating SLAM-estimated poses and imperfect panoptic
// predictions. All channels are independent; zero values leave the channel
// untouched bit-for-bit.
struct NoiseSpec {
  double pose_drift_rot_deg = 0.0;  // per-frame random-walk std, degrees
  double pose_drift_trans_m = 0.0;  // per-frame random-walk std, meters
  double depth_noise_std = 0.0;     // additive Gaussian, meters
  int mask_boundary_px = 0;         // erode or dilate each instance mask
  double mask_misclass_rate = 0.0;  // probability of relabeling an instance

  bool isZero() const {
    return pose_drift_rot_deg == 0.0 && pose_drift_trans_m == 0.0 &&
           depth_noise_std == 0.0 && mask_boundary_px == 0 &&
           mask_misclass_rate == 0.0;
  }
};

// Applies the noise model to a rendered sequence; deterministic per seed.
std::vector<Frame> applyNoise(const std::vector<Frame>& sequence,
                              const NoiseSpec& noise, uint64_t seed,
                              const ClassTable& classes);

}  // namespace spmap

#endif  // SPMAP_SYNTH_NOISE_H_
