#include "spmap/synth/noise.h"

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <random>

namespace spmap {

namespace {

std::mt19937_64 frameRng(uint64_t seed, int frame_index, uint64_t channel) {
  std::seed_seq seq{seed, static_cast<uint64_t>(frame_index) + 1, channel};
  return std::mt19937_64(seq);
}

Eigen::Matrix3d randomSmallRotation(std::mt19937_64& rng, double std_deg) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Vector3d axis(gauss(rng), gauss(rng), gauss(rng));
  if (axis.norm() < 1e-12) {
    axis = Eigen::Vector3d::UnitZ();
  }
  axis.normalize();
  const double angle = gauss(rng) * std_deg * std::numbers::pi / 180.0;
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

struct PixelFlip {
  int u = 0;
  int v = 0;
  InstanceId value = 0;
};

// Erodes (shrinks) or dilates (grows) one instance's mask region by one
// pixel, k times.
void morphInstance(MaskImage* mask, InstanceId id, bool dilate, int steps) {
  constexpr int du[4] = {1, -1, 0, 0};
  constexpr int dv[4] = {0, 0, 1, -1};
  for (int step = 0; step < steps; ++step) {
    std::vector<PixelFlip> flips;
    for (int v = 0; v < mask->height(); ++v) {
      for (int u = 0; u < mask->width(); ++u) {
        const bool is_id = (*mask)(u, v) == id;
        if (dilate == is_id) {
          continue;
        }
        bool boundary = false;
        for (int k = 0; k < 4 && !boundary; ++k) {
          const int nu = u + du[k];
          const int nv = v + dv[k];
          if (mask->contains(nu, nv)) {
            boundary = ((*mask)(nu, nv) == id) != is_id;
          }
        }
        if (boundary) {
          flips.push_back({u, v, dilate ? id : InstanceId(0)});
        }
      }
    }
    for (const PixelFlip& flip : flips) {
      (*mask)(flip.u, flip.v) = flip.value;
    }
  }
}

}  // namespace

std::vector<Frame> applyNoise(const std::vector<Frame>& sequence,
                              const NoiseSpec& noise, uint64_t seed,
                              const ClassTable& classes) {
  if (noise.isZero()) {
    return sequence;
  }

  std::vector<Frame> noisy = sequence;

  // Pose random walk accumulates over frames.
  Eigen::Matrix3d drift_rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d drift_translation = Eigen::Vector3d::Zero();

  for (size_t i = 0; i < noisy.size(); ++i) {
    Frame& frame = noisy[i];

    if (noise.pose_drift_rot_deg > 0.0 || noise.pose_drift_trans_m > 0.0) {
      auto rng = frameRng(seed, frame.frame_index, 1);
      std::normal_distribution<double> gauss(0.0, 1.0);
      if (noise.pose_drift_rot_deg > 0.0) {
        drift_rotation =
            randomSmallRotation(rng, noise.pose_drift_rot_deg) *
            drift_rotation;
      }
      if (noise.pose_drift_trans_m > 0.0) {
        drift_translation += noise.pose_drift_trans_m *
                             Eigen::Vector3d(gauss(rng), gauss(rng),
                                             gauss(rng));
      }
      frame.pose = Pose(drift_rotation * frame.pose.rotation(),
                        drift_rotation * frame.pose.translation() +
                            drift_translation);
    }

    if (noise.depth_noise_std > 0.0) {
      auto rng = frameRng(seed, frame.frame_index, 2);
      std::normal_distribution<double> gauss(0.0, noise.depth_noise_std);
      for (float& d : frame.depth.data()) {
        if (d > 0.f) {
          d = std::max(1e-3f, d + static_cast<float>(gauss(rng)));
        }
      }
    }

    if (noise.mask_boundary_px > 0) {
      auto rng = frameRng(seed, frame.frame_index, 3);
      for (const PanopticInstance& instance : frame.instances) {
        const bool dilate = (rng() & 1ull) != 0;
        morphInstance(&frame.panoptic_mask, instance.instance_id, dilate,
                      noise.mask_boundary_px);
      }
    }

    if (noise.mask_misclass_rate > 0.0) {
      auto rng = frameRng(seed, frame.frame_index, 4);
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      for (PanopticInstance& instance : frame.instances) {
        if (uniform(rng) >= noise.mask_misclass_rate) {
          continue;
        }
        // Relabel within the same kind so the sidecar stays well-formed.
        std::vector<ClassId> alternatives;
        for (const auto& [id, info] : classes.classes()) {
          if (info.kind == instance.kind && id != instance.category) {
            alternatives.push_back(id);
          }
        }
        if (!alternatives.empty()) {
          std::uniform_int_distribution<size_t> pick(0,
                                                     alternatives.size() - 1);
          instance.category = alternatives[pick(rng)];
        }
      }
    }
  }
  return noisy;
}

}  // namespace spmap
