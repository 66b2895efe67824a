#ifndef SPMAP_PIPELINE_DATASET_IO_H_
#define SPMAP_PIPELINE_DATASET_IO_H_

#include <string>
#include <vector>

#include "spmap/core/frame.h"

namespace spmap {

struct DatasetError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// On-disk sequence layout:
//   intrinsics.txt        fx fy cx cy width height
//   poses.txt             frame_index tx ty tz qx qy qz qw (camera-to-world)
//   depth/%06d.png        16-bit millimeters, 0 = invalid
//   color/%06d.png        8-bit RGB, optional
//   panoptic/%06d.png     16-bit frame-local instance ids, 0 = unlabeled
//   panoptic/%06d.txt     id category_id thing|stuff score
//   classes.txt           category_id name kind  (0 reserved as background)
void writeDataset(const std::string& directory,
                  const std::vector<Frame>& frames, const ClassTable& classes,
                  bool write_color = false);

class DatasetReader {
 public:
  explicit DatasetReader(const std::string& directory);

  int frameCount() const { return static_cast<int>(poses_.size()); }
  const ClassTable& classes() const { return classes_; }
  const CameraIntrinsics& intrinsics() const { return intrinsics_; }

  // Loads one frame; throws DatasetError naming the offending file.
  Frame readFrame(int index) const;

 private:
  std::string directory_;
  CameraIntrinsics intrinsics_;
  ClassTable classes_;
  std::vector<std::pair<int, Pose>> poses_;  // (frame_index, pose)
};

}  // namespace spmap

#endif  // SPMAP_PIPELINE_DATASET_IO_H_
