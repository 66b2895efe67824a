#include "spmap/pipeline/dataset_io.h"

#include <Eigen/Geometry>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <sstream>

namespace spmap {

namespace fs = std::filesystem;

namespace {

std::string frameName(int index, const char* extension) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06d.%s", index, extension);
  return name;
}

cv::Mat depthToMillimeters(const DepthImage& depth) {
  cv::Mat image(depth.height(), depth.width(), CV_16UC1);
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const float meters = depth(u, v);
      const double mm = std::round(static_cast<double>(meters) * 1000.0);
      image.at<uint16_t>(v, u) = static_cast<uint16_t>(
          std::clamp(mm, 0.0, static_cast<double>(UINT16_MAX)));
    }
  }
  return image;
}

const char* kindWord(ClassKind kind) {
  switch (kind) {
    case ClassKind::kThing:
      return "thing";
    case ClassKind::kStuff:
      return "stuff";
    case ClassKind::kBackground:
      break;
  }
  return "background";
}

ClassKind kindFromWord(const std::string& word, const std::string& context) {
  if (word == "thing") return ClassKind::kThing;
  if (word == "stuff") return ClassKind::kStuff;
  if (word == "background") return ClassKind::kBackground;
  throw DatasetError("bad class kind '" + word + "' in " + context);
}

}  // namespace

void writeDataset(const std::string& directory,
                  const std::vector<Frame>& frames, const ClassTable& classes,
                  bool write_color) {
  fs::create_directories(fs::path(directory) / "depth");
  fs::create_directories(fs::path(directory) / "panoptic");
  if (write_color) {
    fs::create_directories(fs::path(directory) / "color");
  }

  if (frames.empty()) {
    throw DatasetError("writeDataset: no frames");
  }

  {
    std::ofstream out(fs::path(directory) / "intrinsics.txt");
    const CameraIntrinsics& k = frames.front().intrinsics;
    out << k.fx << ' ' << k.fy << ' ' << k.cx << ' ' << k.cy << ' ' << k.width
        << ' ' << k.height << '\n';
  }
  {
    std::ofstream out(fs::path(directory) / "classes.txt");
    for (const auto& [id, info] : classes.classes()) {
      out << id << ' ' << info.name << ' ' << kindWord(info.kind) << '\n';
    }
  }

  std::ofstream poses(fs::path(directory) / "poses.txt");
  poses.precision(17);
  for (const Frame& frame : frames) {
    const Eigen::Quaterniond q = frame.pose.quaternion();
    const Eigen::Vector3d& t = frame.pose.translation();
    poses << frame.frame_index << ' ' << t.x() << ' ' << t.y() << ' ' << t.z()
          << ' ' << q.x() << ' ' << q.y() << ' ' << q.z() << ' ' << q.w()
          << '\n';

    const std::string depth_path =
        (fs::path(directory) / "depth" / frameName(frame.frame_index, "png"))
            .string();
    if (!cv::imwrite(depth_path, depthToMillimeters(frame.depth))) {
      throw DatasetError("writeDataset: cannot write " + depth_path);
    }

    cv::Mat mask(frame.panoptic_mask.height(), frame.panoptic_mask.width(),
                 CV_16UC1);
    for (int v = 0; v < mask.rows; ++v) {
      for (int u = 0; u < mask.cols; ++u) {
        mask.at<uint16_t>(v, u) = frame.panoptic_mask(u, v);
      }
    }
    const std::string mask_path =
        (fs::path(directory) / "panoptic" /
         frameName(frame.frame_index, "png"))
            .string();
    if (!cv::imwrite(mask_path, mask)) {
      throw DatasetError("writeDataset: cannot write " + mask_path);
    }

    std::ofstream sidecar(fs::path(directory) / "panoptic" /
                          frameName(frame.frame_index, "txt"));
    sidecar.precision(17);
    for (const PanopticInstance& instance : frame.instances) {
      sidecar << instance.instance_id << ' ' << instance.category << ' '
              << kindWord(instance.kind) << ' ' << instance.score << '\n';
    }

    if (write_color && frame.color.has_value()) {
      cv::Mat color(frame.color->height(), frame.color->width(), CV_8UC3);
      for (int v = 0; v < color.rows; ++v) {
        for (int u = 0; u < color.cols; ++u) {
          const Rgb rgb = (*frame.color)(u, v);
          color.at<cv::Vec3b>(v, u) = cv::Vec3b(rgb.b, rgb.g, rgb.r);
        }
      }
      cv::imwrite((fs::path(directory) / "color" /
                   frameName(frame.frame_index, "png"))
                      .string(),
                  color);
    }
  }
}

DatasetReader::DatasetReader(const std::string& directory)
    : directory_(directory) {
  const fs::path root(directory_);

  const fs::path intrinsics_path = root / "intrinsics.txt";
  std::ifstream intrinsics_file(intrinsics_path);
  if (!intrinsics_file) {
    throw DatasetError("missing file: " + intrinsics_path.string());
  }
  if (!(intrinsics_file >> intrinsics_.fx >> intrinsics_.fy >>
        intrinsics_.cx >> intrinsics_.cy >> intrinsics_.width >>
        intrinsics_.height)) {
    throw DatasetError("malformed intrinsics: " + intrinsics_path.string());
  }

  const fs::path classes_path = root / "classes.txt";
  std::ifstream classes_file(classes_path);
  if (!classes_file) {
    throw DatasetError("missing file: " + classes_path.string());
  }
  std::string line;
  while (std::getline(classes_file, line)) {
    std::istringstream tokens(line);
    int id = 0;
    std::string name, kind;
    if (!(tokens >> id >> name >> kind)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      throw DatasetError("malformed line in " + classes_path.string() + ": '" +
                         line + "'");
    }
    if (id != 0) {
      classes_.add(static_cast<ClassId>(id), name,
                   kindFromWord(kind, classes_path.string()));
    }
  }

  const fs::path poses_path = root / "poses.txt";
  std::ifstream poses_file(poses_path);
  if (!poses_file) {
    throw DatasetError("missing file: " + poses_path.string());
  }
  while (std::getline(poses_file, line)) {
    std::istringstream tokens(line);
    int frame_index = 0;
    double tx, ty, tz, qx, qy, qz, qw;
    if (!(tokens >> frame_index >> tx >> ty >> tz >> qx >> qy >> qz >> qw)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      throw DatasetError("malformed line in " + poses_path.string() + ": '" +
                         line + "'");
    }
    poses_.emplace_back(
        frame_index,
        Pose::fromQuaternion(Eigen::Quaterniond(qw, qx, qy, qz),
                             Eigen::Vector3d(tx, ty, tz)));
  }
}

Frame DatasetReader::readFrame(int index) const {
  if (index < 0 || index >= frameCount()) {
    throw DatasetError("frame index out of range: " + std::to_string(index));
  }
  const auto& [frame_index, pose] = poses_[index];
  const fs::path root(directory_);

  Frame frame;
  frame.frame_index = frame_index;
  frame.pose = pose;
  frame.intrinsics = intrinsics_;

  const std::string depth_path =
      (root / "depth" / frameName(frame_index, "png")).string();
  const cv::Mat depth_mm = cv::imread(depth_path, cv::IMREAD_UNCHANGED);
  if (depth_mm.empty()) {
    throw DatasetError("missing or unreadable file: " + depth_path);
  }
  if (depth_mm.type() != CV_16UC1) {
    throw DatasetError("depth image is not 16-bit: " + depth_path);
  }
  frame.depth = DepthImage(depth_mm.cols, depth_mm.rows, 0.f);
  for (int v = 0; v < depth_mm.rows; ++v) {
    for (int u = 0; u < depth_mm.cols; ++u) {
      frame.depth(u, v) = depth_mm.at<uint16_t>(v, u) / 1000.f;
    }
  }

  const std::string mask_path =
      (root / "panoptic" / frameName(frame_index, "png")).string();
  const cv::Mat mask = cv::imread(mask_path, cv::IMREAD_UNCHANGED);
  if (mask.empty()) {
    throw DatasetError("missing or unreadable file: " + mask_path);
  }
  if (mask.type() != CV_16UC1) {
    throw DatasetError("panoptic image is not 16-bit: " + mask_path);
  }
  if (mask.cols != depth_mm.cols || mask.rows != depth_mm.rows) {
    throw DatasetError("panoptic/depth size mismatch: " + mask_path);
  }
  frame.panoptic_mask = MaskImage(mask.cols, mask.rows, 0);
  for (int v = 0; v < mask.rows; ++v) {
    for (int u = 0; u < mask.cols; ++u) {
      frame.panoptic_mask(u, v) = mask.at<uint16_t>(v, u);
    }
  }

  const fs::path sidecar_path =
      root / "panoptic" / frameName(frame_index, "txt");
  std::ifstream sidecar(sidecar_path);
  if (!sidecar) {
    throw DatasetError("missing file: " + sidecar_path.string());
  }
  std::string line;
  while (std::getline(sidecar, line)) {
    std::istringstream tokens(line);
    int id = 0, category = 0;
    std::string kind;
    double score = 0.0;
    if (!(tokens >> id >> category >> kind >> score)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      throw DatasetError("malformed line in " + sidecar_path.string() + ": '" +
                         line + "'");
    }
    PanopticInstance instance;
    instance.instance_id = static_cast<InstanceId>(id);
    instance.category = static_cast<ClassId>(category);
    instance.kind = kindFromWord(kind, sidecar_path.string());
    instance.score = score;
    frame.instances.push_back(instance);
  }

  const std::string color_path =
      (root / "color" / frameName(frame_index, "png")).string();
  if (fs::exists(color_path)) {
    const cv::Mat color = cv::imread(color_path, cv::IMREAD_COLOR);
    if (!color.empty()) {
      ColorImage image(color.cols, color.rows);
      for (int v = 0; v < color.rows; ++v) {
        for (int u = 0; u < color.cols; ++u) {
          const cv::Vec3b bgr = color.at<cv::Vec3b>(v, u);
          image(u, v) = Rgb{bgr[2], bgr[1], bgr[0]};
        }
      }
      frame.color = std::move(image);
    }
  }
  return frame;
}

}  // namespace spmap
