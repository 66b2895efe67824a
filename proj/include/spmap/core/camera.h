#ifndef SPMAP_CORE_CAMERA_H_
#define SPMAP_CORE_CAMERA_H_

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>
#include <stdexcept>

namespace spmap {

using Point3d = Eigen::Vector3d;
using Vector3d = Eigen::Vector3d;

struct InvalidDepthError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Pinhole model. Pixel coordinates are continuous with integer samples at
// pixel centers; (u, v) = (column, row), u along +x, v along +y (down).
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  bool valid() const {
    return fx > 0.0 && fy > 0.0 && cx > 0.0 && cx < width && cy > 0.0 &&
           cy < height && width > 0 && height > 0;
  }
};

// Rigid camera-to-world transform.
class Pose {
 public:
  Pose() : rotation_(Eigen::Matrix3d::Identity()), translation_(0, 0, 0) {}
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  static Pose identity() { return Pose(); }
  static Pose fromQuaternion(const Eigen::Quaterniond& q,
                             const Eigen::Vector3d& t) {
    return Pose(q.normalized().toRotationMatrix(), t);
  }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  // rotation must be orthonormal with determinant +1 (tolerance 1e-6).
  bool valid(double tol = 1e-6) const {
    const Eigen::Matrix3d gram = rotation_.transpose() * rotation_;
    if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) {
      return false;
    }
    return std::abs(rotation_.determinant() - 1.0) <= tol &&
           translation_.allFinite();
  }

  Point3d apply(const Point3d& p_local) const {
    return rotation_ * p_local + translation_;
  }
  Point3d applyInverse(const Point3d& p_world) const {
    return rotation_.transpose() * (p_world - translation_);
  }

  Pose compose(const Pose& other) const {
    return Pose(rotation_ * other.rotation_,
                rotation_ * other.translation_ + translation_);
  }
  Pose inverse() const {
    return Pose(rotation_.transpose(),
                -(rotation_.transpose() * translation_));
  }

  Eigen::Quaterniond quaternion() const {
    return Eigen::Quaterniond(rotation_);
  }

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

// Lifts pixel (u, v) at depth depth_m (camera z, meters) into world
// coordinates. Throws InvalidDepthError on non-positive or non-finite depth.
Point3d backproject(double u, double v, double depth_m,
                    const CameraIntrinsics& intrinsics, const Pose& pose);

// Camera-frame ray direction through pixel (u, v), scaled so that z == 1.
Vector3d pixelRay(double u, double v, const CameraIntrinsics& intrinsics);

struct PixelDepth {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

// Inverse of backproject. Empty when the point lies at or behind the camera
// plane (z <= 0); callers must still bounds-check (u, v) themselves.
std::optional<PixelDepth> projectToPixel(const Point3d& p_world,
                                         const CameraIntrinsics& intrinsics,
                                         const Pose& pose);

}  // namespace spmap

#endif  // SPMAP_CORE_CAMERA_H_
