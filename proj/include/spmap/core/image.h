#ifndef SPMAP_CORE_IMAGE_H_
#define SPMAP_CORE_IMAGE_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace spmap {

// Dense row-major raster. (u, v) = (column, row), origin at the top-left
// pixel, matching the image files on disk.
template <typename T>
class Image {
 public:
  Image() : width_(0), height_(0) {}
  Image(int width, int height, const T& fill = T())
      : width_(width), height_(height) {
    if (width < 0 || height < 0) {
      throw std::invalid_argument("Image: negative dimensions");
    }
    data_.assign(static_cast<size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  size_t size() const { return data_.size(); }

  bool contains(int u, int v) const {
    return u >= 0 && u < width_ && v >= 0 && v < height_;
  }

  T& operator()(int u, int v) { return data_[index(u, v)]; }
  const T& operator()(int u, int v) const { return data_[index(u, v)]; }

  T& at(int u, int v) {
    checkBounds(u, v);
    return data_[index(u, v)];
  }
  const T& at(int u, int v) const {
    checkBounds(u, v);
    return data_[index(u, v)];
  }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  bool operator==(const Image<T>& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           data_ == other.data_;
  }

 private:
  size_t index(int u, int v) const {
    return static_cast<size_t>(v) * width_ + u;
  }
  void checkBounds(int u, int v) const {
    if (!contains(u, v)) {
      throw std::out_of_range("Image::at: pixel outside image");
    }
  }

  int width_;
  int height_;
  std::vector<T> data_;
};

using DepthImage = Image<float>;
using MaskImage = Image<uint16_t>;

struct Rgb {
  uint8_t r = 0;
  uint8_t g = 0;
  uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};
using ColorImage = Image<Rgb>;

}  // namespace spmap

#endif  // SPMAP_CORE_IMAGE_H_
