#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

namespace omniflow {

/// Non-owning view of an interleaved row-major float raster.
template <typename T>
struct BasicImageView {
  std::span<T> samples;
  int width = 0;
  int height = 0;
  int channels = 1;

  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  T& at(int x, int y, int c = 0) const { return samples[index(x, y, c)]; }

  operator BasicImageView<const T>() const
    requires(!std::is_const_v<T>)
  {
    return {samples, width, height, channels};
  }
};

using ImageView = BasicImageView<const float>;
using MutableImageView = BasicImageView<float>;

/// Interleaved row-major raster of float samples.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, float fill = 0.0f);
  Image(int width, int height, int channels, std::vector<float> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return samples_.empty(); }

  float& at(int x, int y, int c = 0) { return samples_[index(x, y, c)]; }
  float at(int x, int y, int c = 0) const { return samples_[index(x, y, c)]; }

  std::span<float> samples() { return samples_; }
  std::span<const float> samples() const { return samples_; }

  ImageView view() const { return {samples_, width_, height_, channels_}; }
  MutableImageView view() { return {samples_, width_, height_, channels_}; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> samples_;
};

/// Dense per-pixel displacement in pixel units: u horizontal (towards larger
/// columns), v vertical (towards larger rows).
class FlowField {
 public:
  FlowField() = default;
  FlowField(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return u_.size(); }

  float& u(int x, int y) { return u_[index(x, y)]; }
  float& v(int x, int y) { return v_[index(x, y)]; }
  float u(int x, int y) const { return u_[index(x, y)]; }
  float v(int x, int y) const { return v_[index(x, y)]; }

  std::span<float> u_plane() { return u_; }
  std::span<float> v_plane() { return v_; }
  std::span<const float> u_plane() const { return u_; }
  std::span<const float> v_plane() const { return v_; }

  friend bool operator==(const FlowField&, const FlowField&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> u_;
  std::vector<float> v_;
};

/// 8- or 16-bit interleaved raster ready for lossless export.
template <typename T>
struct BasicRaster {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<T> samples;

  BasicRaster() = default;
  BasicRaster(int w, int h, int c) : width(w), height(h), channels(c),
      samples(static_cast<std::size_t>(w) * h * c) {}

  T& at(int x, int y, int c = 0) {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  T at(int x, int y, int c = 0) const {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  friend bool operator==(const BasicRaster&, const BasicRaster&) = default;
};

using Raster8 = BasicRaster<std::uint8_t>;
using Raster16 = BasicRaster<std::uint16_t>;

/// Rec.601 luma of a 1- or 3/4-channel image, same scale as the input.
Image to_gray(const Image& img);

/// Per-pixel validity mask; nonzero marks a pixel that takes part in a reduction.
using Mask = std::vector<std::uint8_t>;

}  // namespace omniflow
