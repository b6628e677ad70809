#include "omniflow/raster.hpp"

#include <string>
#include <utility>

#include "omniflow/error.hpp"

namespace omniflow {

namespace {

std::size_t checked_count(int width, int height, int channels) {
  if (width < 0 || height < 0 || channels < 0) {
    throw ShapeError("raster dimensions must be non-negative");
  }
  return static_cast<std::size_t>(width) * height * channels;
}

}  // namespace

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels),
      samples_(checked_count(width, height, channels), fill) {}

Image::Image(int width, int height, int channels, std::vector<float> samples)
    : width_(width), height_(height), channels_(channels), samples_(std::move(samples)) {
  if (samples_.size() != checked_count(width, height, channels)) {
    throw ShapeError("sample count " + std::to_string(samples_.size()) +
                     " does not match " + std::to_string(width) + "x" +
                     std::to_string(height) + "x" + std::to_string(channels));
  }
}

FlowField::FlowField(int width, int height)
    : width_(width), height_(height),
      u_(checked_count(width, height, 1), 0.0f),
      v_(checked_count(width, height, 1), 0.0f) {}

Image to_gray(const Image& img) {
  if (img.channels() == 1) return img;
  if (img.channels() < 3) {
    throw ShapeError("grayscale conversion needs 1, 3 or 4 channels");
  }
  Image gray(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      gray.at(x, y) = static_cast<float>(0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                                         0.114 * img.at(x, y, 2));
    }
  }
  return gray;
}

}  // namespace omniflow
