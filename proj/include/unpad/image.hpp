#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "unpad/error.hpp"

namespace unpad {

/// Decoded 8-bit raster. Rows are contiguous, channels interleaved.
/// The sample vector always holds exactly width * height * channels bytes.
class ImageBuffer {
 public:
  ImageBuffer() = default;

  ImageBuffer(int width, int height, int channels, std::uint8_t fill = 0)
      : ImageBuffer(width, height, channels,
                    std::vector<std::uint8_t>(checked_size(width, height, channels), fill)) {}

  ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data)
      : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (data_.size() != checked_size(width, height, channels)) {
      throw Error(ErrorCode::InvalidArgument,
                  "sample count " + std::to_string(data_.size()) + " does not match " +
                      std::to_string(width) + "x" + std::to_string(height) + "x" +
                      std::to_string(channels));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }

  /// Samples per row.
  std::size_t stride() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(channels_);
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  std::span<const std::uint8_t> row(int y) const noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * stride(), stride()};
  }
  std::span<std::uint8_t> row(int y) noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * stride(), stride()};
  }

  std::uint8_t at(int x, int y, int c) const noexcept { return data_[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c) noexcept { return data_[index(x, y, c)]; }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  static std::size_t checked_size(int width, int height, int channels) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
    }
    if (channels != 1 && channels != 3 && channels != 4) {
      throw Error(ErrorCode::InvalidArgument,
                  "unsupported channel count " + std::to_string(channels));
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
           static_cast<std::size_t>(channels);
  }

  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

enum class Side { Top, Bottom, Left, Right };

inline constexpr std::array<Side, 4> kAllSides{Side::Top, Side::Bottom, Side::Left, Side::Right};

constexpr std::string_view to_string(Side side) {
  switch (side) {
    case Side::Top: return "top";
    case Side::Bottom: return "bottom";
    case Side::Left: return "left";
    case Side::Right: return "right";
  }
  return "?";
}

constexpr std::size_t side_index(Side side) { return static_cast<std::size_t>(side); }

constexpr bool is_vertical(Side side) { return side == Side::Top || side == Side::Bottom; }

/// Image extent perpendicular to a side: height for top/bottom, width for left/right.
inline int perpendicular_extent(const ImageBuffer& image, Side side) {
  return is_vertical(side) ? image.height() : image.width();
}

/// Per-side pixel amounts, indexed by Side.
struct SideValues {
  std::array<int, 4> values{0, 0, 0, 0};

  int& operator[](Side side) noexcept { return values[side_index(side)]; }
  int operator[](Side side) const noexcept { return values[side_index(side)]; }

  friend bool operator==(const SideValues&, const SideValues&) = default;
};

struct CropRect {
  int left = 0;
  int top = 0;
  int width = 0;
  int height = 0;

  static CropRect full(const ImageBuffer& image) { return {0, 0, image.width(), image.height()}; }

  bool fits(int image_width, int image_height) const noexcept {
    return left >= 0 && top >= 0 && width >= 1 && height >= 1 &&
           static_cast<long long>(left) + width <= image_width &&
           static_cast<long long>(top) + height <= image_height;
  }

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

/// Object box in normalized center/size form relative to its image.
struct BoundingBox {
  int class_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool is_normalized(double tolerance = 1e-6) const noexcept {
    return class_id >= 0 && w > 0.0 && h > 0.0 && cx - w / 2 >= -tolerance &&
           cx + w / 2 <= 1.0 + tolerance && cy - h / 2 >= -tolerance &&
           cy + h / 2 <= 1.0 + tolerance;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

using AnnotationSet = std::vector<BoundingBox>;

// ---------------------------------------------------------------------------
// Geometric transforms. All of them copy.

inline ImageBuffer mirror_vertical(const ImageBuffer& image) {
  ImageBuffer out(image.width(), image.height(), image.channels());
  for (int y = 0; y < image.height(); ++y) {
    std::ranges::copy(image.row(image.height() - 1 - y), out.row(y).begin());
  }
  return out;
}

inline ImageBuffer flip_horizontal(const ImageBuffer& image) {
  ImageBuffer out(image.width(), image.height(), image.channels());
  const int ch = image.channels();
  for (int y = 0; y < image.height(); ++y) {
    auto src = image.row(y);
    auto dst = out.row(y);
    for (int x = 0; x < image.width(); ++x) {
      const auto from = static_cast<std::size_t>(image.width() - 1 - x) * ch;
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(from), ch,
                  dst.begin() + static_cast<std::ptrdiff_t>(x) * ch);
    }
  }
  return out;
}

/// out(x, y) = in(y, x); the output is height x width.
inline ImageBuffer transpose(const ImageBuffer& image) {
  ImageBuffer out(image.height(), image.width(), image.channels());
  const int ch = image.channels();
  for (int y = 0; y < image.height(); ++y) {
    auto src = image.row(y);
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < ch; ++c) {
        out.at(y, x, c) = src[static_cast<std::size_t>(x) * ch + c];
      }
    }
  }
  return out;
}

/// Re-orients the image so that the border of `side` becomes row 0. A line at
/// distance L from that border ends up between rows L-1 and L.
inline ImageBuffer reduce_to_top(const ImageBuffer& image, Side side) {
  switch (side) {
    case Side::Top: return image;
    case Side::Bottom: return mirror_vertical(image);
    case Side::Left: return transpose(image);
    case Side::Right: return transpose(flip_horizontal(image));
  }
  return image;
}

/// Inverse of reduce_to_top.
inline ImageBuffer restore_from_top(const ImageBuffer& reduced, Side side) {
  switch (side) {
    case Side::Top: return reduced;
    case Side::Bottom: return mirror_vertical(reduced);
    case Side::Left: return transpose(reduced);
    case Side::Right: return flip_horizontal(transpose(reduced));
  }
  return reduced;
}

}  // namespace unpad
