#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unpad/error.hpp"
#include "unpad/image.hpp"

namespace unpad {

/// Inputs of the dividing-line scan. The threshold is in squared 8-bit
/// intensity units, the same scale the MSE is reported in.
struct DetectionParams {
  int offset = 10;
  double threshold = 110.0;
  std::optional<int> scan_cap;

  void validate() const {
    if (offset < 1) {
      throw Error(ErrorCode::InvalidArgument, "offset must be >= 1");
    }
    if (!(threshold >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "threshold must be >= 0");
    }
    if (scan_cap && *scan_cap < 1) {
      throw Error(ErrorCode::InvalidArgument, "scan cap must be >= 1");
    }
  }
};

struct MseEntry {
  int line = 0;
  double mse = 0.0;

  friend bool operator==(const MseEntry&, const MseEntry&) = default;
};

/// MSE as a function of the candidate line, for consecutive lines starting at
/// the offset.
struct MseProfile {
  std::vector<MseEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t size() const noexcept { return entries.size(); }

  /// First entry holding the smallest MSE (strict-less update, so the
  /// smallest line wins ties).
  MseEntry minimum() const {
    if (entries.empty()) {
      throw Error(ErrorCode::OffsetExceedsScanLimit, "empty MSE profile");
    }
    MseEntry best{0, std::numeric_limits<double>::infinity()};
    for (const auto& e : entries) {
      if (e.mse < best.mse) best = e;
    }
    return best;
  }

  friend bool operator==(const MseProfile&, const MseProfile&) = default;
};

struct SideReport {
  Side side = Side::Top;
  double min_mse = 0.0;
  int line = 0;  // 0 means the border, i.e. not padded
  bool padded = false;
  std::optional<MseProfile> profile;
};

struct UnpadReport {
  int width = 0;
  int height = 0;
  std::array<SideReport, 4> sides{};
  CropRect crop{};

  const SideReport& operator[](Side side) const noexcept { return sides[side_index(side)]; }
};

namespace detail {

/// Sum of squared sample differences, exact. Accumulates in 32-bit chunks
/// (32768 * 255^2 < 2^32) so the loop vectorizes, then widens.
inline std::uint64_t sum_squared_diff(std::span<const std::uint8_t> a,
                                      std::span<const std::uint8_t> b) noexcept {
  constexpr std::size_t kChunk = 32768;
  std::uint64_t total = 0;
  const std::size_t n = a.size();
  for (std::size_t start = 0; start < n; start += kChunk) {
    const std::size_t end = std::min(n, start + kChunk);
    std::uint32_t acc = 0;
    for (std::size_t i = start; i < end; ++i) {
      const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
      acc += static_cast<std::uint32_t>(d * d);
    }
    total += acc;
  }
  return total;
}

/// MSE between rows [0, line) reflected and rows [line, 2*line) of an image
/// already oriented so the side of interest is on top. Row line-1-k pairs
/// with row line+k.
inline double top_segment_mse(const ImageBuffer& top_oriented, int line) noexcept {
  std::uint64_t sum = 0;
  for (int k = 0; k < line; ++k) {
    sum += sum_squared_diff(top_oriented.row(line - 1 - k), top_oriented.row(line + k));
  }
  const double n = static_cast<double>(line) * static_cast<double>(top_oriented.stride());
  return static_cast<double>(sum) / n;
}

}  // namespace detail

/// MSE between the reflected top segment of height `line` and the segment
/// of the same height directly below it, over all pixels and channels.
inline double segment_mse(const ImageBuffer& image, int line) {
  if (line < 1 || 2LL * line > image.height()) {
    throw Error(ErrorCode::LineOutOfRange,
                "line " + std::to_string(line) + " outside [1, " +
                    std::to_string(image.height() / 2) + "]");
  }
  return detail::top_segment_mse(image, line);
}

/// Largest line scanned for `side`: floor(d/2), optionally capped.
inline int scan_limit(const ImageBuffer& image, Side side, const DetectionParams& params) {
  const int half = perpendicular_extent(image, side) / 2;
  return params.scan_cap ? std::min(*params.scan_cap, half) : half;
}

namespace detail {

inline MseProfile scan_oriented(const ImageBuffer& top_oriented, int offset, int limit) {
  MseProfile profile;
  profile.entries.reserve(static_cast<std::size_t>(limit - offset + 1));
  for (int line = offset; line <= limit; ++line) {
    profile.entries.push_back({line, top_segment_mse(top_oriented, line)});
  }
  return profile;
}

}  // namespace detail

inline MseProfile scan_side(const ImageBuffer& image, Side side, const DetectionParams& params) {
  params.validate();
  const int limit = scan_limit(image, side, params);
  if (params.offset > limit) {
    throw Error(ErrorCode::OffsetExceedsScanLimit,
                "offset " + std::to_string(params.offset) + " exceeds scan limit " +
                    std::to_string(limit) + " on side " + std::string(to_string(side)));
  }
  return detail::scan_oriented(reduce_to_top(image, side), params.offset, limit);
}

/// Decision for one side: the argmin line is kept only if its MSE is within
/// the threshold, otherwise the side reports the border (line 0).
inline SideReport judge_profile(Side side, MseProfile profile, double threshold,
                                bool keep_profile) {
  const MseEntry best = profile.minimum();
  SideReport report;
  report.side = side;
  report.min_mse = best.mse;
  report.padded = best.mse <= threshold;
  report.line = report.padded ? best.line : 0;
  if (keep_profile) report.profile = std::move(profile);
  return report;
}

inline SideReport detect_side(const ImageBuffer& image, Side side, const DetectionParams& params,
                              bool keep_profile = false) {
  return judge_profile(side, scan_side(image, side, params), params.threshold, keep_profile);
}

/// Crop implied by four independent per-side lines.
inline CropRect crop_from_lines(int width, int height, const SideValues& lines) {
  CropRect rect{lines[Side::Left], lines[Side::Top], width - lines[Side::Left] - lines[Side::Right],
                height - lines[Side::Top] - lines[Side::Bottom]};
  if (rect.width < 1 || rect.height < 1) {
    throw Error(ErrorCode::EmptyCrop, "opposite dividing lines leave an empty crop");
  }
  return rect;
}

/// Runs the scan on every side of the original image (sides do not see each
/// other's crops) and combines the lines into a single crop rectangle.
inline UnpadReport detect_all_sides(const ImageBuffer& image, const DetectionParams& params,
                                    bool keep_profiles = false) {
  UnpadReport report;
  report.width = image.width();
  report.height = image.height();
  SideValues lines;
  for (Side side : kAllSides) {
    report.sides[side_index(side)] = detect_side(image, side, params, keep_profiles);
    lines[side] = report.sides[side_index(side)].line;
  }
  report.crop = crop_from_lines(image.width(), image.height(), lines);
  return report;
}

}  // namespace unpad
