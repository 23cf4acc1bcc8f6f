#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "unpad/error.hpp"
#include "unpad/image.hpp"

namespace unpad {

inline ImageBuffer crop_image(const ImageBuffer& image, const CropRect& rect) {
  if (!rect.fits(image.width(), image.height())) {
    throw Error(ErrorCode::RectOutOfBounds,
                "rect (" + std::to_string(rect.left) + "," + std::to_string(rect.top) + " " +
                    std::to_string(rect.width) + "x" + std::to_string(rect.height) +
                    ") does not fit a " + std::to_string(image.width()) + "x" +
                    std::to_string(image.height()) + " image");
  }
  ImageBuffer out(rect.width, rect.height, image.channels());
  const auto ch = static_cast<std::size_t>(image.channels());
  for (int y = 0; y < rect.height; ++y) {
    auto src = image.row(rect.top + y).subspan(static_cast<std::size_t>(rect.left) * ch,
                                               out.stride());
    std::ranges::copy(src, out.row(y).begin());
  }
  return out;
}

/// Clips each box to `rect` and re-expresses it in the cropped frame. Boxes
/// with an empty intersection, or keeping less than `min_visibility` of their
/// original area, are dropped. Surviving boxes keep their order.
inline AnnotationSet transform_annotations(const AnnotationSet& boxes, int original_width,
                                           int original_height, const CropRect& rect,
                                           double min_visibility = 0.0) {
  AnnotationSet out;
  out.reserve(boxes.size());
  const double rl = rect.left;
  const double rt = rect.top;
  const double rr = rl + rect.width;
  const double rb = rt + rect.height;
  for (const auto& box : boxes) {
    const double x0 = (box.cx - box.w / 2) * original_width;
    const double x1 = (box.cx + box.w / 2) * original_width;
    const double y0 = (box.cy - box.h / 2) * original_height;
    const double y1 = (box.cy + box.h / 2) * original_height;

    const double ix0 = std::max(x0, rl);
    const double ix1 = std::min(x1, rr);
    const double iy0 = std::max(y0, rt);
    const double iy1 = std::min(y1, rb);
    if (ix1 <= ix0 || iy1 <= iy0) continue;

    const double area = (x1 - x0) * (y1 - y0);
    const double kept = (ix1 - ix0) * (iy1 - iy0);
    if (area > 0.0 && kept / area < min_visibility) continue;

    const double nx0 = std::clamp((ix0 - rl) / rect.width, 0.0, 1.0);
    const double nx1 = std::clamp((ix1 - rl) / rect.width, 0.0, 1.0);
    const double ny0 = std::clamp((iy0 - rt) / rect.height, 0.0, 1.0);
    const double ny1 = std::clamp((iy1 - rt) / rect.height, 0.0, 1.0);
    out.push_back({box.class_id, (nx0 + nx1) / 2, (ny0 + ny1) / 2, nx1 - nx0, ny1 - ny0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotation text format: "<class_id> <cx> <cy> <w> <h>" per line, floats
// with six decimals.

inline std::string format_box(const BoundingBox& box) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f\n", box.class_id, box.cx, box.cy, box.w,
                box.h);
  return buf;
}

inline void write_annotations(std::ostream& os, const AnnotationSet& boxes) {
  for (const auto& box : boxes) os << format_box(box);
}

inline AnnotationSet read_annotations(std::istream& is) {
  AnnotationSet boxes;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    BoundingBox box;
    std::string extra;
    if (!(fields >> box.class_id >> box.cx >> box.cy >> box.w >> box.h) || (fields >> extra) ||
        box.class_id < 0) {
      throw Error(ErrorCode::Parse, "malformed annotation on line " + std::to_string(line_no));
    }
    boxes.push_back(box);
  }
  return boxes;
}

}  // namespace unpad
