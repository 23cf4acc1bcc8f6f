#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "unpad/error.hpp"
#include "unpad/image.hpp"

namespace unpad {

namespace fs = std::filesystem;

inline std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

inline bool is_image_path(const fs::path& path) {
  static const std::vector<std::string> kExtensions{".png", ".jpg",  ".jpeg", ".bmp",
                                                    ".tif", ".tiff", ".webp"};
  return std::ranges::find(kExtensions, lower_extension(path)) != kExtensions.end();
}

/// A single file, or the image files directly inside a directory, sorted
/// by name.
inline std::vector<fs::path> list_images(const fs::path& input) {
  std::error_code ec;
  if (fs::is_regular_file(input, ec)) return {input};
  if (!fs::is_directory(input, ec)) {
    throw Error(ErrorCode::Io, "cannot read input path " + input.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input)) {
    if (entry.is_regular_file() && is_image_path(entry.path())) files.push_back(entry.path());
  }
  std::ranges::sort(files);
  return files;
}

/// Decodes an 8-bit image with 1, 3 or 4 channels. Channel order is kept as
/// stored by the codec; detection does not depend on it.
inline ImageBuffer read_image(const fs::path& path) {
  const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (mat.empty()) {
    throw Error(ErrorCode::Io, "cannot decode image " + path.string());
  }
  if (mat.depth() != CV_8U) {
    throw Error(ErrorCode::Io, "only 8-bit images are supported: " + path.string());
  }
  const int channels = mat.channels();
  if (channels != 1 && channels != 3 && channels != 4) {
    throw Error(ErrorCode::Io, "unsupported channel count in " + path.string());
  }
  ImageBuffer image(mat.cols, mat.rows, channels);
  for (int y = 0; y < mat.rows; ++y) {
    const auto* src = mat.ptr<std::uint8_t>(y);
    std::copy_n(src, image.stride(), image.row(y).begin());
  }
  return image;
}

inline void write_image(const fs::path& path, const ImageBuffer& image) {
  const int type = CV_MAKETYPE(CV_8U, image.channels());
  // cv::Mat does not take const data; imwrite only reads it.
  const cv::Mat mat(image.height(), image.width(), type,
                    const_cast<std::uint8_t*>(image.data().data()));
  std::vector<int> flags;
  const std::string ext = lower_extension(path);
  if (ext == ".jpg" || ext == ".jpeg") flags = {cv::IMWRITE_JPEG_QUALITY, 95};
  if (ext == ".png") flags = {cv::IMWRITE_PNG_COMPRESSION, 3};
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat, flags);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::Io, "cannot encode " + path.string() + ": " + e.what());
  }
  if (!ok) throw Error(ErrorCode::Io, "cannot write image " + path.string());
}

inline std::string read_text_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  os << content;
  if (!os) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace unpad
