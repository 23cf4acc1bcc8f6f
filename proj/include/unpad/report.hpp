#pragma once

#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "unpad/calibration.hpp"
#include "unpad/detector.hpp"
#include "unpad/error.hpp"
#include "unpad/image.hpp"

namespace unpad {

// ---------------------------------------------------------------------------
// Labeled manifest: "<image_path> <top> <bottom> <left> <right>" per line.

struct ManifestEntry {
  std::string path;
  SideValues pads;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

inline std::vector<ManifestEntry> read_manifest(std::istream& is) {
  std::vector<ManifestEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    ManifestEntry e;
    std::string extra;
    if (!(fields >> e.path >> e.pads[Side::Top] >> e.pads[Side::Bottom] >> e.pads[Side::Left] >>
          e.pads[Side::Right]) ||
        (fields >> extra)) {
      throw Error(ErrorCode::Parse, "malformed manifest line " + std::to_string(line_no));
    }
    for (int v : e.pads.values) {
      if (v < 0) {
        throw Error(ErrorCode::Parse, "negative pad on manifest line " + std::to_string(line_no));
      }
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

inline void write_manifest(std::ostream& os, const std::vector<ManifestEntry>& entries) {
  for (const auto& e : entries) {
    os << e.path << ' ' << e.pads[Side::Top] << ' ' << e.pads[Side::Bottom] << ' '
       << e.pads[Side::Left] << ' ' << e.pads[Side::Right] << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON report. Written by hand so every real number uses the same fixed
// six-decimal form and reruns diff cleanly.

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string json_quote(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
  return out;
}

struct ImageEntry {
  std::string path;
  UnpadReport report;
  std::optional<std::string> output;
  std::optional<std::size_t> boxes_before;
  std::optional<std::size_t> boxes_after;
};

struct ErrorEntry {
  std::string path;
  std::string message;
};

struct BatchReport {
  std::vector<ImageEntry> images;
  std::vector<ErrorEntry> errors;
};

inline std::string format_report(const BatchReport& batch) {
  std::string out = "{\n  \"images\": [";
  for (std::size_t i = 0; i < batch.images.size(); ++i) {
    const auto& e = batch.images[i];
    const auto& r = e.report;
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"path\": " + json_quote(e.path) + ", \"width\": " + std::to_string(r.width) +
           ", \"height\": " + std::to_string(r.height) + ", \"sides\": [";
    for (std::size_t s = 0; s < r.sides.size(); ++s) {
      const auto& side = r.sides[s];
      if (s > 0) out += ", ";
      out += "{\"side\": " + json_quote(to_string(side.side)) +
             ", \"min_mse\": " + fixed6(side.min_mse) + ", \"line\": " + std::to_string(side.line) +
             ", \"padded\": " + (side.padded ? "true" : "false") + "}";
    }
    out += "], \"crop\": {\"left\": " + std::to_string(r.crop.left) +
           ", \"top\": " + std::to_string(r.crop.top) +
           ", \"width\": " + std::to_string(r.crop.width) +
           ", \"height\": " + std::to_string(r.crop.height) + "}";
    if (e.output) out += ", \"output\": " + json_quote(*e.output);
    if (e.boxes_before) out += ", \"boxes_before\": " + std::to_string(*e.boxes_before);
    if (e.boxes_after) out += ", \"boxes_after\": " + std::to_string(*e.boxes_after);
    out += "}";
  }
  out += batch.images.empty() ? "],\n" : "\n  ],\n";
  out += "  \"errors\": [";
  for (std::size_t i = 0; i < batch.errors.size(); ++i) {
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"path\": " + json_quote(batch.errors[i].path) +
           ", \"message\": " + json_quote(batch.errors[i].message) + "}";
  }
  out += batch.errors.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

inline std::string format_profile_csv(const MseProfile& profile) {
  std::string out = "L,mse\n";
  for (const auto& e : profile.entries) out += std::to_string(e.line) + "," + fixed6(e.mse) + "\n";
  return out;
}

/// Summary of an Otsu calibration run, scored against the manifest labels.
inline std::string format_otsu_summary(const OtsuResult& otsu, const SweepPoint& score) {
  std::string out = "{\n  \"method\": \"otsu\",\n";
  out += "  \"min\": " + fixed6(otsu.min_value) + ",\n";
  out += "  \"max\": " + fixed6(otsu.max_value) + ",\n";
  out += "  \"bin\": " + std::to_string(otsu.bin) + ",\n";
  out += "  \"threshold\": " + fixed6(otsu.threshold) + ",\n";
  out += "  \"between_class_variance\": " + fixed6(otsu.between_class_variance) + ",\n";
  out += "  \"precision\": " + fixed6(score.precision) + ",\n";
  out += "  \"recall\": " + fixed6(score.recall) + ",\n";
  out += "  \"tp\": " + std::to_string(score.tp) + ", \"fp\": " + std::to_string(score.fp) +
         ", \"fn\": " + std::to_string(score.fn) + ", \"tn\": " + std::to_string(score.tn) + ",\n";
  out += "  \"histogram\": [";
  for (std::size_t b = 0; b < otsu.histogram.size(); ++b) {
    if (b > 0) out += ", ";
    out += std::to_string(otsu.histogram[b]);
  }
  out += "]\n}\n";
  return out;
}

}  // namespace unpad
