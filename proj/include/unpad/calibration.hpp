#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "unpad/detector.hpp"
#include "unpad/error.hpp"
#include "unpad/image.hpp"
#include "unpad/parallel.hpp"

namespace unpad {

/// Ground truth for one calibration image: true pad width per side, 0 when
/// that side is not padded.
struct LabeledSample {
  std::string image_id;
  SideValues true_pad;

  void validate(int width, int height) const {
    for (Side side : kAllSides) {
      const int limit = (is_vertical(side) ? height : width) / 2;
      if (true_pad[side] < 0 || true_pad[side] > limit) {
        throw Error(ErrorCode::InvalidArgument,
                    image_id + ": true pad " + std::to_string(true_pad[side]) + " on " +
                        std::string(to_string(side)) + " outside [0, " + std::to_string(limit) +
                        "]");
      }
    }
  }

  bool any_padded() const noexcept {
    for (int v : true_pad.values) {
      if (v > 0) return true;
    }
    return false;
  }
};

struct LabeledImage {
  ImageBuffer image;
  LabeledSample label;
};

/// Threshold-independent outcome of the scan on one side of one image.
struct MseRecord {
  std::string image_id;
  Side side = Side::Top;
  double min_mse = 0.0;
  int line = 0;  // argmin line, whatever the verdict
  int true_pad = 0;
};

struct SampleFailure {
  std::string image_id;
  std::string message;
};

struct CollectResult {
  std::vector<MseRecord> records;
  std::vector<SampleFailure> failures;
};

/// Scans all four sides of every sample. Samples that fail (bad labels,
/// images too small for the offset) are skipped and reported; records keep
/// sample order, then side order.
template <typename Sample>
concept LabeledImageLike = requires(const Sample& s) {
  { s.image } -> std::convertible_to<const ImageBuffer&>;
  { s.label } -> std::convertible_to<const LabeledSample&>;
};

template <LabeledImageLike Sample>
CollectResult collect_min_mses(std::span<const Sample> samples, const DetectionParams& params,
                               int jobs = 1) {
  params.validate();
  struct Slot {
    std::array<MseRecord, 4> records;
    std::string error;
  };
  std::vector<Slot> slots(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t i) {
    const auto& sample = samples[i];
    try {
      sample.label.validate(sample.image.width(), sample.image.height());
      for (Side side : kAllSides) {
        const MseEntry best = scan_side(sample.image, side, params).minimum();
        slots[i].records[side_index(side)] = {sample.label.image_id, side, best.mse, best.line,
                                              sample.label.true_pad[side]};
      }
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });

  CollectResult result;
  result.records.reserve(samples.size() * 4);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!slots[i].error.empty()) {
      result.failures.push_back({samples[i].label.image_id, slots[i].error});
      continue;
    }
    for (auto& r : slots[i].records) result.records.push_back(std::move(r));
  }
  return result;
}

enum class Outcome { TruePositive, FalsePositive, FalseNegative, TrueNegative };

/// A padded side counts as found only if its argmin line lies within
/// `tolerance` pixels of the true pad; a flagged side at the wrong line is a
/// false positive.
inline Outcome classify_record(const MseRecord& record, double threshold, int tolerance = 1) {
  const bool flagged = record.min_mse <= threshold;
  if (record.true_pad > 0) {
    if (!flagged) return Outcome::FalseNegative;
    return std::abs(record.line - record.true_pad) <= tolerance ? Outcome::TruePositive
                                                                : Outcome::FalsePositive;
  }
  return flagged ? Outcome::FalsePositive : Outcome::TrueNegative;
}

struct SweepPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  double f1() const noexcept {
    const double s = precision + recall;
    return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
  }
};

/// Confusion counts and precision/recall at one threshold. Undefined ratios
/// (no flagged sides, or no padded sides) are reported as 0.
inline SweepPoint evaluate_threshold(std::span<const MseRecord> records, double threshold,
                                     int tolerance = 1) {
  SweepPoint p;
  p.threshold = threshold;
  for (const auto& r : records) {
    switch (classify_record(r, threshold, tolerance)) {
      case Outcome::TruePositive: ++p.tp; break;
      case Outcome::FalsePositive: ++p.fp; break;
      case Outcome::FalseNegative: ++p.fn; break;
      case Outcome::TrueNegative: ++p.tn; break;
    }
  }
  if (p.tp + p.fp > 0) p.precision = static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fp);
  if (p.tp + p.fn > 0) p.recall = static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fn);
  return p;
}

struct SweepConfig {
  double start = 70.0;
  double end = 180.0;
  double step = 5.0;
  int tolerance = 1;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::size_t selected_index = 0;

  const SweepPoint& selected() const { return points.at(selected_index); }
  double selected_threshold() const { return selected().threshold; }
};

/// Thresholds start, start+step, ... up to end inclusive.
inline std::vector<double> sweep_grid(const SweepConfig& config) {
  if (!(config.step > 0.0) || !(config.start <= config.end) || !std::isfinite(config.end)) {
    throw Error(ErrorCode::InvalidArgument, "sweep needs start <= end and step > 0");
  }
  if (config.tolerance < 0) {
    throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((config.end - config.start) / config.step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = config.start + static_cast<double>(k) * config.step;
  }
  return grid;
}

/// Evaluates every threshold of the grid and selects the one with the best
/// F1 score; ties go to the smaller threshold.
inline SweepResult sweep_thresholds(std::span<const MseRecord> records,
                                    const SweepConfig& config = {}) {
  const auto grid = sweep_grid(config);
  if (records.empty()) {
    throw Error(ErrorCode::EmptyRecordSet, "no records to sweep");
  }
  SweepResult result;
  result.points.reserve(grid.size());
  double best_f1 = -1.0;
  for (double tau : grid) {
    result.points.push_back(evaluate_threshold(records, tau, config.tolerance));
    const double f1 = result.points.back().f1();
    if (f1 > best_f1) {
      best_f1 = f1;
      result.selected_index = result.points.size() - 1;
    }
  }
  return result;
}

inline std::string format_sweep_csv(std::span<const SweepPoint> points) {
  std::string out = "threshold,precision,recall,tp,fp,fn\n";
  char buf[160];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%zu,%zu,%zu\n", p.threshold, p.precision,
                  p.recall, p.tp, p.fp, p.fn);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Otsu on min-max normalized MSEs.

inline constexpr int kOtsuBins = 256;

struct OtsuResult {
  double threshold = 0.0;  // in MSE units, at the upper edge of bin t*
  int bin = 0;             // split bin t*: classes are bins <= t* and bins > t*
  double min_value = 0.0;
  double max_value = 0.0;
  double between_class_variance = 0.0;  // in squared bin units
  std::array<std::size_t, kOtsuBins> histogram{};
};

/// Bin of a value after min-max scaling to [0, 255], rounded to nearest.
inline int otsu_bin(double value, double lo, double hi) {
  const double scaled = (value - lo) / (hi - lo) * 255.0;
  return static_cast<int>(std::clamp<long>(std::lround(scaled), 0, kOtsuBins - 1));
}

inline OtsuResult otsu_threshold(std::span<const double> values) {
  using boost::multiprecision::int256_t;
  if (values.size() < 2) {
    throw Error(ErrorCode::DegenerateDistribution, "need at least two values");
  }
  OtsuResult result;
  result.min_value = std::numeric_limits<double>::infinity();
  result.max_value = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "MSE values must be finite and >= 0");
    }
    result.min_value = std::min(result.min_value, v);
    result.max_value = std::max(result.max_value, v);
  }
  if (!(result.max_value > result.min_value)) {
    throw Error(ErrorCode::DegenerateDistribution, "all values are equal");
  }
  for (double v : values) ++result.histogram[otsu_bin(v, result.min_value, result.max_value)];

  // sigma_B^2(t) = D^2 / (N^2 n1 n2) with D = S1*N - S*n1, where n1 and S1
  // are the count and bin sum of the lower class. Candidates are compared
  // exactly by cross-multiplying D^2 and n1*n2.
  const auto total = static_cast<std::int64_t>(values.size());
  std::int64_t total_sum = 0;
  for (int b = 0; b < kOtsuBins; ++b) total_sum += b * static_cast<std::int64_t>(result.histogram[b]);

  int256_t best_num = 0;
  int256_t best_den = 1;
  int best_bin = -1;
  std::int64_t n1 = 0;
  std::int64_t s1 = 0;
  for (int t = 0; t < kOtsuBins; ++t) {
    n1 += static_cast<std::int64_t>(result.histogram[t]);
    s1 += t * static_cast<std::int64_t>(result.histogram[t]);
    const std::int64_t n2 = total - n1;
    if (n1 == 0 || n2 == 0) continue;
    const int256_t d = int256_t(s1) * total - int256_t(total_sum) * n1;
    const int256_t num = d * d;
    const int256_t den = int256_t(n1) * n2;
    if (num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best_bin = t;
    }
  }
  if (best_bin < 0 || best_num == 0) {
    throw Error(ErrorCode::DegenerateDistribution, "between-class variance is zero everywhere");
  }
  result.bin = best_bin;
  result.between_class_variance =
      static_cast<double>(best_num) /
      (static_cast<double>(best_den) * static_cast<double>(total) * static_cast<double>(total));
  // Upper edge of bin t*: exactly the values that round into bins <= t*
  // satisfy value <= threshold (up to the half-way tie).
  result.threshold =
      result.min_value + ((best_bin + 0.5) / 255.0) * (result.max_value - result.min_value);
  return result;
}

template <LabeledImageLike Sample>
CollectResult collect_min_mses(const std::vector<Sample>& samples, const DetectionParams& params,
                               int jobs = 1) {
  return collect_min_mses(std::span<const Sample>(samples), params, jobs);
}

inline std::vector<double> min_mses(std::span<const MseRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.min_mse);
  return out;
}

}  // namespace unpad
