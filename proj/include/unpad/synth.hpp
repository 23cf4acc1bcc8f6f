#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "unpad/calibration.hpp"
#include "unpad/error.hpp"
#include "unpad/image.hpp"
#include "unpad/parallel.hpp"

namespace unpad {

/// Edge-inclusive reflection padding: the outermost padded row on the top
/// copies source row P-1 and the row just above the original copies row 0.
/// Top and bottom are padded first, then left and right on the result, so
/// corners hold reflections of reflections.
inline ImageBuffer apply_mirror_padding(const ImageBuffer& image, const SideValues& pads) {
  for (Side side : kAllSides) {
    if (pads[side] < 0 || pads[side] > perpendicular_extent(image, side)) {
      throw Error(ErrorCode::PadTooLarge, "pad " + std::to_string(pads[side]) + " on " +
                                              std::string(to_string(side)) +
                                              " exceeds the source dimension");
    }
  }
  const int top = pads[Side::Top];
  const int bottom = pads[Side::Bottom];
  const int left = pads[Side::Left];
  const int right = pads[Side::Right];

  ImageBuffer tall(image.width(), image.height() + top + bottom, image.channels());
  for (int y = 0; y < tall.height(); ++y) {
    int src = y - top;
    if (src < 0) src = -src - 1;
    if (src >= image.height()) src = 2 * image.height() - 1 - src;
    std::ranges::copy(image.row(src), tall.row(y).begin());
  }
  if (left == 0 && right == 0) return tall;

  ImageBuffer out(image.width() + left + right, tall.height(), image.channels());
  const int ch = image.channels();
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      int src = x - left;
      if (src < 0) src = -src - 1;
      if (src >= image.width()) src = 2 * image.width() - 1 - src;
      for (int c = 0; c < ch; ++c) out.at(x, y, c) = tall.at(src, y, c);
    }
  }
  return out;
}

/// Adds N(0, sigma^2) to every sample, rounds to nearest and clamps.
inline ImageBuffer add_gaussian_noise(const ImageBuffer& image, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  }
  ImageBuffer out = image;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& s : out.data()) {
    const double v = std::nearbyint(static_cast<double>(s) + noise(rng));
    s = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return out;
}

/// Snaps every sample to the nearest multiple of `step` (halves round up),
/// clamped to 255.
inline ImageBuffer quantize_noise(const ImageBuffer& image, int step) {
  if (step < 1) {
    throw Error(ErrorCode::InvalidArgument, "quantization step must be >= 1");
  }
  ImageBuffer out = image;
  if (step == 1) return out;
  for (auto& s : out.data()) {
    const int q = (s + step / 2) / step * step;
    s = static_cast<std::uint8_t>(std::min(q, 255));
  }
  return out;
}

enum class PadStyle { Mirror, Zero };

struct CorpusSpec {
  int size_min = 64;  // source content size, per dimension
  int size_max = 256;
  int channels = 3;
  double pad_prob = 0.5;
  // Pad widths per padded side. In pixels by default; when pad_relative is
  // set they are fractions of the source dimension, floored at pad_floor px.
  double pad_min = 10;
  double pad_max = 40;
  bool pad_relative = false;
  int pad_floor = 1;
  PadStyle pad_style = PadStyle::Mirror;
  // Noise after padding: sigma, or per-image uniform in [sigma, sigma_max].
  double sigma = 0.0;
  std::optional<double> sigma_max;
  int quant_step = 1;
  // Per-image amplitude range of the i.i.d. texture (uniform in +-amplitude).
  double texture_min = 24.0;
  double texture_max = 48.0;
  // Height range of a near-constant band at the top of the source content;
  // 0 disables it.
  int flat_rows_min = 0;
  int flat_rows_max = 0;
  int max_boxes = 3;

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
    if (size_min < 2 || size_max < size_min) fail("size range must satisfy 2 <= min <= max");
    if (channels != 1 && channels != 3 && channels != 4) fail("channels must be 1, 3 or 4");
    if (!(pad_prob >= 0.0 && pad_prob <= 1.0)) fail("pad probability must be in [0, 1]");
    if (!(pad_min >= 0.0) || !(pad_max >= pad_min)) fail("pad range must satisfy 0 <= min <= max");
    if (pad_relative) {
      if (pad_max > 1.0) fail("relative pad range must be within [0, 1]");
      if (pad_floor < 1 || pad_floor > size_min) fail("pad floor must be in [1, size_min]");
    } else if (pad_min < 1.0 || pad_max > size_min) {
      fail("pixel pad range must lie within [1, size_min]");
    }
    if (!(sigma >= 0.0) || (sigma_max && !(*sigma_max >= sigma))) fail("invalid sigma range");
    if (quant_step < 1) fail("quantization step must be >= 1");
    if (!(texture_min >= 0.0) || !(texture_max >= texture_min)) fail("invalid texture range");
    if (flat_rows_min < 0 || flat_rows_max < flat_rows_min || flat_rows_max > size_min) {
      fail("invalid flat border range");
    }
    if (max_boxes < 0) fail("max boxes must be >= 0");
  }
};

struct SyntheticSample {
  ImageBuffer image;     // padded (if any) and noised
  LabeledSample label;   // true pad per side
  ImageBuffer original;  // source content before padding and noise
  AnnotationSet boxes;   // objects on the source content, normalized to `image`
  double sigma = 0.0;
};

namespace detail {

/// Non-degenerate random content: base colour, a linear gradient, a low
/// frequency wave and i.i.d. uniform texture.
inline ImageBuffer random_content(int width, int height, int channels, double texture,
                                  int flat_rows, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> base(channels), gx(channels), gy(channels), wave(channels);
  for (int c = 0; c < channels; ++c) {
    base[c] = 60.0 + 135.0 * unit(rng);
    gx[c] = (unit(rng) - 0.5) * 80.0;
    gy[c] = (unit(rng) - 0.5) * 80.0;
    wave[c] = 25.0 * unit(rng);
  }
  const double fx = 1.0 + 2.0 * unit(rng);
  const double fy = 1.0 + 2.0 * unit(rng);
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  const double flat_level = 60.0 + 135.0 * unit(rng);
  std::uniform_real_distribution<double> grain(-texture, texture);

  ImageBuffer out(width, height, channels);
  for (int y = 0; y < height; ++y) {
    const double v = static_cast<double>(y) / height;
    for (int x = 0; x < width; ++x) {
      const double u = static_cast<double>(x) / width;
      const double w = std::sin(2.0 * std::numbers::pi * (fx * u + fy * v) + phase);
      for (int c = 0; c < channels; ++c) {
        double value;
        if (y < flat_rows) {
          // sky-like band: a faint horizontal ramp, no texture
          value = flat_level + 4.0 * u;
        } else {
          value = base[c] + gx[c] * (u - 0.5) + gy[c] * (v - 0.5) + wave[c] * w + grain(rng);
        }
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::nearbyint(value), 0.0, 255.0));
      }
    }
  }
  return out;
}

inline int draw_pad(const CorpusSpec& spec, int extent, std::mt19937_64& rng) {
  if (spec.pad_relative) {
    std::uniform_real_distribution<double> frac(spec.pad_min, spec.pad_max);
    const int px = static_cast<int>(std::lround(frac(rng) * extent));
    return std::clamp(px, spec.pad_floor, extent);
  }
  std::uniform_int_distribution<int> px(static_cast<int>(std::ceil(spec.pad_min)),
                                        static_cast<int>(std::floor(spec.pad_max)));
  return std::min(px(rng), extent);
}

inline ImageBuffer zero_padding(const ImageBuffer& image, const SideValues& pads) {
  ImageBuffer out(image.width() + pads[Side::Left] + pads[Side::Right],
                  image.height() + pads[Side::Top] + pads[Side::Bottom], image.channels());
  const auto ch = static_cast<std::size_t>(image.channels());
  for (int y = 0; y < image.height(); ++y) {
    std::ranges::copy(image.row(y), out.row(y + pads[Side::Top]).begin() +
                                         static_cast<std::ptrdiff_t>(pads[Side::Left] * ch));
  }
  return out;
}

inline std::string sample_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img_%05zu", index);
  return buf;
}

}  // namespace detail

/// One corpus sample, fully determined by (seed, index).
inline SyntheticSample generate_sample(const CorpusSpec& spec, std::uint64_t seed,
                                       std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> size(spec.size_min, spec.size_max);

  SyntheticSample s;
  const int width = size(rng);
  const int height = size(rng);
  const double texture = spec.texture_min + (spec.texture_max - spec.texture_min) * unit(rng);
  const int flat_rows =
      spec.flat_rows_max > 0
          ? std::uniform_int_distribution<int>(spec.flat_rows_min, spec.flat_rows_max)(rng)
          : 0;
  s.original = detail::random_content(width, height, spec.channels, texture,
                                      std::min(flat_rows, height), rng);

  SideValues pads;
  if (unit(rng) < spec.pad_prob) {
    if (unit(rng) < 0.5) {
      pads[Side::Top] = detail::draw_pad(spec, height, rng);
      pads[Side::Bottom] = detail::draw_pad(spec, height, rng);
    } else {
      pads[Side::Left] = detail::draw_pad(spec, width, rng);
      pads[Side::Right] = detail::draw_pad(spec, width, rng);
    }
  }
  ImageBuffer padded = spec.pad_style == PadStyle::Mirror ? apply_mirror_padding(s.original, pads)
                                                          : detail::zero_padding(s.original, pads);

  s.sigma = spec.sigma_max ? spec.sigma + (*spec.sigma_max - spec.sigma) * unit(rng) : spec.sigma;
  const std::uint64_t noise_seed = rng();
  s.image = quantize_noise(add_gaussian_noise(padded, s.sigma, noise_seed), spec.quant_step);
  s.label = {detail::sample_id(index), pads};

  // Boxes lie on the source content, expressed in the padded frame.
  const int box_count = std::uniform_int_distribution<int>(0, spec.max_boxes)(rng);
  for (int b = 0; b < box_count; ++b) {
    const double bw = std::max(1.0, width * (0.1 + 0.3 * unit(rng)));
    const double bh = std::max(1.0, height * (0.1 + 0.3 * unit(rng)));
    const double x0 = (width - bw) * unit(rng) + pads[Side::Left];
    const double y0 = (height - bh) * unit(rng) + pads[Side::Top];
    s.boxes.push_back({b % 2, (x0 + bw / 2) / s.image.width(), (y0 + bh / 2) / s.image.height(),
                       bw / s.image.width(), bh / s.image.height()});
  }
  return s;
}

inline std::vector<SyntheticSample> generate_labeled_corpus(std::size_t count,
                                                            const CorpusSpec& spec,
                                                            std::uint64_t seed, int jobs = 1) {
  spec.validate();
  std::vector<SyntheticSample> corpus(count);
  parallel_for(count, jobs, [&](std::size_t i) { corpus[i] = generate_sample(spec, seed, i); });
  return corpus;
}

}  // namespace unpad
