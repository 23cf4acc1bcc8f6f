#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "unpad/calibration.hpp"
#include "unpad/detector.hpp"
#include "unpad/synth.hpp"
#include "unpad/unpadder.hpp"

namespace unpad {
namespace {

SideValues top_pad(int p) {
  SideValues v;
  v[Side::Top] = p;
  return v;
}

ImageBuffer source(std::size_t index, int size_min = 48, int size_max = 96) {
  CorpusSpec spec;
  spec.pad_prob = 0.0;
  spec.size_min = size_min;
  spec.size_max = size_max;
  return generate_sample(spec, 17, index).original;
}

TEST(MirrorPadding, ZeroPadsIsIdentity) {
  std::mt19937_64 rng(1);
  const ImageBuffer img = oracle::random_image(7, 5, 3, rng);
  EXPECT_EQ(apply_mirror_padding(img, {}), img);
}

TEST(MirrorPadding, EdgeInclusiveColumn) {
  const ImageBuffer col(1, 3, 1, {1, 2, 3});  // a, b, c
  EXPECT_EQ(apply_mirror_padding(col, top_pad(2)), ImageBuffer(1, 5, 1, {2, 1, 1, 2, 3}));
}

TEST(MirrorPadding, AllSidesAgainstExplicitReflection) {
  std::mt19937_64 rng(2);
  const ImageBuffer img = oracle::random_image(5, 4, 3, rng);
  SideValues pads;
  pads[Side::Top] = 3;
  pads[Side::Bottom] = 4;
  pads[Side::Left] = 2;
  pads[Side::Right] = 5;
  const ImageBuffer out = apply_mirror_padding(img, pads);
  ASSERT_EQ(out.width(), 5 + 2 + 5);
  ASSERT_EQ(out.height(), 4 + 3 + 4);
  auto reflect = [](int i, int n) { return i < 0 ? -i - 1 : (i >= n ? 2 * n - 1 - i : i); };
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        ASSERT_EQ(out.at(x, y, c), img.at(reflect(x - 2, 5), reflect(y - 3, 4), c));
      }
    }
  }
}

TEST(MirrorPadding, PadTooLarge) {
  const ImageBuffer img(5, 4, 1);
  try {
    (void)apply_mirror_padding(img, top_pad(5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PadTooLarge);
  }
  EXPECT_NO_THROW((void)apply_mirror_padding(img, top_pad(4)));
}

TEST(MirrorPadding, CropRecoversOriginal) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pad(0, 12);
  for (int trial = 0; trial < 50; ++trial) {
    const ImageBuffer img = oracle::random_image(13, 12, 1 + 2 * (trial % 2), rng);
    SideValues pads;
    for (Side s : kAllSides) pads[s] = pad(rng);
    const ImageBuffer padded = apply_mirror_padding(img, pads);
    const CropRect rect{pads[Side::Left], pads[Side::Top], img.width(), img.height()};
    ASSERT_EQ(crop_image(padded, rect), img);
  }
}

TEST(MirrorPadding, DetectorClosure) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const ImageBuffer img = source(static_cast<std::size_t>(trial));
    const int p = std::uniform_int_distribution<int>(10, 40)(rng);
    const ImageBuffer padded = apply_mirror_padding(img, top_pad(p));
    const int offset = std::uniform_int_distribution<int>(1, 10)(rng);
    const double tau = trial % 2 ? 0.0 : 500.0;
    const SideReport r = detect_side(padded, Side::Top, {offset, tau, {}});
    ASSERT_EQ(r.line, p) << "offset " << offset;
    ASSERT_EQ(r.min_mse, 0.0);
  }
}

TEST(GaussianNoise, ZeroSigmaAndDeterminism) {
  const ImageBuffer img = source(0);
  EXPECT_EQ(add_gaussian_noise(img, 0.0, 9), img);
  EXPECT_EQ(add_gaussian_noise(img, 3.0, 9), add_gaussian_noise(img, 3.0, 9));
  EXPECT_NE(add_gaussian_noise(img, 3.0, 9), add_gaussian_noise(img, 3.0, 10));
  EXPECT_THROW((void)add_gaussian_noise(img, -1.0, 0), Error);
}

TEST(GaussianNoise, MirroredPairMseIsTwoSigmaSquared) {
  // Mid-grey content keeps clamping out of play; expected MSE = 2 sigma^2.
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> grey(60, 190);
  ImageBuffer base(32, 8, 1);
  for (auto& s : base.data()) s = static_cast<std::uint8_t>(grey(rng));
  const ImageBuffer mirrored = apply_mirror_padding(crop_image(base, {0, 0, 32, 4}), top_pad(4));
  ASSERT_EQ(segment_mse(mirrored, 4), 0.0);
  double total = 0.0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    total += segment_mse(add_gaussian_noise(mirrored, 2.0, trial), 4);
  }
  const double mean = total / 1000.0;
  // Rounding adds 2/12 of a unit^2 on top of 2 sigma^2 = 8.
  EXPECT_NEAR(mean, 8.0, 8.0 * 0.15);
}

TEST(Quantize, Arithmetic) {
  const ImageBuffer img(4, 1, 1, {13, 12, 3, 254});
  EXPECT_EQ(quantize_noise(img, 1), img);
  EXPECT_EQ(quantize_noise(img, 8), ImageBuffer(4, 1, 1, {16, 16, 0, 255}));
  EXPECT_THROW((void)quantize_noise(img, 0), Error);
}

TEST(Quantize, MinimumStaysAtTrueLine) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = std::uniform_int_distribution<int>(10, 40)(rng);
    const int step = std::uniform_int_distribution<int>(2, 16)(rng);
    const ImageBuffer padded = quantize_noise(
        apply_mirror_padding(source(50 + static_cast<std::size_t>(trial)), top_pad(p)), step);
    EXPECT_EQ(scan_side(padded, Side::Top, {}).minimum().line, p) << "step " << step;
  }
}

TEST(Corpus, BalanceMatchesPadProbability) {
  CorpusSpec spec;
  spec.size_min = 48;
  spec.size_max = 64;
  spec.max_boxes = 0;
  const auto corpus = generate_labeled_corpus(400, spec, 7, 4);
  std::size_t padded = 0;
  for (const auto& s : corpus) padded += s.label.any_padded() ? 1 : 0;
  // Binomial(400, 0.5): +-30 is about three standard deviations.
  EXPECT_GT(padded, 170u);
  EXPECT_LT(padded, 230u);
}

TEST(Corpus, PadPatternsAndLabels) {
  CorpusSpec spec;
  spec.size_min = 64;
  spec.size_max = 128;
  const auto corpus = generate_labeled_corpus(100, spec, 8);
  for (const auto& s : corpus) {
    const auto& p = s.label.true_pad;
    const bool vertical = p[Side::Top] > 0 || p[Side::Bottom] > 0;
    const bool horizontal = p[Side::Left] > 0 || p[Side::Right] > 0;
    EXPECT_FALSE(vertical && horizontal);
    if (vertical) {
      EXPECT_TRUE(p[Side::Top] > 0 && p[Side::Bottom] > 0);
    }
    if (horizontal) {
      EXPECT_TRUE(p[Side::Left] > 0 && p[Side::Right] > 0);
    }
    for (int v : p.values) {
      if (v > 0) {
        EXPECT_GE(v, 10);
        EXPECT_LE(v, 40);
      }
    }
    EXPECT_NO_THROW(s.label.validate(s.image.width(), s.image.height()));
    EXPECT_EQ(s.image.width(), s.original.width() + p[Side::Left] + p[Side::Right]);
    for (const auto& box : s.boxes) EXPECT_TRUE(box.is_normalized());
  }
}

TEST(Corpus, DeterministicPerSeedAndIndependentOfJobs) {
  CorpusSpec spec;
  spec.sigma = 2.0;
  spec.size_max = 96;
  const auto a = generate_labeled_corpus(20, spec, 42, 1);
  const auto b = generate_labeled_corpus(20, spec, 42, 4);
  const auto c = generate_labeled_corpus(20, spec, 43, 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].image, b[i].image);
    EXPECT_EQ(a[i].label.true_pad, b[i].label.true_pad);
    EXPECT_EQ(a[i].boxes, b[i].boxes);
  }
  EXPECT_NE(a[0].image, c[0].image);
}

TEST(Corpus, RelativePadsRespectFloor) {
  CorpusSpec spec;
  spec.size_min = 64;
  spec.size_max = 200;
  spec.pad_prob = 1.0;
  spec.pad_relative = true;
  spec.pad_min = 0.1;
  spec.pad_max = 0.4;
  spec.pad_floor = 10;
  for (const auto& s : generate_labeled_corpus(50, spec, 9)) {
    for (Side side : kAllSides) {
      const int v = s.label.true_pad[side];
      if (v == 0) continue;
      const int extent = perpendicular_extent(s.original, side);
      EXPECT_GE(v, 10);
      EXPECT_LE(v, std::max(10, static_cast<int>(std::lround(0.4 * extent))));
    }
  }
}

TEST(Corpus, InvalidSpecs) {
  CorpusSpec spec;
  spec.size_min = 64;
  spec.pad_max = 100;  // larger than the smallest image
  EXPECT_THROW(spec.validate(), Error);
  spec = {};
  spec.pad_prob = 1.5;
  EXPECT_THROW(spec.validate(), Error);
  spec = {};
  spec.size_max = 10;
  EXPECT_THROW(spec.validate(), Error);
}

TEST(Corpus, MedianMinMseGrowsWithNoise) {
  CorpusSpec spec;
  spec.size_min = 64;
  spec.size_max = 96;
  spec.pad_prob = 1.0;
  spec.max_boxes = 0;
  double previous = -1.0;
  for (double sigma : {0.0, 1.0, 2.0, 4.0}) {
    spec.sigma = sigma;
    const auto corpus = generate_labeled_corpus(30, spec, 10);
    std::vector<double> padded;
    for (const auto& r : collect_min_mses(corpus, {}).records) {
      if (r.true_pad > 0) padded.push_back(r.min_mse);
    }
    std::ranges::nth_element(padded, padded.begin() + static_cast<long>(padded.size() / 2));
    const double median = padded[padded.size() / 2];
    EXPECT_GE(median, previous) << "sigma " << sigma;
    previous = median;
  }
}

}  // namespace
}  // namespace unpad
