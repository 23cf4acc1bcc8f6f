// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scratch.hpp"
#include "unpad/commands.hpp"

namespace {

using namespace unpad;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

int jobs() { return default_jobs(); }

// ---------------------------------------------------------------------------

Verdict noiseless_exactness() {
  const auto start = std::chrono::steady_clock::now();
  CorpusSpec spec;
  spec.size_min = 64;
  spec.size_max = 512;
  spec.pad_relative = true;
  spec.pad_min = 0.10;
  spec.pad_max = 0.40;
  spec.pad_floor = 10;  // lines below the scan offset cannot be found
  spec.max_boxes = 0;
  const auto corpus = generate_labeled_corpus(500, spec, 101, jobs());
  const CollectResult c = collect_min_mses(corpus, {}, jobs());
  std::size_t padded = 0, exact = 0, unpadded = 0, flagged = 0;
  for (const auto& r : c.records) {
    if (r.true_pad > 0) {
      ++padded;
      exact += (r.line == r.true_pad && r.min_mse == 0.0) ? 1 : 0;
    } else {
      ++unpadded;
      flagged += r.min_mse <= 110.0 ? 1 : 0;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {c.failures.empty() && exact == padded && flagged == 0 && secs < 60.0,
          fmt("500 images, %zu/%zu padded sides exact with mse 0, %zu/%zu unpadded flagged, "
              "%zu failures, %.1fs",
              exact, padded, flagged, unpadded, c.failures.size(), secs)};
}

CorpusSpec noisy_spec(double sigma) {
  CorpusSpec spec;
  spec.sigma = sigma;
  spec.max_boxes = 0;
  return spec;
}

Verdict noise_robustness() {
  // sigma 2: calibrate on one corpus, measure line recovery on another.
  const auto calib2 = generate_labeled_corpus(400, noisy_spec(2.0), 201, jobs());
  const double tau2 = sweep_thresholds(collect_min_mses(calib2, {}, jobs()).records).selected_threshold();
  const auto held2 = generate_labeled_corpus(400, noisy_spec(2.0), 202, jobs());
  const auto rec2 = collect_min_mses(held2, {}, jobs()).records;
  std::size_t padded = 0, found = 0;
  for (const auto& r : rec2) {
    if (r.true_pad == 0) continue;
    ++padded;
    found += classify_record(r, tau2) == Outcome::TruePositive ? 1 : 0;
  }
  const double rate = padded ? static_cast<double>(found) / padded : 0.0;

  // sigma 4: precision of the sweep-selected threshold on held-out data.
  const auto calib4 = generate_labeled_corpus(400, noisy_spec(4.0), 401, jobs());
  const double tau4 = sweep_thresholds(collect_min_mses(calib4, {}, jobs()).records).selected_threshold();
  const auto held4 = generate_labeled_corpus(400, noisy_spec(4.0), 402, jobs());
  const SweepPoint p4 = evaluate_threshold(collect_min_mses(held4, {}, jobs()).records, tau4);

  return {rate >= 0.95 && p4.precision >= 0.95,
          fmt("sigma 2: tau %.0f, %zu/%zu padded sides within 1px (%.4f >= 0.95); "
              "sigma 4: tau %.0f, held-out precision %.4f >= 0.95",
              tau2, found, padded, rate, tau4, p4.precision)};
}

std::string histogram(const std::vector<double>& values, double lo, double hi, int bins) {
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    const int b = std::clamp(static_cast<int>((v - lo) / (hi - lo) * bins), 0, bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  std::string out = "[";
  for (int i = 0; i < bins; ++i) out += (i ? " " : "") + std::to_string(counts[static_cast<std::size_t>(i)]);
  return out + "]";
}

Verdict offset_effect() {
  // Near-constant bands at the top of the source content; the smallest
  // allowed offset stands in for "no offset".
  CorpusSpec spec;
  spec.size_min = 64;
  spec.size_max = 160;
  spec.flat_rows_min = 4;
  spec.flat_rows_max = 9;
  spec.max_boxes = 0;

  struct Split {
    double max_padded = 0.0;
    double min_unpadded = 1e300;
    std::vector<double> padded, unpadded;
  };
  auto split = [&](double sigma, int offset) {
    spec.sigma = sigma;
    const auto corpus = generate_labeled_corpus(300, spec, 301, jobs());
    Split s;
    for (const auto& r : collect_min_mses(corpus, {offset, 110.0, {}}, jobs()).records) {
      if (r.side != Side::Top) continue;
      if (r.true_pad > 0) {
        s.max_padded = std::max(s.max_padded, r.min_mse);
        s.padded.push_back(r.min_mse);
      } else {
        s.min_unpadded = std::min(s.min_unpadded, r.min_mse);
        s.unpadded.push_back(r.min_mse);
      }
    }
    return s;
  };

  const Split near = split(1.0, 1);
  const bool overlap = near.min_unpadded < near.max_padded;
  bool separated = true;
  std::string far_detail;
  for (double sigma : {0.0, 1.0}) {
    const Split far = split(sigma, 10);
    separated = separated && far.min_unpadded > far.max_padded;
    far_detail += fmt("; offset 10 sigma %.0f: max padded %.2f < min unpadded %.2f", sigma,
                      far.max_padded, far.min_unpadded);
  }
  std::printf("  offset 1 top-side min-mse histogram [0,20) padded   %s\n",
              histogram(near.padded, 0, 20, 10).c_str());
  std::printf("  offset 1 top-side min-mse histogram [0,20) unpadded %s\n",
              histogram(near.unpadded, 0, 20, 10).c_str());
  return {overlap && separated,
          fmt("offset 1 sigma 1: min unpadded %.2f < max padded %.2f", near.min_unpadded,
              near.max_padded) +
              far_detail};
}

Verdict otsu_oracle() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> size(2, 512);
  std::uniform_int_distribution<int> shape(0, 3);
  std::size_t agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> values(static_cast<std::size_t>(size(rng)));
    switch (shape(rng)) {
      case 0: {
        std::uniform_real_distribution<double> d(0.0, 20000.0);
        for (auto& v : values) v = d(rng);
        break;
      }
      case 1: {
        std::lognormal_distribution<double> d(5.0, 1.5);
        for (auto& v : values) v = d(rng);
        break;
      }
      case 2: {  // two clusters with exact zeros
        std::normal_distribution<double> d(300.0, 40.0);
        for (auto& v : values) v = rng() % 2 ? 0.0 : std::abs(d(rng));
        break;
      }
      default: {  // integer values, many ties
        std::uniform_int_distribution<int> d(0, 30);
        for (auto& v : values) v = d(rng);
        break;
      }
    }
    if (std::ranges::min(values) == std::ranges::max(values)) values[0] += 1.0;
    agree += otsu_threshold(values).bin == oracle::otsu_bin(values) ? 1 : 0;
  }
  return {agree == 1000, fmt("%zu/1000 random sets match the exhaustive rational maximization", agree)};
}

Verdict sweep_vs_otsu() {
  // Mostly clean pads plus a noisy minority, unpadded sides spread over
  // roughly 150..600.
  CorpusSpec spec;
  spec.size_min = 160;
  spec.size_max = 256;
  spec.pad_prob = 1.0;
  spec.texture_min = 15.0;
  spec.texture_max = 18.0;
  spec.max_boxes = 0;
  std::vector<MseRecord> records;
  for (int part = 0; part < 2; ++part) {
    spec.sigma = part ? 8.5 : 0.0;
    spec.sigma_max = part ? 9.0 : 0.0;
    const auto corpus = generate_labeled_corpus(part ? 100 : 400, spec, 501 + part, jobs());
    const auto rec = collect_min_mses(corpus, {}, jobs()).records;
    records.insert(records.end(), rec.begin(), rec.end());
  }
  double lo = 1e300, hi = 0.0;
  for (const auto& r : records) {
    if (r.true_pad == 0) {
      lo = std::min(lo, r.min_mse);
      hi = std::max(hi, r.min_mse);
    }
  }
  const SweepPoint sweep = sweep_thresholds(records).selected();
  const OtsuResult otsu = otsu_threshold(min_mses(records));
  const SweepPoint at_otsu = evaluate_threshold(records, otsu.threshold);
  const bool comparable = std::abs(sweep.precision - at_otsu.precision) <= 0.05;
  return {sweep.recall > at_otsu.recall && comparable,
          fmt("unpadded min-mse %.0f..%.0f; sweep tau %.0f P %.4f R %.4f; otsu tau %.2f P %.4f "
              "R %.4f; |dP| <= 0.05",
              lo, hi, sweep.threshold, sweep.precision, sweep.recall, otsu.threshold,
              at_otsu.precision, at_otsu.recall)};
}

Verdict crop_integrity() {
  CorpusSpec spec;
  spec.size_min = 64;
  spec.size_max = 256;
  spec.pad_prob = 0.7;
  spec.max_boxes = 5;
  const auto corpus = generate_labeled_corpus(400, spec, 601, jobs());
  std::size_t exact = 0, boxes = 0, good_boxes = 0;
  for (const auto& s : corpus) {
    const UnpadReport r = detect_all_sides(s.image, {});
    const ImageBuffer cropped = crop_image(s.image, r.crop);
    exact += cropped == s.original ? 1 : 0;
    const AnnotationSet out = transform_annotations(s.boxes, s.image.width(), s.image.height(), r.crop);
    boxes += s.boxes.size();
    if (out.size() != s.boxes.size()) continue;
    for (std::size_t i = 0; i < out.size(); ++i) {
      // Boxes lie on the source content, so their pixel geometry is unchanged.
      const auto& a = s.boxes[i];
      const auto& b = out[i];
      const double W = s.image.width(), H = s.image.height();
      const double w = cropped.width(), h = cropped.height();
      const bool same = std::abs(b.cx * w - (a.cx * W - r.crop.left)) < 1e-6 &&
                        std::abs(b.cy * h - (a.cy * H - r.crop.top)) < 1e-6 &&
                        std::abs(b.w * w - a.w * W) < 1e-6 && std::abs(b.h * h - a.h * H) < 1e-6;
      good_boxes += b.is_normalized() && same ? 1 : 0;
    }
  }
  return {exact == corpus.size() && good_boxes == boxes,
          fmt("%zu/%zu crops bit-exact; %zu/%zu boxes normalized with pixel geometry kept", exact,
              corpus.size(), good_boxes, boxes)};
}

std::vector<std::string> snapshot(const fs::path& dir) {
  std::vector<std::string> out;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir));
  }
  std::ranges::sort(files);
  for (const auto& f : files) out.push_back(f.generic_string() + "\n" + read_text_file(dir / f));
  return out;
}

Verdict determinism() {
  const test::ScratchDir scratch("acceptance_det");
  std::vector<std::vector<std::string>> corpora;
  std::vector<std::string> reports;
  const int worker_counts[] = {1, 3};
  for (int run = 0; run < 2; ++run) {
    const fs::path base = scratch.path() / ("run" + std::to_string(run));
    SynthOptions synth;
    synth.count = 40;
    synth.seed = 7;
    synth.spec.sigma = 2.0;
    synth.jobs = worker_counts[run];
    std::ostringstream sink;
    run_synth(base / "corpus", synth, sink);
    corpora.push_back(snapshot(base / "corpus"));

    DetectOptions detect;
    detect.jobs = worker_counts[run];
    std::ostringstream report, err;
    // Relative paths keep the report independent of the run directory.
    const fs::path cwd = fs::current_path();
    fs::current_path(base);
    run_detect("corpus", detect, report, err);
    fs::current_path(cwd);
    reports.push_back(report.str());
  }
  const bool same_corpus = corpora[0] == corpora[1];
  const bool same_report = reports[0] == reports[1];
  return {same_corpus && same_report && !corpora[0].empty(),
          fmt("synth %zu files identical: %s; detect report (%zu bytes) identical: %s",
              corpora[0].size(), same_corpus ? "yes" : "no", reports[0].size(),
              same_report ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"noiseless exactness", noiseless_exactness},
      {"noise robustness", noise_robustness},
      {"offset effect", offset_effect},
      {"otsu oracle equivalence", otsu_oracle},
      {"sweep recall above otsu", sweep_vs_otsu},
      {"crop and annotation integrity", crop_integrity},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v{false, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
