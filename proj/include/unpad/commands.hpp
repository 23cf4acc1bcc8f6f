#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "unpad/calibration.hpp"
#include "unpad/detector.hpp"
#include "unpad/io.hpp"
#include "unpad/parallel.hpp"
#include "unpad/report.hpp"
#include "unpad/synth.hpp"
#include "unpad/unpadder.hpp"

namespace unpad {

/// Process exit codes of the batch commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;  // batch finished, some inputs failed

struct DetectOptions {
  DetectionParams params;
  int jobs = default_jobs();
  std::optional<fs::path> report;
  bool emit_profiles = false;
};

struct UnpadOptions : DetectOptions {
  std::optional<fs::path> annotations;
  double min_visibility = 0.0;
};

enum class CalibrationMethod { Sweep, Otsu };

struct CalibrateOptions {
  DetectionParams params;
  int jobs = default_jobs();
  CalibrationMethod method = CalibrationMethod::Sweep;
  SweepConfig sweep;
  std::optional<fs::path> report;
};

struct SynthOptions {
  std::size_t count = 400;
  CorpusSpec spec;
  std::uint64_t seed = 0;
  int jobs = default_jobs();
};

namespace detail {

inline void emit_report(const std::string& text, const std::optional<fs::path>& path,
                        std::ostream& out) {
  if (path) {
    write_text_file(*path, text);
  } else {
    out << text;
  }
}

inline void write_profiles(const fs::path& dir, const fs::path& image, const UnpadReport& report) {
  for (const auto& side : report.sides) {
    if (!side.profile) continue;
    write_text_file(dir / (image.stem().string() + "_" + std::string(to_string(side.side)) + ".csv"),
                    format_profile_csv(*side.profile));
  }
}

inline fs::path profile_dir(const std::optional<fs::path>& report) {
  return (report && report->has_parent_path() ? report->parent_path() : fs::path(".")) /
         "profiles";
}

struct Slot {
  std::optional<ImageEntry> entry;
  std::optional<ErrorEntry> error;
  std::string warning;
};

inline BatchReport gather(std::vector<Slot>& slots, std::ostream& err) {
  BatchReport batch;
  for (auto& slot : slots) {
    if (!slot.warning.empty()) err << "warning: " << slot.warning << '\n';
    if (slot.entry) batch.images.push_back(std::move(*slot.entry));
    if (slot.error) batch.errors.push_back(std::move(*slot.error));
  }
  return batch;
}

}  // namespace detail

/// Detects padding on every image under `input` and writes the JSON report.
inline int run_detect(const fs::path& input, const DetectOptions& options, std::ostream& out,
                      std::ostream& err) {
  options.params.validate();
  const auto files = list_images(input);
  const fs::path profiles = detail::profile_dir(options.report);
  std::vector<detail::Slot> slots(files.size());
  parallel_for(files.size(), options.jobs, [&](std::size_t i) {
    const auto& file = files[i];
    try {
      const ImageBuffer image = read_image(file);
      ImageEntry entry;
      entry.path = file.generic_string();
      entry.report = detect_all_sides(image, options.params, options.emit_profiles);
      if (options.emit_profiles) detail::write_profiles(profiles, file, entry.report);
      for (auto& side : entry.report.sides) side.profile.reset();
      slots[i].entry = std::move(entry);
    } catch (const std::exception& e) {
      slots[i].error = ErrorEntry{file.generic_string(), e.what()};
    }
  });
  const BatchReport batch = detail::gather(slots, err);
  detail::emit_report(format_report(batch), options.report, out);
  for (const auto& e : batch.errors) err << "error: " << e.path << ": " << e.message << '\n';
  return batch.errors.empty() ? kExitOk : kExitPartial;
}

/// Detects, crops and writes every image to `output`, rewriting annotation
/// files found in `options.annotations` into `output/labels`. Images with
/// nothing to crop are copied byte for byte.
inline int run_unpad(const fs::path& input, const fs::path& output, const UnpadOptions& options,
                     std::ostream& out, std::ostream& err) {
  options.params.validate();
  if (!(options.min_visibility >= 0.0 && options.min_visibility <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "min visibility must be in [0, 1]");
  }
  const auto files = list_images(input);
  fs::create_directories(output);
  if (options.annotations) fs::create_directories(output / "labels");
  const fs::path profiles = output / "profiles";

  std::vector<detail::Slot> slots(files.size());
  parallel_for(files.size(), options.jobs, [&](std::size_t i) {
    const auto& file = files[i];
    try {
      const ImageBuffer image = read_image(file);
      ImageEntry entry;
      entry.path = file.generic_string();
      entry.report = detect_all_sides(image, options.params, options.emit_profiles);
      if (options.emit_profiles) detail::write_profiles(profiles, file, entry.report);
      for (auto& side : entry.report.sides) side.profile.reset();

      const CropRect& crop = entry.report.crop;
      const fs::path target = output / file.filename();
      if (crop == CropRect::full(image)) {
        fs::copy_file(file, target, fs::copy_options::overwrite_existing);
      } else {
        write_image(target, crop_image(image, crop));
      }
      entry.output = target.generic_string();

      if (options.annotations) {
        const fs::path labels = *options.annotations / (file.stem().string() + ".txt");
        if (fs::exists(labels)) {
          std::istringstream is(read_text_file(labels));
          const AnnotationSet before = read_annotations(is);
          const AnnotationSet after = transform_annotations(before, image.width(), image.height(),
                                                            crop, options.min_visibility);
          std::ostringstream os;
          write_annotations(os, after);
          write_text_file(output / "labels" / labels.filename(), os.str());
          entry.boxes_before = before.size();
          entry.boxes_after = after.size();
        } else {
          slots[i].warning = "no annotation file for " + file.generic_string();
        }
      }
      slots[i].entry = std::move(entry);
    } catch (const std::exception& e) {
      slots[i].error = ErrorEntry{file.generic_string(), e.what()};
    }
  });
  const BatchReport batch = detail::gather(slots, err);
  detail::emit_report(format_report(batch), options.report, out);
  for (const auto& e : batch.errors) err << "error: " << e.path << ": " << e.message << '\n';
  return batch.errors.empty() ? kExitOk : kExitPartial;
}

/// Loads every manifest image (relative paths resolve against the manifest's
/// directory) and collects per-side minimum MSEs.
inline CollectResult collect_from_manifest(const fs::path& manifest, const DetectionParams& params,
                                           int jobs) {
  std::istringstream is(read_text_file(manifest));
  const auto entries = read_manifest(is);
  if (entries.empty()) {
    throw Error(ErrorCode::EmptyManifest, manifest.string() + " lists no images");
  }
  const fs::path base = manifest.has_parent_path() ? manifest.parent_path() : fs::path(".");
  std::vector<std::optional<LabeledImage>> loaded(entries.size());
  std::vector<std::string> load_errors(entries.size());
  parallel_for(entries.size(), jobs, [&](std::size_t i) {
    fs::path path(entries[i].path);
    if (path.is_relative()) path = base / path;
    try {
      loaded[i] = LabeledImage{read_image(path), {entries[i].path, entries[i].pads}};
    } catch (const std::exception& e) {
      load_errors[i] = e.what();
    }
  });

  std::vector<LabeledImage> samples;
  std::vector<SampleFailure> failures;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (loaded[i]) {
      samples.push_back(std::move(*loaded[i]));
    } else {
      failures.push_back({entries[i].path, load_errors[i]});
    }
  }
  CollectResult result = collect_min_mses(samples, params, jobs);
  result.failures.insert(result.failures.begin(), failures.begin(), failures.end());
  return result;
}

inline int run_calibrate(const fs::path& manifest, const CalibrateOptions& options,
                         std::ostream& out, std::ostream& err) {
  options.params.validate();
  const CollectResult collected = collect_from_manifest(manifest, options.params, options.jobs);
  for (const auto& f : collected.failures) err << "error: " << f.image_id << ": " << f.message << '\n';

  if (options.method == CalibrationMethod::Sweep) {
    const SweepResult sweep = sweep_thresholds(collected.records, options.sweep);
    const SweepPoint& best = sweep.selected();
    out << "method sweep\nthreshold " << fixed6(best.threshold) << "\nprecision "
        << fixed6(best.precision) << "\nrecall " << fixed6(best.recall) << '\n';
    if (options.report) write_text_file(*options.report, format_sweep_csv(sweep.points));
  } else {
    const auto values = min_mses(collected.records);
    const OtsuResult otsu = otsu_threshold(values);
    const SweepPoint score =
        evaluate_threshold(collected.records, otsu.threshold, options.sweep.tolerance);
    out << "method otsu\nthreshold " << fixed6(otsu.threshold) << "\nprecision "
        << fixed6(score.precision) << "\nrecall " << fixed6(score.recall) << '\n';
    if (options.report) write_text_file(*options.report, format_otsu_summary(otsu, score));
  }
  return collected.failures.empty() ? kExitOk : kExitPartial;
}

/// Writes <id>.png, originals/<id>.png, labels/<id>.txt and manifest.txt.
inline int run_synth(const fs::path& output, const SynthOptions& options, std::ostream& out) {
  options.spec.validate();
  fs::create_directories(output / "originals");
  fs::create_directories(output / "labels");
  std::vector<ManifestEntry> manifest(options.count);
  parallel_for(options.count, options.jobs, [&](std::size_t i) {
    const SyntheticSample s = generate_sample(options.spec, options.seed, i);
    const std::string name = s.label.image_id + ".png";
    write_image(output / name, s.image);
    write_image(output / "originals" / name, s.original);
    std::ostringstream boxes;
    write_annotations(boxes, s.boxes);
    write_text_file(output / "labels" / (s.label.image_id + ".txt"), boxes.str());
    manifest[i] = {name, s.label.true_pad};
  });
  std::ostringstream os;
  write_manifest(os, manifest);
  write_text_file(output / "manifest.txt", os.str());
  out << "wrote " << options.count << " images to " << output.generic_string() << '\n';
  return kExitOk;
}

}  // namespace unpad
