// Command-line frontend: detect, unpad, calibrate, synth.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "unpad/commands.hpp"

namespace {

struct DetectionFlags {
  int offset = 10;
  double threshold = 110.0;
  std::optional<int> scan_cap;
  int jobs = unpad::default_jobs();

  void add_to(CLI::App* cmd) {
    cmd->add_option("--offset", offset, "First dividing line scanned, in pixels")
        ->capture_default_str();
    cmd->add_option("--threshold", threshold, "Largest minimum MSE accepted as padding")
        ->capture_default_str();
    cmd->add_option("--scan-cap", scan_cap, "Largest dividing line scanned, in pixels");
    cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  }

  unpad::DetectionParams params() const { return {offset, threshold, scan_cap}; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect and remove mirrored padding from images"};
  app.require_subcommand(1);

  DetectionFlags detect_flags;
  std::string detect_input;
  std::optional<std::string> detect_report;
  bool detect_profiles = false;
  auto* detect = app.add_subcommand("detect", "Report padding per side for each image");
  detect->add_option("input", detect_input, "Image file or directory")->required();
  detect_flags.add_to(detect);
  detect->add_option("--report", detect_report, "JSON report path (default: stdout)");
  detect->add_flag("--emit-profiles", detect_profiles, "Write per-side MSE profiles as CSV");

  DetectionFlags unpad_flags;
  std::string unpad_input;
  std::string unpad_output;
  std::optional<std::string> unpad_report;
  std::optional<std::string> annotations;
  double min_visibility = 0.0;
  bool unpad_profiles = false;
  auto* unpad_cmd = app.add_subcommand("unpad", "Crop detected padding and rewrite annotations");
  unpad_cmd->add_option("input", unpad_input, "Image file or directory")->required();
  unpad_cmd->add_option("output", unpad_output, "Output directory")->required();
  unpad_flags.add_to(unpad_cmd);
  unpad_cmd->add_option("--annotations", annotations, "Directory of <stem>.txt box files");
  unpad_cmd->add_option("--min-visibility", min_visibility,
                        "Drop boxes keeping less than this fraction of their area")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  unpad_cmd->add_option("--report", unpad_report, "JSON report path (default: stdout)");
  unpad_cmd->add_flag("--emit-profiles", unpad_profiles, "Write per-side MSE profiles as CSV");

  DetectionFlags calib_flags;
  std::string manifest;
  std::string method = "sweep";
  unpad::SweepConfig sweep;
  std::optional<std::string> calib_report;
  auto* calibrate = app.add_subcommand("calibrate", "Choose the MSE threshold from a labeled manifest");
  calibrate->add_option("manifest", manifest, "Labeled manifest")->required();
  calib_flags.add_to(calibrate);
  calibrate->add_option("--method", method)->capture_default_str()->check(
      CLI::IsMember({"sweep", "otsu"}));
  calibrate->add_option("--tau-start", sweep.start)->capture_default_str();
  calibrate->add_option("--tau-end", sweep.end)->capture_default_str();
  calibrate->add_option("--tau-step", sweep.step)->capture_default_str();
  calibrate->add_option("--tolerance", sweep.tolerance, "Line tolerance in pixels")
      ->capture_default_str();
  calibrate->add_option("--report", calib_report,
                        "Sweep CSV (sweep) or histogram summary JSON (otsu)");

  unpad::SynthOptions synth_opts;
  std::string synth_output;
  auto* synth = app.add_subcommand("synth", "Generate a labeled mirror-padded corpus");
  synth->add_option("output", synth_output, "Output directory")->required();
  synth->add_option("--count", synth_opts.count)->capture_default_str();
  synth->add_option("--size-min", synth_opts.spec.size_min)->capture_default_str();
  synth->add_option("--size-max", synth_opts.spec.size_max)->capture_default_str();
  synth->add_option("--pad-prob", synth_opts.spec.pad_prob)->capture_default_str();
  synth->add_option("--pad-min", synth_opts.spec.pad_min, "Pixels")->capture_default_str();
  synth->add_option("--pad-max", synth_opts.spec.pad_max, "Pixels")->capture_default_str();
  synth->add_option("--sigma", synth_opts.spec.sigma, "Gaussian noise std-dev")->capture_default_str();
  synth->add_option("--quant-step", synth_opts.spec.quant_step)->capture_default_str();
  synth->add_option("--seed", synth_opts.seed)->capture_default_str();
  synth->add_option("--jobs", synth_opts.jobs)->capture_default_str()->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (detect->parsed()) {
      unpad::DetectOptions opts;
      opts.params = detect_flags.params();
      opts.jobs = detect_flags.jobs;
      if (detect_report) opts.report = *detect_report;
      opts.emit_profiles = detect_profiles;
      return unpad::run_detect(detect_input, opts, std::cout, std::cerr);
    }
    if (unpad_cmd->parsed()) {
      unpad::UnpadOptions opts;
      opts.params = unpad_flags.params();
      opts.jobs = unpad_flags.jobs;
      if (unpad_report) opts.report = *unpad_report;
      if (annotations) opts.annotations = *annotations;
      opts.min_visibility = min_visibility;
      opts.emit_profiles = unpad_profiles;
      return unpad::run_unpad(unpad_input, unpad_output, opts, std::cout, std::cerr);
    }
    if (calibrate->parsed()) {
      unpad::CalibrateOptions opts;
      opts.params = calib_flags.params();
      opts.jobs = calib_flags.jobs;
      opts.method = method == "otsu" ? unpad::CalibrationMethod::Otsu
                                     : unpad::CalibrationMethod::Sweep;
      opts.sweep = sweep;
      if (calib_report) opts.report = *calib_report;
      return unpad::run_calibrate(manifest, opts, std::cout, std::cerr);
    }
    if (synth->parsed()) {
      return unpad::run_synth(synth_output, synth_opts, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return unpad::kExitFatal;
  }
  return unpad::kExitFatal;
}
