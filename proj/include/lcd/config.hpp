#pragma once

#include "lcd/denoise.hpp"
#include "lcd/external.hpp"
#include "lcd/fbp.hpp"
#include "lcd/metrics.hpp"
#include "lcd/phantom.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcd {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ObserverConfig {
  int channels = 5;
  double width_factor = 2.0;  // channel width a = factor * insert diameter (pixels)
  int roi_side = 64;
  std::vector<double> sa_offsets_deg{-20.0, -10.0, 0.0, 10.0, 20.0};
  int train_pairs = 100;          // at reference_sp_scans; scaled for smaller studies
  int reference_sp_scans = 200;
  int repeats = 10;
};

struct MetricStudyConfig {
  std::string mode = "simulated";  // or "files"
  int n_slices = 10;
  double reference_dose = 1.0;
  double test_dose = 0.25;
  std::string ref_dir;
  std::map<std::string, std::string> test_dirs;  // method -> directory (files mode)
  SsimParams ssim;
};

struct ExternalMethod {
  std::string command;
  double timeout_s = 600.0;
};

/// Everything that determines study output. Execution settings (worker count, output
/// directory) live outside so they never enter the provenance hash.
struct StudyConfig {
  std::uint64_t study_seed = 20221;
  std::vector<double> doses{0.25, 0.5, 0.75, 1.0};
  int n_sp_scans = 200;
  int n_water_scans = 100;
  Cct189Layout phantom;
  double mu_water = kMuWater;
  FanBeamGeometry geometry;
  ReconParams recon;
  bool full_image = false;  // reconstruct whole slices instead of insert neighborhoods
  int region_margin_px = 24;
  NormalizationWindow normalization;
  std::vector<std::string> methods{"fbp", "bilateral", "tv"};
  BilateralParams bilateral;
  TvParams tv;
  std::map<std::string, ExternalMethod> external;
  ObserverConfig observer;
  MetricStudyConfig metrics;
  bool save_rois = false;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
  bool desk_scale() const { return n_sp_scans != observer.reference_sp_scans || n_water_scans != 100; }
  /// Training pairs after proportional scaling to n_sp_scans.
  int effective_train_pairs() const;
};

nlohmann::json to_json(const StudyConfig& cfg);
StudyConfig study_config_from_json(const nlohmann::json& j);

/// Reads a JSON config file; keys absent from the file keep their defaults.
nlohmann::json load_config_json(const std::filesystem::path& path);

/// Applies "dotted.key=value"; the value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// FNV-1a of the canonical (sorted, compact) JSON dump.
std::string config_hash(const StudyConfig& cfg);

}  // namespace lcd
