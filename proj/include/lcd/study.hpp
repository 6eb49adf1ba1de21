#pragma once

#include "lcd/config.hpp"
#include "lcd/fbp.hpp"
#include "lcd/metrics.hpp"
#include "lcd/observer.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lcd {

/// Execution settings that must not change results.
struct RunOptions {
  int workers = 1;
  std::ostream* log = nullptr;
  /// Where ROI sets (save_rois) and external-denoiser exchange files go.
  std::optional<std::filesystem::path> work_dir;
};

struct LcdRow {
  std::string method;
  double dose = 0.0;
  int insert = 0;
  double diameter_mm = 0.0;
  double contrast_hu = 0.0;
  double auc = 0.0;
  double auc_std = 0.0;
  double dprime = 0.0;
  int n_sp_rois = 0;
  int n_sa_rois = 0;
  int n_train_pairs = 0;
  int n_test_sp = 0;
  int n_test_sa = 0;
  int repeats = 0;
  std::uint64_t split_seed = 0;
};

struct LcdResult {
  std::vector<LcdRow> rows;
  std::string config_hash;
  std::uint64_t study_seed = 0;
  bool desk_scale = false;
  std::string config_json;  // compact dump of the study config
};

/// ROI centers (pixel indices on the recon lattice) for one insert: the insert center, and
/// the same radius from iso-center rotated by each SA offset.
PixelCenter insert_center_px(const DiskSpec& insert, const ReconParams& recon);
std::vector<PixelCenter> sa_centers_px(const DiskSpec& insert, const ReconParams& recon,
                                       const std::vector<double>& offsets_deg);

/// Denoises an HU image with a configured method ("fbp" returns it unchanged); denoisers run
/// on the normalized image and the result is mapped back to HU.
ImageGrid apply_method(const std::string& method, const ImageGrid& hu, const StudyConfig& cfg,
                       const std::filesystem::path& exchange_root = std::filesystem::temp_directory_path());

/// Dose-sweep detectability study: one row per (method, dose, insert).
LcdResult run_lcd_study(const StudyConfig& cfg, const RunOptions& opts = {});

/// PSNR/SSIM of each method's test-dose output against the reference-dose image.
MetricReport run_metric_study(const StudyConfig& cfg, const RunOptions& opts = {});

void write_lcd_csv(std::ostream& os, const LcdResult& result);
LcdResult read_lcd_csv(const std::filesystem::path& path);

/// lcd_results.csv plus one AUC-vs-dose plot per insert. Throws without writing anything
/// when the result is empty.
std::vector<std::filesystem::path> emit_report(const LcdResult& result, const std::filesystem::path& dir);

/// metrics.csv plus a PSNR/SSIM bar chart.
std::vector<std::filesystem::path> emit_metric_report(const MetricReport& report, const StudyConfig& cfg,
                                                      const std::filesystem::path& dir);

}  // namespace lcd
