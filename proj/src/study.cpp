#include "lcd/study.hpp"
#include "lcd/io.hpp"
#include "lcd/parallel.hpp"
#include "lcd/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace lcd {

namespace fs = std::filesystem;

namespace {

// Seed-stream tags. Changing any of these changes every study result.
constexpr std::uint64_t kStreamCct = 1;
constexpr std::uint64_t kStreamWater = 2;
constexpr std::uint64_t kStreamSplit = 3;
constexpr std::uint64_t kStreamMetric = 4;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

void log_line(const RunOptions& opts, const std::string& line) {
  if (opts.log) *opts.log << line << '\n' << std::flush;
}

// Reconstruction block: a pixel region plus the inserts whose ROIs it contains.
struct Block {
  PixelRegion region;
  std::vector<int> inserts;
};

std::vector<Block> plan_blocks(const StudyConfig& cfg, const PhantomSpec& spec) {
  const int n = cfg.recon.n;
  if (cfg.full_image) {
    Block b{PixelRegion{0, 0, n, n}, {}};
    for (int i = 0; i < static_cast<int>(spec.inserts.size()); ++i) b.inserts.push_back(i);
    return {b};
  }
  const int p = cfg.observer.roi_side;
  std::vector<Block> blocks;
  for (int i = 0; i < static_cast<int>(spec.inserts.size()); ++i) {
    std::vector<PixelCenter> centers = sa_centers_px(spec.inserts[i], cfg.recon, cfg.observer.sa_offsets_deg);
    centers.push_back(insert_center_px(spec.inserts[i], cfg.recon));
    int r0 = n, c0 = n, r1 = 0, c1 = 0;
    for (const auto& c : centers) {
      const int top = static_cast<int>(std::floor(c.row - 0.5 * (p - 1) + 0.5));
      const int left = static_cast<int>(std::floor(c.col - 0.5 * (p - 1) + 0.5));
      r0 = std::min(r0, top);
      c0 = std::min(c0, left);
      r1 = std::max(r1, top + p);
      c1 = std::max(c1, left + p);
    }
    const int m = cfg.region_margin_px;
    r0 = std::max(0, r0 - m);
    c0 = std::max(0, c0 - m);
    r1 = std::min(n, r1 + m);
    c1 = std::min(n, c1 + m);
    blocks.push_back(Block{PixelRegion{r0, c0, r1 - r0, c1 - c0}, {i}});
  }
  return blocks;
}

// Everything one scan contributes: per method, per insert, a J x k channel matrix
// (and the raw patches when ROI sets are saved).
struct ScanOutput {
  std::vector<std::vector<Eigen::MatrixXd>> channels;
  std::vector<std::vector<std::vector<Roi>>> rois;
};

struct ScanContext {
  const StudyConfig* cfg;
  const std::vector<Block>* blocks;
  const std::vector<ChannelBasis>* bases;
  // Per insert, the ROI centers this phantom contributes (absolute pixel indices).
  std::vector<std::vector<PixelCenter>> centers;
  RoiLabel label;
  bool keep_patches;
};

ScanOutput process_scan(const ScanContext& ctx, const Sinogram& noisy, std::int64_t scan_id,
                        const fs::path& exchange_root) {
  const StudyConfig& cfg = *ctx.cfg;
  const std::size_t n_methods = cfg.methods.size();
  const std::size_t n_inserts = ctx.centers.size();
  ScanOutput out;
  out.channels.assign(n_methods, std::vector<Eigen::MatrixXd>(n_inserts));
  if (ctx.keep_patches) out.rois.assign(n_methods, std::vector<std::vector<Roi>>(n_inserts));

  std::vector<PixelRegion> regions;
  for (const auto& b : *ctx.blocks) regions.push_back(b.region);
  std::vector<Matrix> mu = fbp_fan_mu_regions(noisy, cfg.recon, regions);

  const double mu_w = cfg.recon.mu_water;
  for (std::size_t bi = 0; bi < ctx.blocks->size(); ++bi) {
    const Block& block = (*ctx.blocks)[bi];
    ImageGrid hu{mu[bi].unaryExpr([mu_w](double m) { return mu_to_hu(m, mu_w); }), cfg.recon.pixel_mm(), Unit::HU};
    mu[bi].resize(0, 0);
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      const ImageGrid img = apply_method(cfg.methods[mi], hu, cfg, exchange_root / ("block" + std::to_string(bi)));
      for (int ins : block.inserts) {
        std::vector<PixelCenter> local;
        for (const auto& c : ctx.centers[static_cast<std::size_t>(ins)]) {
          local.push_back({c.row - block.region.row0, c.col - block.region.col0});
        }
        std::vector<Roi> rois = extract_rois(img, local, cfg.observer.roi_side, ctx.label, ins, scan_id);
        out.channels[mi][static_cast<std::size_t>(ins)] = channelize((*ctx.bases)[static_cast<std::size_t>(ins)], rois);
        if (ctx.keep_patches) {
          for (std::size_t k = 0; k < rois.size(); ++k) rois[k].center = ctx.centers[static_cast<std::size_t>(ins)][k];
          out.rois[mi][static_cast<std::size_t>(ins)] = std::move(rois);
        }
      }
    }
  }
  return out;
}

Eigen::MatrixXd stack(const std::vector<ScanOutput>& scans, std::size_t method, std::size_t insert) {
  Eigen::Index cols = 0;
  for (const auto& s : scans) cols += s.channels[method][insert].cols();
  const Eigen::Index rows = scans.empty() ? 0 : scans.front().channels[method][insert].rows();
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& s : scans) {
    const auto& m = s.channels[method][insert];
    out.middleCols(at, m.cols()) = m;
    at += m.cols();
  }
  return out;
}

fs::path default_work_dir(const StudyConfig& cfg) {
  return fs::temp_directory_path() / ("lcdsim-" + config_hash(cfg));
}

}  // namespace

PixelCenter insert_center_px(const DiskSpec& insert, const ReconParams& recon) {
  const double half = 0.5 * (recon.n - 1);
  const double pix = recon.pixel_mm();
  return {half - insert.center_y_mm / pix, half + insert.center_x_mm / pix};
}

std::vector<PixelCenter> sa_centers_px(const DiskSpec& insert, const ReconParams& recon,
                                       const std::vector<double>& offsets_deg) {
  const double radius = std::hypot(insert.center_x_mm, insert.center_y_mm);
  const double base = std::atan2(insert.center_y_mm, insert.center_x_mm);
  std::vector<PixelCenter> out;
  for (double off : offsets_deg) {
    const double a = base + off * std::numbers::pi / 180.0;
    DiskSpec moved = insert;
    moved.center_x_mm = radius * std::cos(a);
    moved.center_y_mm = radius * std::sin(a);
    out.push_back(insert_center_px(moved, recon));
  }
  return out;
}

ImageGrid apply_method(const std::string& method, const ImageGrid& hu, const StudyConfig& cfg,
                       const fs::path& exchange_root) {
  require_unit(hu, Unit::HU, "apply_method");
  if (method == "fbp") return hu;
  const ImageGrid norm = normalize(hu, cfg.normalization);
  if (method == "bilateral") return denormalize(bilateral(norm, cfg.bilateral), cfg.normalization);
  if (method == "tv") return denormalize(tv_denoise(norm, cfg.tv), cfg.normalization);
  if (const auto it = cfg.external.find(method); it != cfg.external.end()) {
    ExternalDenoiserConfig ext;
    ext.command = it->second.command;
    ext.exchange_dir = exchange_root / method;
    ext.timeout = std::chrono::milliseconds(static_cast<long long>(it->second.timeout_s * 1000.0));
    fs::create_directories(ext.exchange_dir);
    return denormalize(external_denoise(norm, ext), cfg.normalization);
  }
  throw ConfigError("unknown method '" + method + "'");
}

LcdResult run_lcd_study(const StudyConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const PhantomSpec cct = build_cct189(cfg.phantom);
  const PhantomSpec water = build_uniform_water(cfg.phantom);
  const std::size_t n_inserts = cct.inserts.size();
  const std::size_t n_methods = cfg.methods.size();
  const int workers = std::max(1, opts.workers);
  const int sa_per_scan = static_cast<int>(cfg.observer.sa_offsets_deg.size());
  const int train_pairs = cfg.effective_train_pairs();
  const fs::path work = opts.work_dir.value_or(default_work_dir(cfg));

  LcdResult result;
  result.config_hash = config_hash(cfg);
  result.study_seed = cfg.study_seed;
  result.desk_scale = cfg.desk_scale();
  result.config_json = to_json(cfg).dump();

  log_line(opts, "config " + result.config_hash + (result.desk_scale ? " (desk scale)" : ""));
  const Sinogram clean_cct = forward_project(cct, cfg.geometry, cfg.mu_water, workers);
  const Sinogram clean_water = forward_project(water, cfg.geometry, cfg.mu_water, workers);

  const std::vector<Block> blocks = plan_blocks(cfg, cct);
  std::vector<ChannelBasis> bases;
  ScanContext sp_ctx{&cfg, &blocks, &bases, {}, RoiLabel::SignalPresent, cfg.save_rois};
  ScanContext sa_ctx{&cfg, &blocks, &bases, {}, RoiLabel::SignalAbsent, cfg.save_rois};
  for (const auto& ins : cct.inserts) {
    const double width_px = cfg.observer.width_factor * 2.0 * ins.radius_mm / cfg.recon.pixel_mm();
    bases.push_back(lg_channels(cfg.observer.roi_side, cfg.observer.channels, width_px));
    sp_ctx.centers.push_back({insert_center_px(ins, cfg.recon)});
    sa_ctx.centers.push_back(sa_centers_px(ins, cfg.recon, cfg.observer.sa_offsets_deg));
  }

  const std::uint64_t cct_stream = mix_seed(cfg.study_seed, kStreamCct);
  const std::uint64_t water_stream = mix_seed(cfg.study_seed, kStreamWater);
  const auto n_sp = static_cast<std::size_t>(cfg.n_sp_scans);
  const auto n_water = static_cast<std::size_t>(cfg.n_water_scans);

  for (std::size_t di = 0; di < cfg.doses.size(); ++di) {
    const DoseLevel dose{cfg.doses[di]};
    std::vector<ScanOutput> sp_scans(n_sp);
    std::vector<ScanOutput> sa_scans(n_water);
    // SP scans first, then water scans, as one task list.
    parallel_for(n_sp + n_water, workers, [&](std::size_t t) {
      const bool is_sp = t < n_sp;
      const std::size_t s = is_sp ? t : t - n_sp;
      const Sinogram noisy =
          apply_poisson_noise(is_sp ? clean_cct : clean_water, dose, scan_seed(is_sp ? cct_stream : water_stream, di, s));
      const fs::path exchange = work / "exchange" / ("d" + std::to_string(di)) / ((is_sp ? "sp" : "sa") + std::to_string(s));
      const auto scan_id = static_cast<std::int64_t>(s);
      if (is_sp) {
        sp_scans[s] = process_scan(sp_ctx, noisy, scan_id, exchange);
      } else {
        sa_scans[s] = process_scan(sa_ctx, noisy, scan_id, exchange);
      }
    });

    for (std::size_t ins = 0; ins < n_inserts; ++ins) {
      const DiskSpec& disk = cct.inserts[ins];
      const std::uint64_t split_seed = mix_seed(mix_seed(cfg.study_seed, kStreamSplit), di, ins);
      for (std::size_t mi = 0; mi < n_methods; ++mi) {
        const Eigen::MatrixXd ch_sp = stack(sp_scans, mi, ins);
        const Eigen::MatrixXd ch_sa = stack(sa_scans, mi, ins);
        // Protocol conservation: 1 SP ROI per CCT scan, one SA ROI per offset per water scan.
        if (ch_sp.cols() != cfg.n_sp_scans || ch_sa.cols() != static_cast<Eigen::Index>(cfg.n_water_scans) * sa_per_scan) {
          throw std::logic_error("ROI count does not match the scan protocol");
        }
        const DetectabilityEstimate est =
            auc_with_uncertainty(ch_sp, ch_sa, SplitProtocol{train_pairs, cfg.observer.repeats, split_seed}, workers);
        LcdRow row;
        row.method = cfg.methods[mi];
        row.dose = dose.fraction;
        row.insert = static_cast<int>(ins);
        row.diameter_mm = 2.0 * disk.radius_mm;
        row.contrast_hu = disk.contrast_hu;
        row.auc = est.auc;
        row.auc_std = est.auc_std;
        row.dprime = est.dprime;
        row.n_sp_rois = static_cast<int>(ch_sp.cols());
        row.n_sa_rois = static_cast<int>(ch_sa.cols());
        row.n_train_pairs = est.n_train_pairs;
        row.n_test_sp = est.n_test_sp;
        row.n_test_sa = est.n_test_sa;
        row.repeats = est.repeats;
        row.split_seed = split_seed;
        result.rows.push_back(row);

        if (cfg.save_rois) {
          std::vector<Roi> all;
          for (const auto* scans : {&sp_scans, &sa_scans}) {
            for (const auto& s : *scans) {
              const auto& r = s.rois[mi][ins];
              all.insert(all.end(), r.begin(), r.end());
            }
          }
          write_roi_set(work / "rois" / (row.method + "_d" + std::to_string(di) + "_insert" + std::to_string(ins)), all);
        }
      }
    }
    log_line(opts, "dose " + fmt("%g", dose.fraction) + ": " + std::to_string(cfg.n_sp_scans) + " CCT scans -> " +
                       std::to_string(cfg.n_sp_scans) + " SP ROIs/insert; " + std::to_string(cfg.n_water_scans) +
                       " water scans x " + std::to_string(sa_per_scan) + " -> " +
                       std::to_string(cfg.n_water_scans * sa_per_scan) + " SA ROIs/insert; " +
                       std::to_string(train_pairs) + " train pairs (counts verified)");
  }
  return result;
}

MetricReport run_metric_study(const StudyConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const int workers = std::max(1, opts.workers);
  const MetricStudyConfig& mc = cfg.metrics;
  std::map<std::string, std::vector<double>> psnr_map;
  std::map<std::string, std::vector<double>> ssim_map;
  std::vector<std::string> order;

  if (mc.mode == "simulated") {
    order = cfg.methods;
    const PhantomSpec cct = build_cct189(cfg.phantom);
    const Sinogram clean = forward_project(cct, cfg.geometry, cfg.mu_water, workers);
    const std::uint64_t stream = mix_seed(cfg.study_seed, kStreamMetric);
    const fs::path work = opts.work_dir.value_or(default_work_dir(cfg));
    const auto n = static_cast<std::size_t>(mc.n_slices);
    std::vector<std::vector<std::pair<double, double>>> per_slice(n);
    parallel_for(n, workers, [&](std::size_t i) {
      const ImageGrid ref_hu = fbp_fan(apply_poisson_noise(clean, DoseLevel{mc.reference_dose}, scan_seed(stream, 0, i)), cfg.recon);
      const ImageGrid test_hu = fbp_fan(apply_poisson_noise(clean, DoseLevel{mc.test_dose}, scan_seed(stream, 1, i)), cfg.recon);
      const ImageGrid ref = normalize(ref_hu, cfg.normalization);
      for (const auto& m : order) {
        const ImageGrid out = normalize(apply_method(m, test_hu, cfg, work / "metrics" / ("slice" + std::to_string(i))),
                                        cfg.normalization);
        per_slice[i].emplace_back(psnr(ref, out), ssim(ref, out, mc.ssim));
      }
    });
    for (std::size_t mi = 0; mi < order.size(); ++mi) {
      for (std::size_t i = 0; i < n; ++i) {
        psnr_map[order[mi]].push_back(per_slice[i][mi].first);
        ssim_map[order[mi]].push_back(per_slice[i][mi].second);
      }
    }
  } else if (mc.mode == "files") {
    if (mc.ref_dir.empty() || mc.test_dirs.empty()) throw ConfigError("metrics: files mode needs ref_dir and test_dirs");
    auto as_normalized = [&](const ImageGrid& img) {
      return img.unit == Unit::Normalized ? img : normalize(img, cfg.normalization);
    };
    std::vector<std::string> stems;
    for (const auto& entry : fs::directory_iterator(mc.ref_dir)) {
      if (entry.path().extension() == ".hdr") stems.push_back(entry.path().stem().string());
    }
    std::sort(stems.begin(), stems.end());
    for (const auto& m : cfg.methods) {
      if (mc.test_dirs.contains(m)) order.push_back(m);
    }
    for (const auto& [m, dir] : mc.test_dirs) {
      if (std::find(order.begin(), order.end(), m) == order.end()) order.push_back(m);
    }
    for (const auto& m : order) {
      const fs::path dir = mc.test_dirs.at(m);
      for (const auto& stem : stems) {
        if (!fs::exists(dir / (stem + ".hdr"))) throw std::runtime_error("metrics: " + m + " has no image '" + stem + "'");
        const ImageGrid ref = as_normalized(read_image(fs::path(mc.ref_dir) / stem));
        const ImageGrid test = as_normalized(read_image(dir / stem));
        psnr_map[m].push_back(psnr(ref, test));
        ssim_map[m].push_back(ssim(ref, test, mc.ssim));
      }
    }
  } else {
    throw ConfigError("metrics.mode must be 'simulated' or 'files'");
  }
  MetricReport report = aggregate(order, psnr_map, ssim_map);
  for (const auto& row : report.rows) {
    log_line(opts, row.method + ": PSNR " + format_mean_std(row.psnr_mean, row.psnr_std, 2) + " dB, SSIM " +
                       format_mean_std(row.ssim_mean, row.ssim_std, 4));
  }
  return report;
}

namespace {

const char* kLcdHeader =
    "method,dose,insert,diameter_mm,contrast_hu,auc,auc_std,dprime,n_sp_rois,n_sa_rois,n_train_pairs,n_test_sp,"
    "n_test_sa,repeats,split_seed";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_lcd_csv(std::ostream& os, const LcdResult& result) {
  os << "# config_hash=" << result.config_hash << '\n';
  os << "# study_seed=" << result.study_seed << '\n';
  os << "# desk_scale=" << (result.desk_scale ? "true" : "false") << '\n';
  os << "# auc_std=sample std over repeated random train/test splits\n";
  os << "# config=" << result.config_json << '\n';
  os << kLcdHeader << '\n';
  for (const auto& r : result.rows) {
    os << r.method << ',' << fmt("%g", r.dose) << ',' << r.insert << ',' << fmt("%g", r.diameter_mm) << ','
       << fmt("%g", r.contrast_hu) << ',' << fmt("%.6f", r.auc) << ',' << fmt("%.6f", r.auc_std) << ','
       << fmt("%.6f", r.dprime) << ',' << r.n_sp_rois << ',' << r.n_sa_rois << ',' << r.n_train_pairs << ','
       << r.n_test_sp << ',' << r.n_test_sa << ',' << r.repeats << ',' << r.split_seed << '\n';
  }
}

LcdResult read_lcd_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  LcdResult result;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "config_hash") result.config_hash = value;
      if (key == "study_seed") result.study_seed = std::stoull(value);
      if (key == "desk_scale") result.desk_scale = value == "true";
      if (key == "config") result.config_json = value;
      continue;
    }
    if (!header_seen) {
      if (line != kLcdHeader) throw std::runtime_error(path.string() + ": unexpected CSV header");
      header_seen = true;
      continue;
    }
    const auto c = split_csv(line);
    if (c.size() != 15) throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
    LcdRow r;
    r.method = c[0];
    r.dose = std::stod(c[1]);
    r.insert = std::stoi(c[2]);
    r.diameter_mm = std::stod(c[3]);
    r.contrast_hu = std::stod(c[4]);
    r.auc = std::stod(c[5]);
    r.auc_std = std::stod(c[6]);
    r.dprime = std::stod(c[7]);
    r.n_sp_rois = std::stoi(c[8]);
    r.n_sa_rois = std::stoi(c[9]);
    r.n_train_pairs = std::stoi(c[10]);
    r.n_test_sp = std::stoi(c[11]);
    r.n_test_sa = std::stoi(c[12]);
    r.repeats = std::stoi(c[13]);
    r.split_seed = std::stoull(c[14]);
    result.rows.push_back(r);
  }
  if (!header_seen) throw std::runtime_error(path.string() + ": no CSV header");
  return result;
}

std::vector<fs::path> emit_report(const LcdResult& result, const fs::path& dir) {
  if (result.rows.empty()) throw std::invalid_argument("report: the LCD result has no rows");
  fs::create_directories(dir);
  std::vector<fs::path> written;

  const fs::path csv = dir / "lcd_results.csv";
  {
    std::ofstream out(csv, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + csv.string());
    write_lcd_csv(out, result);
  }
  written.push_back(csv);

  std::vector<int> inserts;
  std::vector<std::string> methods;
  for (const auto& r : result.rows) {
    if (std::find(inserts.begin(), inserts.end(), r.insert) == inserts.end()) inserts.push_back(r.insert);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  std::sort(inserts.begin(), inserts.end());
  const std::string footer = "config_hash=" + result.config_hash + " study_seed=" + std::to_string(result.study_seed) +
                             (result.desk_scale ? " desk_scale" : "");

  for (int ins : inserts) {
    std::vector<Series> series;
    double diameter = 0.0;
    double contrast = 0.0;
    for (const auto& m : methods) {
      Series s{m, {}, {}, {}};
      std::vector<const LcdRow*> rows;
      for (const auto& r : result.rows) {
        if (r.insert == ins && r.method == m) rows.push_back(&r);
      }
      std::sort(rows.begin(), rows.end(), [](const LcdRow* a, const LcdRow* b) { return a->dose < b->dose; });
      for (const LcdRow* r : rows) {
        s.x.push_back(r->dose);
        s.y.push_back(r->auc);
        s.err.push_back(r->auc_std);
        diameter = r->diameter_mm;
        contrast = r->contrast_hu;
      }
      if (!s.x.empty()) series.push_back(std::move(s));
    }
    const std::string title = "Insert " + std::to_string(ins) + ": " + fmt("%g", diameter) + " mm, " + fmt("%g", contrast) +
                              " HU" + (result.desk_scale ? " (desk scale)" : "");
    const fs::path svg = dir / ("auc_vs_dose_insert" + std::to_string(ins) + ".svg");
    write_line_plot_svg(svg, PlotText{title, "dose fraction", "LG-CHO AUC", footer}, series);
    written.push_back(svg);
  }
  return written;
}

std::vector<fs::path> emit_metric_report(const MetricReport& report, const StudyConfig& cfg, const fs::path& dir) {
  if (report.rows.empty()) throw std::invalid_argument("report: the metric report has no rows");
  fs::create_directories(dir);
  const std::string hash = config_hash(cfg);
  const std::string footer = "config_hash=" + hash + " study_seed=" + std::to_string(cfg.study_seed);

  const fs::path csv = dir / "metrics.csv";
  {
    std::ofstream out(csv, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + csv.string());
    out << "# config_hash=" << hash << '\n';
    out << "# study_seed=" << cfg.study_seed << '\n';
    out << "# convention=" << report.convention << '\n';
    out << "# config=" << to_json(cfg).dump() << '\n';
    write_metric_csv(out, report);
  }

  std::vector<std::string> methods;
  Series psnr_series{"PSNR", {}, {}, {}};
  Series ssim_series{"SSIM", {}, {}, {}};
  for (const auto& r : report.rows) {
    methods.push_back(r.method);
    psnr_series.y.push_back(r.psnr_mean);
    psnr_series.err.push_back(r.psnr_std);
    ssim_series.y.push_back(r.ssim_mean);
    ssim_series.err.push_back(r.ssim_std);
  }
  const fs::path psnr_svg = dir / "psnr_by_method.svg";
  const fs::path ssim_svg = dir / "ssim_by_method.svg";
  write_bar_chart_svg(psnr_svg, PlotText{"PSNR vs reference dose", "method", "PSNR (dB)", footer}, methods, {psnr_series});
  write_bar_chart_svg(ssim_svg, PlotText{"SSIM vs reference dose", "method", "SSIM", footer}, methods, {ssim_series});
  return {csv, psnr_svg, ssim_svg};
}

}  // namespace lcd
