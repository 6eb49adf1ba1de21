// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero on any failure.
//
//   lcd_acceptance            all criteria
//   lcd_acceptance 3 5        selected criteria

#include "lcd/denoise.hpp"
#include "lcd/fbp.hpp"
#include "lcd/io.hpp"
#include "lcd/observer.hpp"
#include "lcd/parallel.hpp"
#include "lcd/phantom.hpp"
#include "lcd/study.hpp"
#include "oracles.hpp"
#include "small_study.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

using namespace lcd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* pattern, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, v...);
  return buf;
}

Outcome projector_oracle() {
  std::mt19937_64 rng(2023);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto t0 = Clock::now();
  double worst = 0.0;
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    // A disk inside the 100 mm body and a line through a random point near it.
    const Eigen::Vector2d c(60.0 * u(rng), 60.0 * u(rng));
    const double r = 2.0 + 38.0 * (0.5 + 0.5 * u(rng));
    const Eigen::Vector2d through = c + 1.2 * r * Eigen::Vector2d(u(rng), u(rng));
    const Eigen::Vector2d dir = Eigen::Vector2d(u(rng), u(rng)).normalized();
    const Eigen::Vector2d origin = through - 600.0 * dir;

    PhantomSpec spec;
    spec.background = DiskSpec{c.x(), c.y(), r, 0.0};
    const double mu = line_integral(spec, Ray{origin, dir}, kMuWater);
    const double want = kMuWater * oracle::chord_quadratic(origin, dir, c, r);
    if (want == 0.0) {
      if (mu != 0.0) worst = std::max(worst, 1.0);
      continue;
    }
    ++hits;
    worst = std::max(worst, std::abs(mu - want) / want);
  }
  const double t = seconds_since(t0);
  return {worst < 1e-12 && t < 1.0, fmt("max rel err %.2e over %d intersecting rays, %.3f s", worst, hits, t)};
}

double disk_mean(const ImageGrid& img, double cx, double cy, double radius) {
  double sum = 0.0;
  int n = 0;
  for (Eigen::Index r = 0; r < img.size(); ++r) {
    for (Eigen::Index c = 0; c < img.size(); ++c) {
      if (std::hypot(img.x_of(static_cast<double>(c)) - cx, img.y_of(static_cast<double>(r)) - cy) <= radius) {
        sum += img.values(r, c);
        ++n;
      }
    }
  }
  return sum / n;
}

Outcome fbp_accuracy() {
  const StudyConfig cfg;
  const PhantomSpec water = build_uniform_water(cfg.phantom);
  const PhantomSpec cct = build_cct189(cfg.phantom);
  const Sinogram sw = forward_project(water, cfg.geometry);
  const Sinogram sc = forward_project(cct, cfg.geometry);

  const auto t0 = Clock::now();
  const ImageGrid iw = fbp_fan(sw, cfg.recon);
  const double t_recon = seconds_since(t0);
  const ImageGrid ic = fbp_fan(sc, cfg.recon);

  const double water_mean = disk_mean(iw, 0.0, 0.0, 15.0);
  const DiskSpec& big = cct.inserts[3];
  // Insert interior against an equal-size water disk at the same radius, 270 degrees, clear of
  // every insert.
  const double ring = std::hypot(big.center_x_mm, big.center_y_mm);
  const double inside = disk_mean(ic, big.center_x_mm, big.center_y_mm, big.radius_mm - 1.0);
  const double bg = disk_mean(ic, 0.0, -ring, big.radius_mm - 1.0);
  const double contrast = inside - bg;
  const bool pass = std::abs(water_mean) < 5.0 && std::abs(contrast - big.contrast_hu) < 1.5 && t_recon < 30.0;
  return {pass, fmt("water centre %.3f HU; 10 mm insert contrast %.3f HU (target 3); n=512 recon %.2f s", water_mean,
                    contrast, t_recon)};
}

Eigen::MatrixXd gaussian(int rows, int cols, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
  m.row(0).array() += shift;
  return m;
}

// Mean over independent synthetic datasets of 500 samples per class, each split half/half
// into training and test pairs.
Outcome observer_oracle() {
  const double target = oracle::normal_cdf(1.0 / std::sqrt(2.0));
  constexpr int kDatasets = 20;
  double sig = 0.0;
  double null = 0.0;
  for (int k = 0; k < kDatasets; ++k) {
    const auto seed = static_cast<std::uint64_t>(4 * k);
    sig += auc_with_uncertainty(gaussian(5, 500, 1.0, seed + 101), gaussian(5, 500, 0.0, seed + 102),
                                SplitProtocol{250, 10, seed + 7})
               .auc;
    null += auc_with_uncertainty(gaussian(5, 500, 0.0, seed + 103), gaussian(5, 500, 0.0, seed + 104),
                                 SplitProtocol{250, 10, seed + 8})
                .auc;
  }
  sig /= kDatasets;
  null /= kDatasets;
  const bool pass = std::abs(sig - target) < 0.03 && std::abs(null - 0.5) < 0.05;
  return {pass, fmt("mean over %d datasets: d'=1 AUC %.4f vs %.4f; null AUC %.4f", kDatasets, sig, target, null)};
}

Outcome auc_estimator() {
  std::mt19937_64 rng(55);
  int trials = 0;
  int mismatches = 0;
  for (int n1 = 1; n1 <= 200; n1 += 7) {
    for (int n0 : {1, 2, 17, 100, 200}) {
      for (int levels : {2, 5, 50, 1000000}) {
        std::vector<double> sp(static_cast<std::size_t>(n1)), sa(static_cast<std::size_t>(n0));
        for (auto& v : sp) v = static_cast<double>(rng() % static_cast<unsigned>(levels));
        for (auto& v : sa) v = static_cast<double>(rng() % static_cast<unsigned>(levels)) - 0.5 * (levels > 2);
        ++trials;
        mismatches += auc_mann_whitney(sp, sa) != oracle::auc_brute_force(sp, sa);
      }
    }
  }
  return {mismatches == 0, fmt("%d/%d random instances (n <= 200, with ties) equal brute force exactly", trials - mismatches, trials)};
}

Outcome tv_solver() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n01;

  bool monotone = true;
  for (int trial = 0; trial < 20 && monotone; ++trial) {
    Matrix f(24, 24);
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = 0.5 + 0.05 * n01(rng);
    const TvResult r = tv_solve(f, TvParams{0.016 * (1 + trial % 5), 200, 0.0});
    for (std::size_t k = 1; k < r.energy.size(); ++k) monotone = monotone && r.energy[k] <= r.energy[k - 1] + 1e-10;
  }

  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix f(3, 3);
    for (Eigen::Index i = 0; i < 9; ++i) f.data()[i] = u(rng);
    const double lambda = 0.01 + 0.4 * u(rng);
    const Matrix want = oracle::tv_chambolle_projection(f, lambda, 20000);
    worst = std::max(worst, (tv_solve(f, TvParams{lambda, 20000, 0.0}).u - want).cwiseAbs().maxCoeff());
  }

  const TvResult two = tv_solve(Matrix{{0.0, 1.0}}, TvParams{0.2, 5000, 0.0});
  const double two_err = std::max(std::abs(two.u(0, 0) - 0.2), std::abs(two.u(0, 1) - 0.8));
  const bool pass = monotone && worst < 1e-3 && two_err < 1e-9;
  return {pass, fmt("energy monotone: %s; 3x3 max |u - oracle| %.2e; two-point error %.1e", monotone ? "yes" : "no", worst,
                    two_err)};
}

StudyConfig desk_config() {
  StudyConfig cfg;
  cfg.n_sp_scans = 50;
  cfg.n_water_scans = 25;
  cfg.doses = {0.25, 1.0};
  return cfg;
}

Outcome trend(int workers) {
  const StudyConfig cfg = desk_config();
  const auto t0 = Clock::now();
  const LcdResult res = run_lcd_study(cfg, RunOptions{workers, nullptr, fs::temp_directory_path() / "lcd_acceptance_desk"});
  const double t = seconds_since(t0);
  auto find = [&](const std::string& m, double dose, int insert) -> const LcdRow& {
    for (const auto& r : res.rows) {
      if (r.method == m && r.dose == dose && r.insert == insert) return r;
    }
    throw std::logic_error("missing row");
  };
  const LcdRow& lo = find("fbp", 0.25, 0);
  const LcdRow& hi = find("fbp", 1.0, 0);
  const double pooled = std::sqrt(0.5 * (lo.auc_std * lo.auc_std + hi.auc_std * hi.auc_std));
  const bool a = hi.auc - lo.auc > pooled;
  bool b = true;
  std::string worst;
  for (int ins = 0; ins < 4; ++ins) {
    const double ref = find("fbp", 1.0, ins).auc;
    for (const char* m : {"bilateral", "tv"}) {
      const double q = find(m, 0.25, ins).auc;
      if (q > ref) {
        b = false;
        worst += fmt(" %s/insert%d %.4f > %.4f;", m, ins, q, ref);
      }
    }
  }
  const double bil = find("bilateral", 0.25, 0).auc;
  const double tv = find("tv", 0.25, 0).auc;
  const bool pass = a && b && t < 600.0;
  return {pass, fmt("3 mm insert FBP AUC %.4f (25%%) -> %.4f (100%%), gap %.4f vs pooled std %.4f; quarter-dose bilateral "
                    "%.4f, TV %.4f <= normal FBP %.4f (all inserts checked)%s; %.1f s",
                    lo.auc, hi.auc, hi.auc - lo.auc, pooled, bil, tv, hi.auc, worst.c_str(), t)};
}

Outcome metric_direction(int workers) {
  StudyConfig cfg;
  cfg.metrics.n_slices = 10;
  const auto t0 = Clock::now();
  const MetricReport rep = run_metric_study(cfg, RunOptions{workers, nullptr, fs::temp_directory_path() / "lcd_acceptance_metrics"});
  const double t = seconds_since(t0);
  const MethodSummary* fbp = nullptr;
  const MethodSummary* bil = nullptr;
  const MethodSummary* tv = nullptr;
  for (const auto& r : rep.rows) {
    if (r.method == "fbp") fbp = &r;
    if (r.method == "bilateral") bil = &r;
    if (r.method == "tv") tv = &r;
  }
  const bool pass = fbp && bil && tv && bil->psnr_mean > fbp->psnr_mean && tv->psnr_mean > fbp->psnr_mean &&
                    bil->ssim_mean > fbp->ssim_mean && tv->ssim_mean > fbp->ssim_mean && fbp->n_slices >= 10;
  return {pass, fmt("PSNR fbp %.2f, bilateral %.2f, tv %.2f dB; SSIM fbp %.4f, bilateral %.4f, tv %.4f (%d slices, %.1f s)",
                    fbp->psnr_mean, bil->psnr_mean, tv->psnr_mean, fbp->ssim_mean, bil->ssim_mean, tv->ssim_mean,
                    fbp->n_slices, t)};
}

Outcome determinism() {
  const StudyConfig cfg = testcfg::small_study();
  std::set<std::string> lcd_csvs, metric_csvs;
  for (int workers : {1, 4, 8}) {
    const fs::path out = fs::temp_directory_path() / ("lcd_acceptance_det_" + std::to_string(workers));
    fs::remove_all(out);
    RunOptions opts{workers, nullptr, out / "work"};
    emit_report(run_lcd_study(cfg, opts), out);
    emit_metric_report(run_metric_study(cfg, opts), cfg, out);
    for (auto [name, set] : {std::pair{"lcd_results.csv", &lcd_csvs}, std::pair{"metrics.csv", &metric_csvs}}) {
      std::ifstream in(out / name, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      set->insert(ss.str());
    }
  }
  const bool pass = lcd_csvs.size() == 1 && metric_csvs.size() == 1 && !lcd_csvs.begin()->empty();
  return {pass, fmt("distinct lcd_results.csv: %zu, distinct metrics.csv: %zu across workers {1, 4, 8}", lcd_csvs.size(),
                    metric_csvs.size())};
}

}  // namespace

int main(int argc, char** argv) {
  const int workers = std::max(1u, std::thread::hardware_concurrency());
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"projector oracle", projector_oracle},
      {"FBP accuracy", fbp_accuracy},
      {"observer oracle", observer_oracle},
      {"AUC estimator", auc_estimator},
      {"TV solver", tv_solver},
      {"desk-scale trend", [&] { return trend(workers); }},
      {"metric direction", [&] { return metric_direction(workers); }},
      {"determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.contains(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << criteria[i].first << " -- " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
