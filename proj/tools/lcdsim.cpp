// lcdsim: command-line front end for the LCD simulation library.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.

#include "lcd/config.hpp"
#include "lcd/denoise.hpp"
#include "lcd/fbp.hpp"
#include "lcd/io.hpp"
#include "lcd/phantom.hpp"
#include "lcd/study.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  int workers = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "JSON config file (keys not given keep their defaults)");
  cmd->add_option("--set", c.overrides, "Override a config value: dotted.key=value")->take_all();
  cmd->add_option("-j,--workers", c.workers, "Worker threads; never changes results")->check(CLI::PositiveNumber);
}

lcd::StudyConfig load(const Common& c) {
  nlohmann::json j = c.config_path.empty() ? nlohmann::json::object() : lcd::load_config_json(c.config_path);
  for (const auto& o : c.overrides) lcd::apply_override(j, o);
  return lcd::study_config_from_json(j);
}

lcd::PhantomSpec phantom_by_name(const std::string& name, const lcd::StudyConfig& cfg) {
  if (name == "cct189") return lcd::build_cct189(cfg.phantom);
  if (name == "water") return lcd::build_uniform_water(cfg.phantom);
  throw lcd::ConfigError("unknown phantom '" + name + "' (expected cct189 or water)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-contrast detectability CT simulation"};
  app.require_subcommand(1);

  Common common;
  std::string phantom_name = "cct189";
  std::string in_path;
  std::string out_path;
  std::string method;
  double dose = 1.0;
  std::uint64_t seed = 0;
  bool noiseless = false;
  int raster_ss = 4;

  auto* phantom = app.add_subcommand("phantom", "Rasterize a phantom to an HU image");
  add_common(phantom, common);
  phantom->add_option("--phantom", phantom_name, "cct189 or water");
  phantom->add_option("--supersample", raster_ss, "Samples per pixel edge")->check(CLI::PositiveNumber);
  phantom->add_option("-o,--out", out_path, "Output stem")->required();

  auto* simulate = app.add_subcommand("simulate", "Forward-project a phantom and add Poisson noise");
  add_common(simulate, common);
  simulate->add_option("--phantom", phantom_name, "cct189 or water");
  simulate->add_option("--dose", dose, "Dose fraction in (0, 1]");
  simulate->add_option("--seed", seed, "Noise seed");
  simulate->add_flag("--noiseless", noiseless, "Write the noiseless sinogram");
  simulate->add_option("-o,--out", out_path, "Output stem")->required();

  auto* recon = app.add_subcommand("recon", "Fan-beam FBP of a sinogram into an HU image");
  add_common(recon, common);
  recon->add_option("-i,--in", in_path, "Sinogram stem")->required();
  recon->add_option("-o,--out", out_path, "Output stem")->required();

  auto* denoise = app.add_subcommand("denoise", "Apply a configured method to an HU image");
  add_common(denoise, common);
  denoise->add_option("-i,--in", in_path, "HU image stem")->required();
  denoise->add_option("-m,--method", method, "fbp, bilateral, tv, or an external method name")->required();
  denoise->add_option("-o,--out", out_path, "Output stem")->required();

  auto* metrics = app.add_subcommand("metrics", "PSNR/SSIM study (simulated or from image files)");
  add_common(metrics, common);
  metrics->add_option("-o,--out", out_path, "Output directory")->required();

  auto* lcd_cmd = app.add_subcommand("lcd", "Dose-sweep LG-CHO detectability study");
  add_common(lcd_cmd, common);
  lcd_cmd->add_option("-o,--out", out_path, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Regenerate plots from an LCD results CSV");
  report->add_option("-i,--in", in_path, "lcd_results.csv")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--out", out_path, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (report->parsed()) {
      for (const auto& p : lcd::emit_report(lcd::read_lcd_csv(in_path), out_path)) std::cout << p.string() << '\n';
      return 0;
    }

    const lcd::StudyConfig cfg = load(common);
    lcd::RunOptions opts;
    opts.workers = common.workers;
    opts.log = &std::cerr;

    if (phantom->parsed()) {
      const lcd::PhantomSpec spec = phantom_by_name(phantom_name, cfg);
      lcd::write_image(out_path, lcd::rasterize(spec, cfg.recon.n, cfg.recon.pixel_mm(), raster_ss),
                       {{"phantom", phantom_name}, {"config_hash", lcd::config_hash(cfg)}});
    } else if (simulate->parsed()) {
      const lcd::PhantomSpec spec = phantom_by_name(phantom_name, cfg);
      lcd::Sinogram sino = lcd::forward_project(spec, cfg.geometry, cfg.mu_water, common.workers);
      if (!noiseless) sino = lcd::apply_poisson_noise(sino, lcd::DoseLevel{dose}, seed, common.workers);
      lcd::write_sinogram(out_path, sino, {{"phantom", phantom_name}, {"config_hash", lcd::config_hash(cfg)}});
    } else if (recon->parsed()) {
      const lcd::Sinogram sino = lcd::read_sinogram(in_path);
      lcd::write_image(out_path, lcd::fbp_fan(sino, cfg.recon, common.workers),
                       {{"apodization", std::string(lcd::to_string(cfg.recon.apodization))},
                        {"config_hash", lcd::config_hash(cfg)}});
    } else if (denoise->parsed()) {
      if (method != "fbp" && method != "bilateral" && method != "tv" && !cfg.external.contains(method)) {
        throw lcd::ConfigError("unknown method '" + method + "'");
      }
      const lcd::ImageGrid img = lcd::read_image(in_path);
      const fs::path exchange = fs::temp_directory_path() / ("lcdsim-denoise-" + lcd::config_hash(cfg));
      lcd::write_image(out_path, lcd::apply_method(method, img, cfg, exchange),
                       {{"method", method}, {"config_hash", lcd::config_hash(cfg)}});
    } else if (metrics->parsed()) {
      opts.work_dir = fs::path(out_path) / "work";
      const lcd::MetricReport rep = lcd::run_metric_study(cfg, opts);
      for (const auto& p : lcd::emit_metric_report(rep, cfg, out_path)) std::cout << p.string() << '\n';
    } else if (lcd_cmd->parsed()) {
      opts.work_dir = fs::path(out_path) / "work";
      const lcd::LcdResult res = lcd::run_lcd_study(cfg, opts);
      for (const auto& p : lcd::emit_report(res, out_path)) std::cout << p.string() << '\n';
    }
    return 0;
  } catch (const lcd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
