#include "lcd/config.hpp"
#include "lcd/io.hpp"

#include <cmath>
#include <fstream>

namespace lcd {

using nlohmann::json;

void StudyConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (doses.empty()) fail("doses: at least one dose fraction is required");
  for (double d : doses) {
    if (!(d > 0.0 && d <= 1.0)) fail("doses: every fraction must lie in (0, 1]");
  }
  if (n_sp_scans < 1 || n_water_scans < 1) fail("scan counts must be positive");
  if (methods.empty()) fail("methods: at least one method is required");
  for (const auto& m : methods) {
    if (m != "fbp" && m != "bilateral" && m != "tv" && !external.contains(m)) {
      fail("methods: '" + m + "' is neither built in nor defined under external");
    }
  }
  if (observer.channels < 1 || observer.roi_side < 4 || observer.repeats < 1) fail("observer: bad channel/ROI/repeat settings");
  if (!(observer.width_factor > 0.0)) fail("observer.width_factor must be positive");
  if (observer.sa_offsets_deg.empty()) fail("observer.sa_offsets_deg must not be empty");
  if (region_margin_px < 0) fail("recon.region_margin_px must be non-negative");
  if (metrics.n_slices < 2) fail("metrics.n_slices must be at least 2");
  try {
    geometry.validate();
    recon.validate();
    normalization.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

int StudyConfig::effective_train_pairs() const {
  if (n_sp_scans == observer.reference_sp_scans) return observer.train_pairs;
  return std::max(2, static_cast<int>(std::lround(static_cast<double>(observer.train_pairs) * n_sp_scans /
                                                  observer.reference_sp_scans)));
}

json to_json(const StudyConfig& c) {
  json ext = json::object();
  for (const auto& [name, m] : c.external) ext[name] = {{"command", m.command}, {"timeout_s", m.timeout_s}};
  return json{
      {"study_seed", c.study_seed},
      {"doses", c.doses},
      {"n_sp_scans", c.n_sp_scans},
      {"n_water_scans", c.n_water_scans},
      {"phantom",
       {{"background_radius_mm", c.phantom.background_radius_mm},
        {"insert_ring_radius_mm", c.phantom.insert_ring_radius_mm},
        {"insert_angles_deg", c.phantom.insert_angles_deg},
        {"mu_water", c.mu_water}}},
      {"geometry",
       {{"src_to_iso_mm", c.geometry.src_to_iso_mm},
        {"src_to_det_mm", c.geometry.src_to_det_mm},
        {"n_views", c.geometry.n_views},
        {"n_channels", c.geometry.n_channels},
        {"det_pitch_mm", c.geometry.det_pitch_mm}}},
      {"recon",
       {{"n", c.recon.n},
        {"fov_mm", c.recon.fov_mm},
        {"apodization", std::string(to_string(c.recon.apodization))},
        {"cutoff_fraction", c.recon.cutoff_fraction},
        {"full_image", c.full_image},
        {"region_margin_px", c.region_margin_px}}},
      {"normalization", {{"lo_hu", c.normalization.lo_hu}, {"hi_hu", c.normalization.hi_hu}}},
      {"methods", c.methods},
      {"denoisers",
       {{"bilateral",
         {{"window", c.bilateral.window},
          {"sigma_color", c.bilateral.sigma_color},
          {"sigma_spatial", c.bilateral.sigma_spatial}}},
        {"tv", {{"lambda", c.tv.lambda}, {"max_iters", c.tv.max_iters}, {"tol", c.tv.tol}}},
        {"external", ext}}},
      {"observer",
       {{"channels", c.observer.channels},
        {"width_factor", c.observer.width_factor},
        {"roi_side", c.observer.roi_side},
        {"sa_offsets_deg", c.observer.sa_offsets_deg},
        {"train_pairs", c.observer.train_pairs},
        {"reference_sp_scans", c.observer.reference_sp_scans},
        {"repeats", c.observer.repeats}}},
      {"metrics",
       {{"mode", c.metrics.mode},
        {"n_slices", c.metrics.n_slices},
        {"reference_dose", c.metrics.reference_dose},
        {"test_dose", c.metrics.test_dose},
        {"ref_dir", c.metrics.ref_dir},
        {"test_dirs", c.metrics.test_dirs},
        {"ssim",
         {{"window", c.metrics.ssim.window},
          {"sigma", c.metrics.ssim.sigma},
          {"k1", c.metrics.ssim.k1},
          {"k2", c.metrics.ssim.k2},
          {"data_range", c.metrics.ssim.data_range}}}}},
      {"save_rois", c.save_rois},
  };
}

namespace {

// Copies j[key] into `out` when present; type errors become ConfigError naming the key.
template <typename T>
void read(const json& j, const char* key, T& out, const std::string& path) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + path + key + "': " + e.what());
  }
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError(std::string("config key '") + key + "' must be an object");
  return j.at(key);
}

void check_known_keys(const json& j, const json& reference, const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    if (!reference.contains(key)) throw ConfigError("unknown config key '" + path + key + "'");
    const json& ref = reference.at(key);
    // Free-form maps keyed by user-chosen names.
    if (key == "external" || key == "test_dirs") continue;
    if (value.is_object() && ref.is_object()) check_known_keys(value, ref, path + key + ".");
  }
}

}  // namespace

StudyConfig study_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  StudyConfig c;
  check_known_keys(j, to_json(c), "");

  read(j, "study_seed", c.study_seed, "");
  read(j, "doses", c.doses, "");
  read(j, "n_sp_scans", c.n_sp_scans, "");
  read(j, "n_water_scans", c.n_water_scans, "");
  read(j, "methods", c.methods, "");
  read(j, "save_rois", c.save_rois, "");

  const json& ph = section(j, "phantom");
  read(ph, "background_radius_mm", c.phantom.background_radius_mm, "phantom.");
  read(ph, "insert_ring_radius_mm", c.phantom.insert_ring_radius_mm, "phantom.");
  read(ph, "insert_angles_deg", c.phantom.insert_angles_deg, "phantom.");
  read(ph, "mu_water", c.mu_water, "phantom.");

  const json& g = section(j, "geometry");
  read(g, "src_to_iso_mm", c.geometry.src_to_iso_mm, "geometry.");
  read(g, "src_to_det_mm", c.geometry.src_to_det_mm, "geometry.");
  read(g, "n_views", c.geometry.n_views, "geometry.");
  read(g, "n_channels", c.geometry.n_channels, "geometry.");
  read(g, "det_pitch_mm", c.geometry.det_pitch_mm, "geometry.");

  const json& r = section(j, "recon");
  read(r, "n", c.recon.n, "recon.");
  read(r, "fov_mm", c.recon.fov_mm, "recon.");
  std::string apod(to_string(c.recon.apodization));
  read(r, "apodization", apod, "recon.");
  try {
    c.recon.apodization = apodization_from_string(apod);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  read(r, "cutoff_fraction", c.recon.cutoff_fraction, "recon.");
  read(r, "full_image", c.full_image, "recon.");
  read(r, "region_margin_px", c.region_margin_px, "recon.");
  c.recon.mu_water = c.mu_water;

  const json& nw = section(j, "normalization");
  read(nw, "lo_hu", c.normalization.lo_hu, "normalization.");
  read(nw, "hi_hu", c.normalization.hi_hu, "normalization.");

  const json& dn = section(j, "denoisers");
  const json& bl = section(dn, "bilateral");
  read(bl, "window", c.bilateral.window, "denoisers.bilateral.");
  read(bl, "sigma_color", c.bilateral.sigma_color, "denoisers.bilateral.");
  read(bl, "sigma_spatial", c.bilateral.sigma_spatial, "denoisers.bilateral.");
  const json& tv = section(dn, "tv");
  read(tv, "lambda", c.tv.lambda, "denoisers.tv.");
  read(tv, "max_iters", c.tv.max_iters, "denoisers.tv.");
  read(tv, "tol", c.tv.tol, "denoisers.tv.");
  for (const auto& [name, spec] : section(dn, "external").items()) {
    if (name == "fbp" || name == "bilateral" || name == "tv") throw ConfigError("external method may not shadow built-in '" + name + "'");
    ExternalMethod m;
    read(spec, "command", m.command, "denoisers.external." + name + ".");
    read(spec, "timeout_s", m.timeout_s, "denoisers.external." + name + ".");
    if (m.command.empty()) throw ConfigError("denoisers.external." + name + ".command is required");
    c.external[name] = m;
  }

  const json& ob = section(j, "observer");
  read(ob, "channels", c.observer.channels, "observer.");
  read(ob, "width_factor", c.observer.width_factor, "observer.");
  read(ob, "roi_side", c.observer.roi_side, "observer.");
  read(ob, "sa_offsets_deg", c.observer.sa_offsets_deg, "observer.");
  read(ob, "train_pairs", c.observer.train_pairs, "observer.");
  read(ob, "reference_sp_scans", c.observer.reference_sp_scans, "observer.");
  read(ob, "repeats", c.observer.repeats, "observer.");

  const json& me = section(j, "metrics");
  read(me, "mode", c.metrics.mode, "metrics.");
  read(me, "n_slices", c.metrics.n_slices, "metrics.");
  read(me, "reference_dose", c.metrics.reference_dose, "metrics.");
  read(me, "test_dose", c.metrics.test_dose, "metrics.");
  read(me, "ref_dir", c.metrics.ref_dir, "metrics.");
  read(me, "test_dirs", c.metrics.test_dirs, "metrics.");
  const json& ss = section(me, "ssim");
  read(ss, "window", c.metrics.ssim.window, "metrics.ssim.");
  read(ss, "sigma", c.metrics.ssim.sigma, "metrics.ssim.");
  read(ss, "k1", c.metrics.ssim.k1, "metrics.ssim.");
  read(ss, "k2", c.metrics.ssim.k2, "metrics.ssim.");
  read(ss, "data_range", c.metrics.ssim.data_range, "metrics.ssim.");

  c.validate();
  return c;
}

json load_config_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("empty path component in override: " + assignment);
    if (!node->is_object()) throw ConfigError("override path crosses a non-object: " + assignment);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

std::string config_hash(const StudyConfig& cfg) { return hex64(fnv1a64(to_json(cfg).dump())); }

}  // namespace lcd
