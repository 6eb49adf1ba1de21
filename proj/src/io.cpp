#include "lcd/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lcd {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "raw artifacts assume a little-endian host");

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t h) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text) {
  return fnv1a64(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

ArtifactPaths artifact_paths(const fs::path& stem) {
  fs::path base = stem;
  if (base.extension() == ".raw" || base.extension() == ".hdr") base.replace_extension();
  fs::path raw = base;
  fs::path hdr = base;
  raw += ".raw";
  hdr += ".hdr";
  return {raw, hdr};
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::string& require(const Header& h, const std::string& key) {
  const auto it = h.find(key);
  if (it == h.end()) throw std::runtime_error("header is missing key '" + key + "'");
  return it->second;
}

double require_double(const Header& h, const std::string& key) { return std::stod(require(h, key)); }
long long require_int(const Header& h, const std::string& key) { return std::stoll(require(h, key)); }

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Header read_header(const fs::path& hdr_path) {
  std::ifstream in(hdr_path);
  if (!in) throw std::runtime_error("cannot open header " + hdr_path.string());
  Header h;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!trim(line).empty()) throw std::runtime_error("malformed header line in " + hdr_path.string() + ": " + line);
      continue;
    }
    h[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return h;
}

void write_header(const fs::path& hdr_path, const Header& header) {
  std::ofstream out(hdr_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write header " + hdr_path.string());
  for (const auto& [k, v] : header) out << k << " = " << v << '\n';
  if (!out) throw std::runtime_error("write failed: " + hdr_path.string());
}

std::uint64_t write_raw(const fs::path& stem, const Matrix& values, Header header) {
  const auto paths = artifact_paths(stem);
  if (paths.raw.has_parent_path()) fs::create_directories(paths.raw.parent_path());
  std::vector<float> buf(static_cast<std::size_t>(values.size()));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      buf[static_cast<std::size_t>(r * values.cols() + c)] = static_cast<float>(values(r, c));
    }
  }
  const std::span bytes(reinterpret_cast<const unsigned char*>(buf.data()), buf.size() * sizeof(float));
  {
    std::ofstream out(paths.raw, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + paths.raw.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + paths.raw.string());
  }
  const std::uint64_t hash = fnv1a64(bytes);
  header["format"] = "lcd-raw-1";
  header["dtype"] = "float32le";
  header["rows"] = std::to_string(values.rows());
  header["cols"] = std::to_string(values.cols());
  header["payload_fnv1a64"] = hex64(hash);
  write_header(paths.hdr, header);
  return hash;
}

Matrix read_raw(const fs::path& stem, Header* header_out) {
  const auto paths = artifact_paths(stem);
  Header h = read_header(paths.hdr);
  if (require(h, "dtype") != "float32le") throw std::runtime_error("unsupported dtype in " + paths.hdr.string());
  const auto rows = require_int(h, "rows");
  const auto cols = require_int(h, "cols");
  if (rows <= 0 || cols <= 0) throw std::runtime_error("bad dimensions in " + paths.hdr.string());
  std::vector<float> buf(static_cast<std::size_t>(rows * cols));
  std::ifstream in(paths.raw, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + paths.raw.string());
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)) || in.peek() != std::char_traits<char>::eof()) {
    throw ShapeError("payload size of " + paths.raw.string() + " does not match its header (" + std::to_string(rows) +
                     " x " + std::to_string(cols) + ")");
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = buf[static_cast<std::size_t>(r * cols + c)];
  }
  if (header_out) *header_out = std::move(h);
  return m;
}

void write_image(const fs::path& stem, const ImageGrid& img, const Header& extra) {
  Header h = extra;
  h["kind"] = "image";
  h["unit"] = std::string(to_string(img.unit));
  h["pixel_mm"] = fmt_double(img.pixel_mm);
  write_raw(stem, img.values, std::move(h));
}

ImageGrid read_image(const fs::path& stem, Header* header_out) {
  Header h;
  Matrix m = read_raw(stem, &h);
  if (require(h, "kind") != "image") throw std::runtime_error(stem.string() + " is not an image artifact");
  if (m.rows() != m.cols()) throw ShapeError(stem.string() + ": images must be square");
  ImageGrid img(std::move(m), require_double(h, "pixel_mm"), unit_from_string(require(h, "unit")));
  if (header_out) *header_out = std::move(h);
  return img;
}

void write_sinogram(const fs::path& stem, const Sinogram& sino, const Header& extra) {
  Header h = extra;
  const auto& g = sino.geometry;
  h["kind"] = "sinogram";
  h["unit"] = "line_integral";
  h["src_to_iso_mm"] = fmt_double(g.src_to_iso_mm);
  h["src_to_det_mm"] = fmt_double(g.src_to_det_mm);
  h["n_views"] = std::to_string(g.n_views);
  h["n_channels"] = std::to_string(g.n_channels);
  h["det_pitch_mm"] = fmt_double(g.det_pitch_mm);
  h["seed"] = std::to_string(sino.seed);
  h["flux_i0"] = fmt_double(sino.flux_i0);
  write_raw(stem, sino.data, std::move(h));
}

Sinogram read_sinogram(const fs::path& stem, Header* header_out) {
  Header h;
  Sinogram s;
  s.data = read_raw(stem, &h);
  if (require(h, "kind") != "sinogram") throw std::runtime_error(stem.string() + " is not a sinogram artifact");
  s.geometry.src_to_iso_mm = require_double(h, "src_to_iso_mm");
  s.geometry.src_to_det_mm = require_double(h, "src_to_det_mm");
  s.geometry.n_views = static_cast<int>(require_int(h, "n_views"));
  s.geometry.n_channels = static_cast<int>(require_int(h, "n_channels"));
  s.geometry.det_pitch_mm = require_double(h, "det_pitch_mm");
  s.seed = std::stoull(require(h, "seed"));
  s.flux_i0 = require_double(h, "flux_i0");
  if (s.data.rows() != s.geometry.n_views || s.data.cols() != s.geometry.n_channels) {
    throw ShapeError(stem.string() + ": payload shape does not match its geometry");
  }
  if (header_out) *header_out = std::move(h);
  return s;
}

void write_roi_set(const fs::path& dir, std::span<const Roi> rois) {
  if (rois.empty()) throw std::invalid_argument("write_roi_set: no ROIs");
  const Eigen::Index p = rois.front().patch.rows();
  Matrix stacked(p * static_cast<Eigen::Index>(rois.size()), p);
  for (std::size_t i = 0; i < rois.size(); ++i) {
    if (rois[i].patch.rows() != p || rois[i].patch.cols() != p) throw ShapeError("write_roi_set: patch sizes differ");
    stacked.middleRows(static_cast<Eigen::Index>(i) * p, p) = rois[i].patch;
  }
  fs::create_directories(dir);
  write_raw(dir / "patches", stacked, Header{{"kind", "roi_set"}, {"unit", "HU"}, {"patch_side", std::to_string(p)},
                                             {"count", std::to_string(rois.size())}});
  std::ofstream manifest(dir / "manifest.csv", std::ios::trunc);
  manifest << "index,label,insert,scan_id,center_row,center_col\n";
  for (std::size_t i = 0; i < rois.size(); ++i) {
    const auto& r = rois[i];
    manifest << i << ',' << to_string(r.label) << ',' << r.insert_index << ',' << r.scan_id << ','
             << fmt_double(r.center.row) << ',' << fmt_double(r.center.col) << '\n';
  }
  if (!manifest) throw std::runtime_error("write failed: " + (dir / "manifest.csv").string());
}

std::vector<Roi> read_roi_set(const fs::path& dir) {
  Header h;
  const Matrix stacked = read_raw(dir / "patches", &h);
  const auto p = static_cast<Eigen::Index>(require_int(h, "patch_side"));
  const auto count = static_cast<std::size_t>(require_int(h, "count"));
  if (stacked.cols() != p || stacked.rows() != p * static_cast<Eigen::Index>(count)) {
    throw ShapeError("ROI set payload does not match its header");
  }
  std::ifstream manifest(dir / "manifest.csv");
  if (!manifest) throw std::runtime_error("cannot open " + (dir / "manifest.csv").string());
  std::string line;
  std::getline(manifest, line);
  std::vector<Roi> rois;
  while (std::getline(manifest, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw std::runtime_error("malformed manifest row: " + line);
    const auto idx = static_cast<Eigen::Index>(std::stoll(f[0]));
    if (idx < 0 || static_cast<std::size_t>(idx) >= count) throw std::runtime_error("manifest index out of range: " + line);
    rois.push_back(Roi{stacked.middleRows(idx * p, p), roi_label_from_string(f[1]), std::stoi(f[2]), std::stoll(f[3]),
                       PixelCenter{std::stod(f[4]), std::stod(f[5])}});
  }
  if (rois.size() != count) throw std::runtime_error("manifest row count does not match the patch count");
  return rois;
}

}  // namespace lcd
