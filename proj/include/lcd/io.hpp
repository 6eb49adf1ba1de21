#pragma once

#include "lcd/image.hpp"
#include "lcd/observer.hpp"
#include "lcd/phantom.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lcd {

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t v);

/// Sidecar header: one "key = value" per line, '#' starts a comment.
using Header = std::map<std::string, std::string>;

/// `stem` may name the .raw, the .hdr, or neither; both paths are derived from it.
struct ArtifactPaths {
  std::filesystem::path raw;
  std::filesystem::path hdr;
};
ArtifactPaths artifact_paths(const std::filesystem::path& stem);

/// Row-major little-endian float32 payload plus sidecar. Returns the FNV-1a hash of the payload.
std::uint64_t write_raw(const std::filesystem::path& stem, const Matrix& values, Header header);
Matrix read_raw(const std::filesystem::path& stem, Header* header_out = nullptr);

Header read_header(const std::filesystem::path& hdr_path);
void write_header(const std::filesystem::path& hdr_path, const Header& header);

void write_image(const std::filesystem::path& stem, const ImageGrid& img, const Header& extra = {});
ImageGrid read_image(const std::filesystem::path& stem, Header* header_out = nullptr);

void write_sinogram(const std::filesystem::path& stem, const Sinogram& sino, const Header& extra = {});
Sinogram read_sinogram(const std::filesystem::path& stem, Header* header_out = nullptr);

/// Directory holding patches.raw/patches.hdr (all patches stacked vertically) and manifest.csv
/// with columns index,label,insert,scan_id,center_row,center_col.
void write_roi_set(const std::filesystem::path& dir, std::span<const Roi> rois);
std::vector<Roi> read_roi_set(const std::filesystem::path& dir);

}  // namespace lcd
