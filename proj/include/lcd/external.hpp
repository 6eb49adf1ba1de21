#pragma once

#include "lcd/image.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace lcd {

/// Command template with {in} and {out} placeholders, e.g. "python3 bm3d.py {in} {out}".
/// Images travel in the raw+sidecar format of lcd/io.hpp.
struct ExternalDenoiserConfig {
  std::string command;
  std::filesystem::path exchange_dir;
  std::chrono::milliseconds timeout{std::chrono::minutes(10)};
};

struct ExternalProvenance {
  std::string command;     // the expanded command line
  std::uint64_t output_hash = 0;  // FNV-1a 64 of the returned raw payload
};

class ExternalTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExternalCommandFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteOutput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `img`, runs the command, reads back the result. Calls that share an exchange
/// directory are serialized. Errors: ExternalTimeout, ExternalCommandFailed (non-zero exit
/// or missing output), ShapeError (size or unit changed), NonFiniteOutput.
ImageGrid external_denoise(const ImageGrid& img, const ExternalDenoiserConfig& cfg,
                           ExternalProvenance* provenance = nullptr);

/// Replaces every {in} and {out} in `tmpl`.
std::string expand_command(const std::string& tmpl, const std::string& in, const std::string& out);

}  // namespace lcd
