#include "lcd/external.hpp"
#include "lcd/io.hpp"

#include <csignal>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

namespace lcd {

namespace fs = std::filesystem;

std::string expand_command(const std::string& tmpl, const std::string& in, const std::string& out) {
  std::string result;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl.compare(i, 4, "{in}") == 0) {
      result += in;
      i += 4;
    } else if (tmpl.compare(i, 5, "{out}") == 0) {
      result += out;
      i += 5;
    } else {
      result += tmpl[i++];
    }
  }
  return result;
}

namespace {

std::mutex& directory_mutex(const fs::path& dir) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::unique_ptr<std::mutex>> registry;
  std::lock_guard lock(registry_mutex);
  auto& slot = registry[fs::weakly_canonical(dir).string()];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char ch : s) {
    if (ch == '\'') q += "'\\''";
    else q += ch;
  }
  return q + "'";
}

// Runs `command` through /bin/sh in its own process group; returns the exit status.
int run_with_timeout(const std::string& command, std::chrono::milliseconds timeout) {
  const pid_t pid = fork();
  if (pid < 0) throw ExternalCommandFailed("fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int status = 0;
  while (true) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) throw ExternalCommandFailed("waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw ExternalTimeout("external denoiser exceeded " + std::to_string(timeout.count()) + " ms: " + command);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

}  // namespace

ImageGrid external_denoise(const ImageGrid& img, const ExternalDenoiserConfig& cfg, ExternalProvenance* provenance) {
  if (cfg.command.empty()) throw std::invalid_argument("external denoiser: empty command template");
  fs::create_directories(cfg.exchange_dir);
  std::lock_guard lock(directory_mutex(cfg.exchange_dir));

  const fs::path in_stem = cfg.exchange_dir / "input";
  const fs::path out_stem = cfg.exchange_dir / "output";
  const auto out_paths = artifact_paths(out_stem);
  fs::remove(out_paths.raw);
  fs::remove(out_paths.hdr);
  write_image(in_stem, img);

  const std::string command = expand_command(cfg.command, quote(in_stem.string()), quote(out_stem.string()));
  const int code = run_with_timeout(command, cfg.timeout);
  if (code != 0) throw ExternalCommandFailed("external denoiser exited with status " + std::to_string(code) + ": " + command);
  if (!fs::exists(out_paths.raw) || !fs::exists(out_paths.hdr)) {
    throw ExternalCommandFailed("external denoiser produced no output: " + command);
  }

  Header h;
  ImageGrid out;
  try {
    out = read_image(out_stem, &h);
  } catch (const ShapeError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExternalCommandFailed(std::string("external denoiser output unreadable: ") + e.what());
  }
  if (out.values.rows() != img.values.rows() || out.values.cols() != img.values.cols()) {
    throw ShapeError("external denoiser returned " + std::to_string(out.values.rows()) + " x " +
                     std::to_string(out.values.cols()) + ", expected " + std::to_string(img.values.rows()) + " x " +
                     std::to_string(img.values.cols()));
  }
  if (out.unit != img.unit) throw ShapeError("external denoiser changed the unit tag");
  if (!all_finite(out.values)) throw NonFiniteOutput("external denoiser returned non-finite values");

  if (provenance) {
    provenance->command = command;
    std::uint64_t hash = 0;
    try {
      hash = std::stoull(h.at("payload_fnv1a64"), nullptr, 16);
    } catch (const std::exception&) {
      // Foreign writers may omit the hash; fall back to hashing what we read.
      const std::vector<float> f(out.values.data(), out.values.data() + out.values.size());
      hash = fnv1a64(std::span(reinterpret_cast<const unsigned char*>(f.data()), f.size() * sizeof(float)));
    }
    provenance->output_hash = hash;
  }
  out.pixel_mm = img.pixel_mm;
  return out;
}

}  // namespace lcd
