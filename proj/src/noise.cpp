#include "lcd/parallel.hpp"
#include "lcd/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace lcd {

std::uint64_t scan_seed(std::uint64_t study_seed, std::uint64_t dose_index, std::uint64_t scan_index) {
  return mix_seed(study_seed, dose_index, scan_index);
}

Sinogram apply_poisson_noise(const Sinogram& clean, const DoseLevel& dose, std::uint64_t seed, int workers) {
  const double flux = dose.flux_i0();
  if (!(flux > 0.0)) throw std::invalid_argument("poisson noise: flux must be positive");
  if (!(dose.fraction > 0.0 && dose.fraction <= 1.0)) throw std::invalid_argument("poisson noise: dose fraction must lie in (0, 1]");

  Sinogram noisy = clean;
  noisy.seed = seed;
  noisy.flux_i0 = flux;
  const Eigen::Index n_channels = clean.data.cols();
  const double log_flux = std::log(flux);
  parallel_for(static_cast<std::size_t>(clean.data.rows()), workers, [&](std::size_t v) {
    const auto view = static_cast<Eigen::Index>(v);
    for (Eigen::Index c = 0; c < n_channels; ++c) {
      const auto entry = static_cast<std::uint64_t>(view * n_channels + c);
      SplitMix64 rng(mix_seed(seed, entry));
      std::poisson_distribution<long long> counts(flux * std::exp(-clean.data(view, c)));
      const long long n = std::max(counts(rng), 1LL);
      noisy.data(view, c) = log_flux - std::log(static_cast<double>(n));
    }
  });
  return noisy;
}

}  // namespace lcd
