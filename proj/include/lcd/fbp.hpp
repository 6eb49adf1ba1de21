#pragma once

#include "lcd/image.hpp"
#include "lcd/phantom.hpp"

#include <complex>
#include <span>
#include <vector>

namespace lcd {

enum class Apodization { Ramp, Hann };

std::string_view to_string(Apodization apod);
Apodization apodization_from_string(std::string_view text);

struct ReconParams {
  int n = 512;
  double fov_mm = 260.0;
  Apodization apodization = Apodization::Hann;
  double cutoff_fraction = 1.0;  // of the detector Nyquist frequency
  double mu_water = kMuWater;

  double pixel_mm() const { return fov_mm / static_cast<double>(n); }
  void validate() const;
};

/// Sampled band-limited ramp kernel: h[0] = 1/(4 d^2), h[k] = -1/(k pi d)^2 for odd k, 0 for even k.
double ramp_kernel_tap(long k, double spacing);

/// Ramp filter for rows of fixed length. The spatial kernel is transformed once, the
/// apodization window is applied to its spectrum, and rows are filtered by zero-padded
/// FFT convolution (padding >= 2n so the result equals the linear convolution).
class RampFilter {
 public:
  RampFilter(int row_length, double spacing, Apodization apod, double cutoff_fraction);

  std::vector<double> apply(std::span<const double> row) const;
  void apply(std::span<const double> row, std::span<double> out) const;

  int padded_length() const { return static_cast<int>(response_.size()); }
  /// Real frequency response (including the apodization window), FFT bin order.
  const std::vector<double>& response() const { return response_; }

 private:
  int row_length_;
  double spacing_;
  std::vector<double> response_;
};

/// Convenience one-shot wrapper around RampFilter.
std::vector<double> ramp_filter_row(std::span<const double> row, double spacing, Apodization apod,
                                    double cutoff_fraction = 1.0);

/// Flat-detector fan-beam FBP in attenuation units (mm^-1).
ImageGrid fbp_fan_mu(const Sinogram& sino, const ReconParams& params, int workers = 1);

/// Rectangular block of pixel indices on an n x n lattice.
struct PixelRegion {
  int row0 = 0;
  int col0 = 0;
  int rows = 0;
  int cols = 0;
};

/// Reconstructs only the pixels of `region` of the params.n lattice (mm^-1). Values are
/// bit-identical to the same block of fbp_fan_mu.
Matrix fbp_fan_mu_region(const Sinogram& sino, const ReconParams& params, const PixelRegion& region, int workers = 1);

/// Several regions sharing one filtering pass.
std::vector<Matrix> fbp_fan_mu_regions(const Sinogram& sino, const ReconParams& params,
                                       std::span<const PixelRegion> regions, int workers = 1);

/// Same reconstruction converted to HU.
ImageGrid fbp_fan(const Sinogram& sino, const ReconParams& params, int workers = 1);

}  // namespace lcd
