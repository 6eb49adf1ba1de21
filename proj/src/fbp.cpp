#include "lcd/fbp.hpp"
#include "lcd/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lcd {

std::string_view to_string(Apodization apod) { return apod == Apodization::Ramp ? "ramp" : "hann"; }

Apodization apodization_from_string(std::string_view text) {
  if (text == "ramp") return Apodization::Ramp;
  if (text == "hann") return Apodization::Hann;
  throw std::invalid_argument("unknown apodization: " + std::string(text));
}

void ReconParams::validate() const {
  if (n <= 0) throw std::invalid_argument("recon: n must be positive");
  if (!(fov_mm > 0.0)) throw std::invalid_argument("recon: fov_mm must be positive");
  if (!(cutoff_fraction > 0.0 && cutoff_fraction <= 1.0)) throw std::invalid_argument("recon: cutoff must lie in (0, 1]");
}

double ramp_kernel_tap(long k, double spacing) {
  if (k == 0) return 1.0 / (4.0 * spacing * spacing);
  if (k % 2 == 0) return 0.0;
  const double denom = static_cast<double>(k) * std::numbers::pi * spacing;
  return -1.0 / (denom * denom);
}

namespace {

int next_pow2(int v) {
  int p = 1;
  while (p < v) p <<= 1;
  return p;
}

}  // namespace

RampFilter::RampFilter(int row_length, double spacing, Apodization apod, double cutoff_fraction)
    : row_length_(row_length), spacing_(spacing) {
  if (row_length <= 0 || !(spacing > 0.0)) throw std::invalid_argument("ramp filter: bad row length or spacing");
  if (!(cutoff_fraction > 0.0 && cutoff_fraction <= 1.0)) throw std::invalid_argument("ramp filter: cutoff must lie in (0, 1]");

  const int m = next_pow2(2 * row_length);
  std::vector<double> kernel(static_cast<std::size_t>(m), 0.0);
  for (int k = 0; k < m / 2; ++k) {
    kernel[static_cast<std::size_t>(k)] = ramp_kernel_tap(k, spacing);
    if (k > 0) kernel[static_cast<std::size_t>(m - k)] = ramp_kernel_tap(k, spacing);
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, kernel);

  response_.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double nu = static_cast<double>(std::min(j, m - j)) / (0.5 * m);  // 1 at Nyquist
    double window = nu <= cutoff_fraction ? 1.0 : 0.0;
    if (apod == Apodization::Hann && window > 0.0) window = 0.5 * (1.0 + std::cos(std::numbers::pi * nu / cutoff_fraction));
    // The kernel is real and even, so its spectrum is real.
    response_[static_cast<std::size_t>(j)] = spectrum[static_cast<std::size_t>(j)].real() * window;
  }
}

void RampFilter::apply(std::span<const double> row, std::span<double> out) const {
  if (static_cast<int>(row.size()) != row_length_ || out.size() != row.size()) {
    throw ShapeError("ramp filter: row length mismatch");
  }
  const std::size_t m = response_.size();
  std::vector<double> padded(m, 0.0);
  std::copy(row.begin(), row.end(), padded.begin());

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);
  for (std::size_t j = 0; j < m; ++j) spectrum[j] *= response_[j];
  fft.inv(padded, spectrum);
  for (std::size_t i = 0; i < row.size(); ++i) out[i] = spacing_ * padded[i];
}

std::vector<double> RampFilter::apply(std::span<const double> row) const {
  std::vector<double> out(row.size());
  apply(row, out);
  return out;
}

std::vector<double> ramp_filter_row(std::span<const double> row, double spacing, Apodization apod,
                                    double cutoff_fraction) {
  return RampFilter(static_cast<int>(row.size()), spacing, apod, cutoff_fraction).apply(row);
}

namespace {

struct FilteredSinogram {
  static constexpr int guard = 2;  // zero cells on each side keep interpolation branch-free
  std::vector<double> data;
  int stride = 0;
};

FilteredSinogram filter_views(const Sinogram& sino, const ReconParams& params, int workers) {
  params.validate();
  const FanBeamGeometry& g = sino.geometry;
  g.validate();
  if (sino.data.rows() != g.n_views || sino.data.cols() != g.n_channels) {
    throw ShapeError("fbp: sinogram dimensions do not match its geometry");
  }
  const int n_ch = g.n_channels;
  const double d_iso = g.src_to_iso_mm;
  const double virt_pitch = g.det_pitch_mm * d_iso / g.src_to_det_mm;
  const double half = 0.5 * static_cast<double>(n_ch - 1);

  FilteredSinogram out;
  out.stride = n_ch + 2 * FilteredSinogram::guard;
  out.data.assign(static_cast<std::size_t>(g.n_views) * static_cast<std::size_t>(out.stride), 0.0);
  const RampFilter filter(n_ch, virt_pitch, params.apodization, params.cutoff_fraction);
  std::vector<double> cos_weight(static_cast<std::size_t>(n_ch));
  for (int c = 0; c < n_ch; ++c) {
    const double s = (static_cast<double>(c) - half) * virt_pitch;
    cos_weight[static_cast<std::size_t>(c)] = d_iso / std::sqrt(d_iso * d_iso + s * s);
  }
  parallel_for(static_cast<std::size_t>(g.n_views), workers, [&](std::size_t v) {
    std::vector<double> weighted(static_cast<std::size_t>(n_ch));
    for (int c = 0; c < n_ch; ++c) {
      weighted[static_cast<std::size_t>(c)] =
          sino.data(static_cast<Eigen::Index>(v), c) * cos_weight[static_cast<std::size_t>(c)];
    }
    double* row = out.data.data() + v * static_cast<std::size_t>(out.stride) + FilteredSinogram::guard;
    filter.apply(weighted, std::span<double>(row, static_cast<std::size_t>(n_ch)));
  });
  return out;
}

// Pixel-driven backprojection onto the pixels of `region` of the n x n recon lattice.
Matrix backproject(const FilteredSinogram& filtered, const FanBeamGeometry& g, const ReconParams& params,
                   const PixelRegion& region, int workers) {
  const int n_views = g.n_views;
  const double d_iso = g.src_to_iso_mm;
  const double inv_pitch = g.src_to_det_mm / (g.det_pitch_mm * d_iso);
  const double half = 0.5 * static_cast<double>(g.n_channels - 1);
  const double lo = -1.0;
  const double hi = static_cast<double>(g.n_channels);
  constexpr double guard = FilteredSinogram::guard;

  std::vector<double> cos_beta(static_cast<std::size_t>(n_views));
  std::vector<double> sin_beta(static_cast<std::size_t>(n_views));
  for (int v = 0; v < n_views; ++v) {
    cos_beta[static_cast<std::size_t>(v)] = std::cos(g.view_angle(v));
    sin_beta[static_cast<std::size_t>(v)] = std::sin(g.view_angle(v));
  }

  const ImageGrid lattice(Matrix(params.n, 0), params.pixel_mm(), Unit::MuPerMm);
  // 1/2 from the full-rotation redundancy, d_beta from the angular quadrature.
  const double scale = 0.5 * 2.0 * std::numbers::pi / static_cast<double>(n_views);
  const auto cols = static_cast<std::size_t>(region.cols);
  std::vector<double> xs(cols);
  for (std::size_t c = 0; c < cols; ++c) xs[c] = lattice.x_of(static_cast<double>(region.col0) + static_cast<double>(c));

  Matrix out(region.rows, region.cols);
  parallel_for(static_cast<std::size_t>(region.rows), workers, [&](std::size_t r) {
    const double y = lattice.y_of(static_cast<double>(region.row0) + static_cast<double>(r));
    std::vector<double> acc(cols, 0.0);
    std::vector<double> pos(cols);
    std::vector<double> weight(cols);
    for (int v = 0; v < n_views; ++v) {
      const double cb = cos_beta[static_cast<std::size_t>(v)];
      const double sb = sin_beta[static_cast<std::size_t>(v)];
      const double* q = filtered.data.data() + static_cast<std::size_t>(v) * static_cast<std::size_t>(filtered.stride);
      const double t_y = y * sb;
      const double w_y = y * cb;
      for (std::size_t c = 0; c < cols; ++c) {
        const double x = xs[c];
        const double du = d_iso / (d_iso - (x * cb + t_y));  // 1/U
        const double w = w_y - x * sb;
        pos[c] = std::clamp(du * w * inv_pitch + half, lo, hi) + guard;
        weight[c] = du * du;
      }
      for (std::size_t c = 0; c < cols; ++c) {
        const auto i0 = static_cast<std::size_t>(pos[c]);
        const double frac = pos[c] - static_cast<double>(i0);
        acc[c] += weight[c] * (q[i0] + frac * (q[i0 + 1] - q[i0]));
      }
    }
    for (std::size_t c = 0; c < cols; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = scale * acc[c];
    }
  });
  return out;
}

}  // namespace

ImageGrid fbp_fan_mu(const Sinogram& sino, const ReconParams& params, int workers) {
  const FilteredSinogram filtered = filter_views(sino, params, workers);
  return ImageGrid(backproject(filtered, sino.geometry, params, PixelRegion{0, 0, params.n, params.n}, workers),
                   params.pixel_mm(), Unit::MuPerMm);
}

std::vector<Matrix> fbp_fan_mu_regions(const Sinogram& sino, const ReconParams& params,
                                       std::span<const PixelRegion> regions, int workers) {
  for (const auto& region : regions) {
    if (region.row0 < 0 || region.col0 < 0 || region.rows <= 0 || region.cols <= 0 ||
        region.row0 + region.rows > params.n || region.col0 + region.cols > params.n) {
      throw ShapeError("fbp: region outside the reconstruction grid");
    }
  }
  const FilteredSinogram filtered = filter_views(sino, params, workers);
  std::vector<Matrix> out;
  out.reserve(regions.size());
  for (const auto& region : regions) out.push_back(backproject(filtered, sino.geometry, params, region, workers));
  return out;
}

Matrix fbp_fan_mu_region(const Sinogram& sino, const ReconParams& params, const PixelRegion& region, int workers) {
  return std::move(fbp_fan_mu_regions(sino, params, std::span(&region, 1), workers).front());
}

ImageGrid fbp_fan(const Sinogram& sino, const ReconParams& params, int workers) {
  ImageGrid img = fbp_fan_mu(sino, params, workers);
  const double mu_w = params.mu_water;
  img.values = img.values.unaryExpr([mu_w](double mu) { return mu_to_hu(mu, mu_w); });
  img.unit = Unit::HU;
  return img;
}

}  // namespace lcd
