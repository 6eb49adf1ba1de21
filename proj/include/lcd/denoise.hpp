#pragma once

#include "lcd/image.hpp"

#include <stdexcept>
#include <vector>

namespace lcd {

/// Affine HU -> [0, 1] map, clipped outside [lo_hu, hi_hu].
struct NormalizationWindow {
  double lo_hu = -1000.0;
  double hi_hu = 1000.0;

  void validate() const {
    if (!(lo_hu < hi_hu)) throw std::invalid_argument("normalization window: lo_hu must be below hi_hu");
  }
};

ImageGrid normalize(const ImageGrid& img, const NormalizationWindow& w);
ImageGrid denormalize(const ImageGrid& img, const NormalizationWindow& w);

struct BilateralParams {
  int window = 7;
  double sigma_color = 0.02;
  double sigma_spatial = 5.0;
};

/// Gaussian-weighted bilateral filter over a square window; edges replicate the border pixel.
ImageGrid bilateral(const ImageGrid& img, const BilateralParams& params = {});

/// Same filter on a raw matrix, without unit checks.
Matrix bilateral_filter(const Matrix& values, const BilateralParams& params = {});

struct TvParams {
  double lambda = 0.016;
  int max_iters = 300;
  double tol = 1e-5;
};

struct TvResult {
  Matrix u;                        // lowest-energy iterate
  std::vector<double> energy;      // energy of the reported iterate: input first, then one per iteration
  std::vector<double> raw_energy;  // energy of each primal-dual iterate
  int iterations = 0;
  bool converged = false;
};

class TvDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ROF energy 1/2 ||u - f||^2 + lambda * TV(u), isotropic forward differences with the
/// last difference along each axis set to zero.
double rof_energy(const Matrix& u, const Matrix& f, double lambda);

/// First-order primal-dual solver for the ROF model (tau = sigma = 1/sqrt(8)). The reported
/// iterate is the lowest-energy one seen, so `energy` never increases. Throws TvDivergence
/// on non-finite iterates or when the raw energy stays above the input's energy for more
/// than 10 consecutive iterations.
TvResult tv_solve(const Matrix& f, const TvParams& params = {});

ImageGrid tv_denoise(const ImageGrid& img, const TvParams& params = {});

}  // namespace lcd
