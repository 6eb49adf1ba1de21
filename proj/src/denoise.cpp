#include "lcd/denoise.hpp"

#include <algorithm>
#include <cmath>

namespace lcd {

ImageGrid normalize(const ImageGrid& img, const NormalizationWindow& w) {
  require_unit(img, Unit::HU, "normalize");
  w.validate();
  const double span = w.hi_hu - w.lo_hu;
  ImageGrid out = img;
  out.values = ((img.values.array() - w.lo_hu) / span).cwiseMax(0.0).cwiseMin(1.0).matrix();
  out.unit = Unit::Normalized;
  return out;
}

ImageGrid denormalize(const ImageGrid& img, const NormalizationWindow& w) {
  require_unit(img, Unit::Normalized, "denormalize");
  w.validate();
  ImageGrid out = img;
  out.values = (img.values.array() * (w.hi_hu - w.lo_hu) + w.lo_hu).matrix();
  out.unit = Unit::HU;
  return out;
}

Matrix bilateral_filter(const Matrix& values, const BilateralParams& params) {
  if (params.window < 1 || params.window % 2 == 0) throw std::invalid_argument("bilateral: window must be a positive odd integer");
  if (!(params.sigma_color > 0.0) || !(params.sigma_spatial > 0.0)) throw std::invalid_argument("bilateral: sigmas must be positive");

  const int half = params.window / 2;
  const int side = params.window;
  std::vector<double> spatial(static_cast<std::size_t>(side * side));
  for (int dy = -half; dy <= half; ++dy) {
    for (int dx = -half; dx <= half; ++dx) {
      spatial[static_cast<std::size_t>((dy + half) * side + dx + half)] =
          std::exp(-(dx * dx + dy * dy) / (2.0 * params.sigma_spatial * params.sigma_spatial));
    }
  }
  const double range_coeff = -1.0 / (2.0 * params.sigma_color * params.sigma_color);

  const auto rows = static_cast<int>(values.rows());
  const auto cols = static_cast<int>(values.cols());
  Matrix out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double center = values(r, c);
      double num = 0.0;
      double den = 0.0;
      for (int dy = -half; dy <= half; ++dy) {
        const int rr = std::clamp(r + dy, 0, rows - 1);
        for (int dx = -half; dx <= half; ++dx) {
          const int cc = std::clamp(c + dx, 0, cols - 1);
          const double v = values(rr, cc);
          const double diff = v - center;
          const double wgt = spatial[static_cast<std::size_t>((dy + half) * side + dx + half)] * std::exp(range_coeff * diff * diff);
          num += wgt * v;
          den += wgt;
        }
      }
      out(r, c) = num / den;
    }
  }
  return out;
}

ImageGrid bilateral(const ImageGrid& img, const BilateralParams& params) {
  require_unit(img, Unit::Normalized, "bilateral");
  return ImageGrid(bilateral_filter(img.values, params), img.pixel_mm, Unit::Normalized);
}

namespace {

// Forward differences; the last difference along each axis is zero.
void gradient(const Matrix& u, Matrix& gx, Matrix& gy) {
  const Eigen::Index rows = u.rows();
  const Eigen::Index cols = u.cols();
  gx.setZero(rows, cols);
  gy.setZero(rows, cols);
  if (cols > 1) gx.leftCols(cols - 1) = u.rightCols(cols - 1) - u.leftCols(cols - 1);
  if (rows > 1) gy.topRows(rows - 1) = u.bottomRows(rows - 1) - u.topRows(rows - 1);
}

// Negative adjoint of `gradient`.
void divergence(const Matrix& px, const Matrix& py, Matrix& div) {
  const Eigen::Index rows = px.rows();
  const Eigen::Index cols = px.cols();
  div.setZero(rows, cols);
  if (cols > 1) {
    div.col(0) += px.col(0);
    div.middleCols(1, cols - 2) += px.middleCols(1, cols - 2) - px.leftCols(cols - 2);
    div.col(cols - 1) -= px.col(cols - 2);
  }
  if (rows > 1) {
    div.row(0) += py.row(0);
    div.middleRows(1, rows - 2) += py.middleRows(1, rows - 2) - py.topRows(rows - 2);
    div.row(rows - 1) -= py.row(rows - 2);
  }
}

}  // namespace

double rof_energy(const Matrix& u, const Matrix& f, double lambda) {
  Matrix gx;
  Matrix gy;
  gradient(u, gx, gy);
  const double tv = (gx.array().square() + gy.array().square()).sqrt().sum();
  return 0.5 * (u - f).squaredNorm() + lambda * tv;
}

TvResult tv_solve(const Matrix& f, const TvParams& params) {
  if (!(params.lambda >= 0.0)) throw std::invalid_argument("tv: lambda must be non-negative");
  if (params.max_iters < 0) throw std::invalid_argument("tv: max_iters must be non-negative");

  // tau * sigma * ||grad||^2 <= 1 with ||grad||^2 <= 8.
  const double tau = 1.0 / std::sqrt(8.0);
  const double sigma = 1.0 / std::sqrt(8.0);
  constexpr int kMaxRises = 10;

  TvResult result;
  result.u = f;
  Matrix u = f;
  Matrix u_bar = f;
  Matrix px = Matrix::Zero(f.rows(), f.cols());
  Matrix py = Matrix::Zero(f.rows(), f.cols());
  Matrix gx;
  Matrix gy;
  Matrix div;
  const double e0 = rof_energy(f, f, params.lambda);
  result.energy.push_back(e0);
  result.raw_energy.push_back(e0);
  int above_start = 0;

  for (int it = 0; it < params.max_iters; ++it) {
    gradient(u_bar, gx, gy);
    px += sigma * gx;
    py += sigma * gy;
    if (params.lambda > 0.0) {
      const Eigen::ArrayXXd shrink = ((px.array().square() + py.array().square()).sqrt() / params.lambda).max(1.0);
      px.array() /= shrink;
      py.array() /= shrink;
    } else {
      px.setZero();
      py.setZero();
    }

    divergence(px, py, div);
    Matrix u_next = (u + tau * div + tau * f) / (1.0 + tau);
    u_bar = 2.0 * u_next - u;
    const double change = (u_next - u).norm();
    const double scale = std::max(u_next.norm(), 1e-12);
    u = std::move(u_next);
    result.iterations = it + 1;

    const double e = rof_energy(u, f, params.lambda);
    if (!std::isfinite(e)) throw TvDivergence("tv: non-finite iterate");
    result.raw_energy.push_back(e);
    above_start = e > e0 * (1.0 + 1e-6) ? above_start + 1 : 0;
    if (above_start > kMaxRises) {
      throw TvDivergence("tv: energy stayed above its starting value for more than 10 consecutive iterations");
    }
    // The primal-dual iterates are not monotone in energy; report the best one so far.
    if (e < result.energy.back()) {
      result.u = u;
      result.energy.push_back(e);
    } else {
      result.energy.push_back(result.energy.back());
    }
    if (change / scale < params.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

ImageGrid tv_denoise(const ImageGrid& img, const TvParams& params) {
  require_unit(img, Unit::Normalized, "tv_denoise");
  return ImageGrid(tv_solve(img.values, params).u, img.pixel_mm, Unit::Normalized);
}

}  // namespace lcd
