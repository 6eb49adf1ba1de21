#pragma once

#include "lcd/image.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace lcd {

/// 10 log10(range^2 / MSE). Identical inputs give +infinity.
template <typename DerivedA, typename DerivedB>
double psnr(const Eigen::MatrixBase<DerivedA>& ref, const Eigen::MatrixBase<DerivedB>& test, double data_range = 1.0) {
  if (ref.rows() != test.rows() || ref.cols() != test.cols()) throw ShapeError("psnr: shapes differ");
  if (!(data_range > 0.0)) throw std::invalid_argument("psnr: data_range must be positive");
  const double mse = (ref.template cast<double>() - test.template cast<double>()).squaredNorm() /
                     static_cast<double>(ref.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(data_range * data_range / mse);
}

double psnr(const ImageGrid& ref, const ImageGrid& test, double data_range = 1.0);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 1.0;
};

/// Mean local SSIM over all window positions fully inside the image, Gaussian-weighted.
double ssim(const Matrix& ref, const Matrix& test, const SsimParams& params = {});
double ssim(const ImageGrid& ref, const ImageGrid& test, const SsimParams& params = {});

struct MethodSummary {
  std::string method;
  int n_slices = 0;
  double psnr_mean = 0.0;
  double psnr_std = 0.0;
  double ssim_mean = 0.0;
  double ssim_std = 0.0;
};

struct MetricReport {
  std::vector<MethodSummary> rows;
  std::map<std::string, std::vector<double>> psnr_per_slice;
  std::map<std::string, std::vector<double>> ssim_per_slice;
  std::string convention = "normalized images, data_range 1.0";
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // n-1 denominator
};

MeanStd mean_std(const std::vector<double>& values);

/// Per-method mean and sample std. Methods keep their first-insertion order given by `order`.
/// Needs at least 2 slices per method.
MetricReport aggregate(const std::vector<std::string>& order,
                       const std::map<std::string, std::vector<double>>& psnr_per_slice,
                       const std::map<std::string, std::vector<double>>& ssim_per_slice);

/// "35.2 (±2.5)" with the given number of decimals.
std::string format_mean_std(double mean, double std, int decimals);

/// method,n_slices,psnr_mean,psnr_std,ssim_mean,ssim_std
void write_metric_csv(std::ostream& os, const MetricReport& report);

}  // namespace lcd
