#include "lcd/metrics.hpp"

#include <cstdio>
#include <numeric>

namespace lcd {

double psnr(const ImageGrid& ref, const ImageGrid& test, double data_range) {
  require_same_shape(ref, test, "psnr");
  if (ref.unit != test.unit) throw UnitError("psnr: unit tags differ");
  return psnr(ref.values, test.values, data_range);
}

namespace {

// Valid-mode separable filtering with a normalized 1D kernel.
Matrix filter_valid(const Matrix& x, const Eigen::VectorXd& k) {
  const Eigen::Index w = k.size();
  const Eigen::Index rows = x.rows() - w + 1;
  const Eigen::Index cols = x.cols() - w + 1;
  Matrix horiz(x.rows(), cols);
  for (Eigen::Index c = 0; c < cols; ++c) horiz.col(c) = x.middleCols(c, w) * k;
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) out.row(r) = k.transpose() * horiz.middleRows(r, w);
  return out;
}

}  // namespace

double ssim(const Matrix& ref, const Matrix& test, const SsimParams& params) {
  if (ref.rows() != test.rows() || ref.cols() != test.cols()) throw ShapeError("ssim: shapes differ");
  if (params.window < 1 || params.window > ref.rows() || params.window > ref.cols()) {
    throw ShapeError("ssim: window larger than the image");
  }
  Eigen::VectorXd k(params.window);
  const double c = 0.5 * (params.window - 1);
  for (int i = 0; i < params.window; ++i) k(i) = std::exp(-(i - c) * (i - c) / (2.0 * params.sigma * params.sigma));
  k /= k.sum();

  const double c1 = (params.k1 * params.data_range) * (params.k1 * params.data_range);
  const double c2 = (params.k2 * params.data_range) * (params.k2 * params.data_range);
  const Matrix mu_x = filter_valid(ref, k);
  const Matrix mu_y = filter_valid(test, k);
  const Matrix xx = filter_valid(ref.cwiseProduct(ref), k);
  const Matrix yy = filter_valid(test.cwiseProduct(test), k);
  const Matrix xy = filter_valid(ref.cwiseProduct(test), k);

  const auto mx = mu_x.array();
  const auto my = mu_y.array();
  const Eigen::ArrayXXd var_x = xx.array() - mx.square();
  const Eigen::ArrayXXd var_y = yy.array() - my.square();
  const Eigen::ArrayXXd cov = xy.array() - mx * my;
  const Eigen::ArrayXXd map =
      ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx.square() + my.square() + c1) * (var_x + var_y + c2));
  return map.mean();
}

double ssim(const ImageGrid& ref, const ImageGrid& test, const SsimParams& params) {
  require_same_shape(ref, test, "ssim");
  if (ref.unit != test.unit) throw UnitError("ssim: unit tags differ");
  return ssim(ref.values, test.values, params);
}

MeanStd mean_std(const std::vector<double>& values) {
  if (values.size() < 2) throw std::invalid_argument("mean_std: need at least 2 values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

MetricReport aggregate(const std::vector<std::string>& order,
                       const std::map<std::string, std::vector<double>>& psnr_per_slice,
                       const std::map<std::string, std::vector<double>>& ssim_per_slice) {
  MetricReport report;
  report.psnr_per_slice = psnr_per_slice;
  report.ssim_per_slice = ssim_per_slice;
  for (const auto& method : order) {
    const auto p = psnr_per_slice.find(method);
    const auto s = ssim_per_slice.find(method);
    if (p == psnr_per_slice.end() || s == ssim_per_slice.end()) {
      throw std::invalid_argument("aggregate: no values for method " + method);
    }
    if (p->second.size() != s->second.size()) throw std::invalid_argument("aggregate: PSNR and SSIM slice counts differ for " + method);
    const MeanStd ps = mean_std(p->second);
    const MeanStd ss = mean_std(s->second);
    report.rows.push_back({method, static_cast<int>(p->second.size()), ps.mean, ps.std, ss.mean, ss.std});
  }
  return report;
}

std::string format_mean_std(double mean, double std, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f (±%.*f)", decimals, mean, decimals, std);
  return buf;
}

void write_metric_csv(std::ostream& os, const MetricReport& report) {
  os << "method,n_slices,psnr_mean,psnr_std,ssim_mean,ssim_std\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%.6f,%.6f,%.6f,%.6f\n", r.method.c_str(), r.n_slices, r.psnr_mean,
                  r.psnr_std, r.ssim_mean, r.ssim_std);
    os << buf;
  }
}

}  // namespace lcd
