#include "lcd/metrics.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace lcd;

namespace {

// Smooth texture with structure at several scales.
Matrix texture(int n) {
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      m(r, c) = 0.5 + 0.2 * std::sin(0.21 * r) * std::cos(0.13 * c) + 0.1 * std::sin(0.05 * (r + 2 * c)) +
                0.05 * std::cos(0.7 * r - 0.4 * c);
    }
  }
  return m;
}

Matrix add_noise(const Matrix& m, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  Matrix out = m;
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] += n(rng);
  return out;
}

}  // namespace

TEST_CASE("psnr closed forms") {
  const Matrix ref = texture(32);
  CHECK(std::isinf(psnr(ref, ref)));
  CHECK(psnr(ref, ref, 1.0) > 0.0);
  CHECK(psnr(ref, (ref.array() + 0.1).matrix()) == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(psnr(ref, (ref.array() + 0.05).matrix()) == doctest::Approx(26.0206).epsilon(1e-5));
  CHECK_THROWS_AS(psnr(ref, texture(16)), ShapeError);
}

TEST_CASE("psnr decreases with noise level") {
  const Matrix ref = texture(48);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    double prev = std::numeric_limits<double>::infinity();
    for (double sigma : {0.01, 0.02, 0.05, 0.1, 0.2}) {
      const double p = psnr(ref, add_noise(ref, sigma, seed));
      CHECK(p < prev);
      prev = p;
    }
  }
}

TEST_CASE("ssim of identical images is one") {
  const Matrix ref = texture(40);
  CHECK(ssim(ref, ref) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim of two constants has the zero-variance closed form") {
  const double a = 0.3, b = 0.6;
  const double c1 = 0.01 * 0.01;
  CHECK(ssim(Matrix::Constant(20, 20, a), Matrix::Constant(20, 20, b)) ==
        doctest::Approx((2 * a * b + c1) / (a * a + b * b + c1)).epsilon(1e-9));
}

TEST_CASE("ssim equals the direct windowed formula") {
  const Matrix x = texture(30);
  const Matrix y = add_noise(x, 0.05, 4);
  CHECK(ssim(x, y) == doctest::Approx(oracle::ssim_direct(x, y, 11, 1.5, 0.01, 0.03, 1.0)).epsilon(1e-10));
  SsimParams p;
  p.window = 7;
  p.sigma = 1.0;
  p.data_range = 2.0;
  CHECK(ssim(x, y, p) == doctest::Approx(oracle::ssim_direct(x, y, 7, 1.0, 0.01, 0.03, 2.0)).epsilon(1e-10));
}

TEST_CASE("ssim drops under heavy noise") {
  const Matrix ref = texture(64);
  for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(ssim(ref, add_noise(ref, 0.2, seed)) < 0.6);
}

TEST_CASE("ssim is symmetric") {
  const Matrix a = add_noise(texture(32), 0.05, 1);
  const Matrix b = add_noise(texture(32), 0.05, 2);
  CHECK(std::abs(ssim(a, b) - ssim(b, a)) < 1e-12);
}

TEST_CASE("metrics are invariant to a shared affine rescale") {
  const Matrix a = texture(32);
  const Matrix b = add_noise(a, 0.03, 3);
  const double s = 3.5, t = -0.7;
  const Matrix as = (s * a.array() + t).matrix();
  const Matrix bs = (s * b.array() + t).matrix();
  CHECK(psnr(as, bs, s) == doctest::Approx(psnr(a, b, 1.0)).epsilon(1e-9));
  SsimParams p;
  p.data_range = s;
  // SSIM's luminance term sees absolute means, so only the scale part is exact; check scale.
  const Matrix a2 = (s * a.array()).matrix();
  const Matrix b2 = (s * b.array()).matrix();
  CHECK(ssim(a2, b2, p) == doctest::Approx(ssim(a, b)).epsilon(1e-9));
}

TEST_CASE("ssim rejects a window larger than the image") {
  CHECK_THROWS_AS(ssim(Matrix::Zero(8, 8), Matrix::Zero(8, 8)), ShapeError);
}

TEST_CASE("image-grid metrics check shape and unit") {
  const ImageGrid a{texture(16), 1.0, Unit::Normalized};
  const ImageGrid b{texture(16), 1.0, Unit::HU};
  CHECK_THROWS_AS(ssim(a, b), UnitError);
  CHECK(std::isinf(psnr(a, a)));
}

TEST_CASE("aggregate and formatting") {
  const MeanStd m = mean_std({35.0, 36.0, 37.0});
  CHECK(m.mean == 36.0);
  CHECK(m.std == 1.0);
  CHECK(mean_std({2.0, 2.0, 2.0}).std == 0.0);
  CHECK_THROWS(mean_std({1.0}));
  CHECK(format_mean_std(35.2, 2.5, 1) == "35.2 (±2.5)");

  const MetricReport r = aggregate({"tv", "fbp"}, {{"fbp", {30.0, 32.0}}, {"tv", {35.0, 36.0, 37.0}}},
                                   {{"fbp", {0.8, 0.9}}, {"tv", {0.9, 0.9, 0.9}}});
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].method == "tv");
  CHECK(r.rows[0].n_slices == 3);
  CHECK(r.rows[0].psnr_mean == 36.0);
  CHECK(r.rows[0].ssim_std == 0.0);
  CHECK(r.rows[1].psnr_std == doctest::Approx(std::sqrt(2.0)));

  std::ostringstream os;
  write_metric_csv(os, r);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "method,n_slices,psnr_mean,psnr_std,ssim_mean,ssim_std");
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) rows += line.empty() ? 0 : 1;
  CHECK(rows == 2);
}
