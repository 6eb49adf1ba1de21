#include "lcd/observer.hpp"
#include "lcd/parallel.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace lcd;

namespace {

Eigen::MatrixXd gaussian_channels(int rows, int cols, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
  m.row(0).array() += shift;
  return m;
}

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("laguerre polynomials") {
  CHECK(laguerre(0, 3.0) == 1.0);
  CHECK(laguerre(1, 1.0) == 0.0);
  CHECK(laguerre(2, 2.0) == doctest::Approx(0.5 * (4.0 - 8.0 + 2.0)));
  CHECK(laguerre(3, 1.5) == doctest::Approx((-std::pow(1.5, 3) + 9 * 1.5 * 1.5 - 18 * 1.5 + 6) / 6.0));
}

TEST_CASE("single LG channel is a positive unit Gaussian") {
  const ChannelBasis b = lg_channels(16, 1, 6.0);
  CHECK(b.count() == 1);
  CHECK(b.U.minCoeff() > 0.0);
  CHECK(b.U.col(0).norm() == doctest::Approx(1.0));
}

TEST_CASE("channel 1 changes sign at r = a / sqrt(2 pi)") {
  const int p = 65;  // odd side, so the centre is a pixel
  const double a = 20.0;
  const ChannelBasis b = lg_channels(p, 2, a);
  const double r0 = a / std::sqrt(2.0 * std::numbers::pi);
  const int c = 32;
  auto at = [&](int row, int col) { return b.U(row * p + col, 1); };
  CHECK(at(c, c) > 0.0);
  CHECK(at(c, c + static_cast<int>(std::floor(r0))) > 0.0);
  CHECK(at(c, c + static_cast<int>(std::ceil(r0))) < 0.0);
}

TEST_CASE("LG channels are nearly orthonormal on a 64 pixel patch") {
  const ChannelBasis b = lg_channels(64, 5, 15.0);
  const Eigen::MatrixXd g = b.U.transpose() * b.U;
  for (int i = 0; i < 5; ++i) {
    CHECK(g(i, i) == doctest::Approx(1.0));
    for (int j = 0; j < 5; ++j) {
      if (i != j) CHECK(std::abs(g(i, j)) < 0.05);
    }
  }
}

TEST_CASE("lg_channels validates arguments") {
  CHECK_THROWS(lg_channels(0, 5, 1.0));
  CHECK_THROWS(lg_channels(8, 0, 1.0));
  CHECK_THROWS(lg_channels(8, 2, 0.0));
}

TEST_CASE("ROI extraction") {
  Matrix img(8, 8);
  for (Eigen::Index i = 0; i < 64; ++i) img.data()[i] = static_cast<double>(i);
  const ImageGrid grid{img, 1.0, Unit::HU};
  const PixelCenter center{3.5, 3.5};
  const auto rois = extract_rois(grid, std::span(&center, 1), 4, RoiLabel::SignalPresent, 2, 17);
  REQUIRE(rois.size() == 1);
  CHECK(rois[0].patch == img.block(2, 2, 4, 4));
  CHECK(rois[0].label == RoiLabel::SignalPresent);
  CHECK(rois[0].insert_index == 2);
  CHECK(rois[0].scan_id == 17);

  const PixelCenter five[] = {{3.5, 3.5}, {2.0, 2.0}, {5.0, 5.0}, {3.0, 4.0}, {4.0, 3.0}};
  CHECK(extract_rois(grid, five, 3, RoiLabel::SignalAbsent, 0, 0).size() == 5);

  const PixelCenter outside{0.5, 3.0};
  CHECK_THROWS_AS(extract_rois(grid, std::span(&outside, 1), 4, RoiLabel::SignalAbsent, 0, 0), ShapeError);
  CHECK(to_string(RoiLabel::SignalAbsent) == "SA");
  CHECK(roi_label_from_string("SP") == RoiLabel::SignalPresent);
}

TEST_CASE("CHO with identity covariance returns the mean difference") {
  // Class samples symmetric about their means with identity sample covariance.
  const int j = 5;
  const int n = 2 * j;
  Eigen::MatrixXd base(j, n);
  base.setZero();
  const double s = std::sqrt((n - 1) / 2.0);
  for (int k = 0; k < j; ++k) {
    base(k, 2 * k) = s;
    base(k, 2 * k + 1) = -s;
  }
  Eigen::MatrixXd sp = base;
  sp.row(0).array() += 1.0;
  const ObserverModel m = train_cho(sp, base);
  CHECK(m.covariance.isApprox(Eigen::MatrixXd::Identity(j, j), 1e-12));
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(j);
  e0(0) = 1.0;
  CHECK(m.weights.isApprox(e0, 1e-12));
}

TEST_CASE("CHO matches a naive explicit-inverse implementation") {
  const Eigen::MatrixXd sp = gaussian_channels(5, 80, 0.7, 1);
  const Eigen::MatrixXd sa = gaussian_channels(5, 90, 0.0, 2);
  const ObserverModel m = train_cho(sp, sa);

  const Eigen::VectorXd m1 = sp.rowwise().mean();
  const Eigen::VectorXd m0 = sa.rowwise().mean();
  Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(5, 5), s0 = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < sp.cols(); ++i) s1 += (sp.col(i) - m1) * (sp.col(i) - m1).transpose();
  for (int i = 0; i < sa.cols(); ++i) s0 += (sa.col(i) - m0) * (sa.col(i) - m0).transpose();
  const Eigen::MatrixXd s = 0.5 * (s1 / 79.0 + s0 / 89.0);
  const Eigen::VectorXd w = s.inverse() * (m1 - m0);
  CHECK((m.weights - w).norm() / w.norm() < 1e-8);
  CHECK(m.covariance.isApprox(m.covariance.transpose()));
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m.covariance).eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("CHO with singular covariance still yields finite weights") {
  Eigen::MatrixXd sp(3, 4), sa(3, 4);
  sp << 1, 1, 2, 2, 0, 0, 0, 0, 3, 3, 3, 3;
  sa << 0, 0, 1, 1, 0, 0, 0, 0, 3, 3, 3, 3;
  const ObserverModel m = train_cho(sp, sa);
  CHECK(all_finite(m.weights));
  CHECK_THROWS_AS(train_cho(sp.leftCols(1), sa), InsufficientData);
}

TEST_CASE("scores") {
  ObserverModel zero;
  zero.weights = Eigen::VectorXd::Zero(3);
  CHECK(score(zero, gaussian_channels(3, 7, 0.0, 3)).isZero());
  CHECK_THROWS_AS(score(zero, gaussian_channels(4, 7, 0.0, 3)), ShapeError);

  // Orthonormal synthetic basis: the first j unit vectors of R^(p*p).
  ChannelBasis basis;
  basis.side = 4;
  basis.U = Eigen::MatrixXd::Identity(16, 3);
  ObserverModel e1;
  e1.weights = Eigen::VectorXd::Unit(3, 1);
  Roi roi;
  roi.patch = Matrix::Zero(4, 4);
  roi.patch(0, 1) = 2.5;  // row-major vec index 1 = column 1 of U
  const auto t = score(e1, basis, std::span(&roi, 1));
  CHECK(t[0] == doctest::Approx(2.5));
}

TEST_CASE("AUC examples") {
  const std::vector<double> a{2, 3}, b{0, 1}, c{1, 3}, d{0, 2};
  CHECK(auc_mann_whitney(a, b) == 1.0);
  CHECK(auc_mann_whitney(a, a) == 0.5);
  CHECK(auc_mann_whitney(c, d) == 0.75);
  CHECK_THROWS_AS(auc_mann_whitney({}, b), InsufficientData);
}

TEST_CASE("rank AUC equals brute-force pair counting, ties included") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n1 = 1 + static_cast<int>(rng() % 200);
    const int n0 = 1 + static_cast<int>(rng() % 200);
    const int levels = 1 + static_cast<int>(rng() % 30);  // few levels -> many ties
    std::vector<double> sp(static_cast<std::size_t>(n1)), sa(static_cast<std::size_t>(n0));
    for (auto& v : sp) v = static_cast<double>(rng() % static_cast<unsigned>(levels)) * 0.1 + 0.05;
    for (auto& v : sa) v = static_cast<double>(rng() % static_cast<unsigned>(levels)) * 0.1;
    CHECK(auc_mann_whitney(sp, sa) == oracle::auc_brute_force(sp, sa));
  }
}

TEST_CASE("AUC is invariant under increasing transforms") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  std::vector<double> sp(60), sa(70);
  for (auto& v : sp) v = n01(rng) + 0.5;
  for (auto& v : sa) v = n01(rng);
  const double base = auc_mann_whitney(sp, sa);
  auto map = [](std::vector<double> v, auto f) {
    for (auto& x : v) x = f(x);
    return v;
  };
  const auto ex = [](double x) { return std::exp(x); };
  const auto af = [](double x) { return 3.0 * x + 2.0; };
  CHECK(auc_mann_whitney(map(sp, ex), map(sa, ex)) == base);
  CHECK(auc_mann_whitney(map(sp, af), map(sa, af)) == base);
}

TEST_CASE("scaling channel data leaves the AUC unchanged") {
  const Eigen::MatrixXd sp = gaussian_channels(5, 150, 0.6, 10);
  const Eigen::MatrixXd sa = gaussian_channels(5, 150, 0.0, 11);
  const SplitProtocol proto{50, 4, 123};
  const double a = auc_with_uncertainty(sp, sa, proto).auc;
  const double b = auc_with_uncertainty(3.0 * sp, 3.0 * sa, proto).auc;
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("a common shift of every patch leaves the AUC unchanged") {
  const ChannelBasis basis = lg_channels(12, 3, 5.0);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n01;
  std::vector<Roi> sp(60), sa(60);
  for (auto* set : {&sp, &sa}) {
    for (auto& r : *set) {
      r.patch = Matrix(12, 12);
      for (Eigen::Index i = 0; i < 144; ++i) r.patch.data()[i] = n01(rng);
    }
  }
  for (auto& r : sp) r.patch.block(4, 4, 4, 4).array() += 0.8;
  const SplitProtocol proto{20, 3, 5};
  const DetectabilityEstimate a = auc_with_uncertainty(sp, sa, basis, proto);
  for (auto* set : {&sp, &sa}) {
    for (auto& r : *set) r.patch.array() += 40.0;
  }
  CHECK(auc_with_uncertainty(sp, sa, basis, proto).auc == doctest::Approx(a.auc).epsilon(1e-9));
}

TEST_CASE("d-prime of binormal scores") {
  const std::vector<double> sp{1.0, 3.0}, sa{0.0, 2.0};
  // Means 2 and 1, variances 2 and 2.
  CHECK(detectability_index(sp, sa) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("known d-prime gives the binormal AUC on average") {
  // Channel-space Gaussians with identity covariance and mean shift 1 along one channel. A
  // single dataset scatters by ~0.017 in AUC, so average over independent datasets.
  double auc = 0.0;
  double dprime = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const Eigen::MatrixXd sp = gaussian_channels(5, 500, 1.0, 31 + 2 * k);
    const Eigen::MatrixXd sa = gaussian_channels(5, 500, 0.0, 32 + 2 * k);
    const DetectabilityEstimate est = auc_with_uncertainty(sp, sa, SplitProtocol{250, 10, 77 + k});
    CHECK(est.auc_std > 0.0);
    auc += est.auc / 20.0;
    dprime += est.dprime / 20.0;
  }
  CHECK(std::abs(auc - oracle::normal_cdf(1.0 / std::sqrt(2.0))) < 0.03);
  CHECK(dprime == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("null case gives chance AUC") {
  const Eigen::MatrixXd sp = gaussian_channels(5, 500, 0.0, 41);
  const Eigen::MatrixXd sa = gaussian_channels(5, 500, 0.0, 42);
  CHECK(std::abs(auc_with_uncertainty(sp, sa, SplitProtocol{100, 10, 1}).auc - 0.5) < 0.05);
}

TEST_CASE("empirical AUC error shrinks with more samples") {
  const double truth = oracle::normal_cdf(0.8 / std::sqrt(2.0));
  auto rms_error = [&](int n) {
    double acc = 0.0;
    for (std::uint64_t s = 0; s < 40; ++s) {
      std::mt19937_64 rng(mix_seed(s, static_cast<std::uint64_t>(n)));
      std::normal_distribution<double> n01;
      std::vector<double> sp(static_cast<std::size_t>(n)), sa(static_cast<std::size_t>(n));
      for (auto& v : sp) v = n01(rng) + 0.8;
      for (auto& v : sa) v = n01(rng);
      acc += std::pow(auc_mann_whitney(sp, sa) - truth, 2);
    }
    return std::sqrt(acc / 40.0);
  };
  const double e1 = rms_error(100);
  const double e4 = rms_error(400);
  // Error halves when n quadruples; allow statistical slack.
  CHECK(e4 < 0.75 * e1);
  CHECK(e4 > 0.3 * e1);
}

TEST_CASE("paper protocol counts are echoed") {
  const Eigen::MatrixXd sp = gaussian_channels(5, 200, 0.5, 51);
  const Eigen::MatrixXd sa = gaussian_channels(5, 500, 0.0, 52);
  const DetectabilityEstimate est = auc_with_uncertainty(sp, sa, SplitProtocol{100, 10, 3});
  CHECK(est.n_train_pairs == 100);
  CHECK(est.n_test_sp == 100);
  CHECK(est.n_test_sa == 400);
  CHECK(est.repeats == 10);
  CHECK_THROWS_AS(auc_with_uncertainty(sp.leftCols(101), sa, SplitProtocol{100, 10, 3}), InsufficientData);
}

TEST_CASE("split repeats do not depend on the worker count") {
  const Eigen::MatrixXd sp = gaussian_channels(5, 120, 0.5, 61);
  const Eigen::MatrixXd sa = gaussian_channels(5, 200, 0.0, 62);
  const SplitProtocol proto{40, 10, 99};
  const auto a = auc_with_uncertainty(sp, sa, proto, 1);
  const auto b = auc_with_uncertainty(sp, sa, proto, 8);
  CHECK(a.auc == b.auc);
  CHECK(a.auc_std == b.auc_std);
  CHECK(a.dprime == b.dprime);
}
