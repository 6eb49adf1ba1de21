#include "lcd/observer.hpp"
#include "lcd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace lcd {

std::string_view to_string(RoiLabel label) { return label == RoiLabel::SignalPresent ? "SP" : "SA"; }

RoiLabel roi_label_from_string(std::string_view text) {
  if (text == "SP") return RoiLabel::SignalPresent;
  if (text == "SA") return RoiLabel::SignalAbsent;
  throw std::invalid_argument("unknown ROI label: " + std::string(text));
}

ChannelBasis lg_channels(int side, int count, double width) {
  if (side <= 0) throw std::invalid_argument("lg_channels: side must be positive");
  if (count < 1) throw std::invalid_argument("lg_channels: need at least one channel");
  if (!(width > 0.0)) throw std::invalid_argument("lg_channels: width must be positive");

  ChannelBasis basis;
  basis.side = side;
  basis.width = width;
  basis.U.resize(static_cast<Eigen::Index>(side) * side, count);
  const double c = 0.5 * (side - 1);
  const double a2 = width * width;
  for (int r = 0; r < side; ++r) {
    for (int col = 0; col < side; ++col) {
      const double rr = (r - c) * (r - c) + (col - c) * (col - c);
      const double gauss = std::exp(-std::numbers::pi * rr / a2);
      const double x = 2.0 * std::numbers::pi * rr / a2;
      for (int j = 0; j < count; ++j) {
        basis.U(static_cast<Eigen::Index>(r) * side + col, j) = gauss * laguerre(j, x);
      }
    }
  }
  basis.U.colwise().normalize();
  return basis;
}

Matrix crop_patch(const Matrix& image, const PixelCenter& center, int side) {
  const auto r0 = static_cast<Eigen::Index>(std::floor(center.row - 0.5 * (side - 1) + 0.5));
  const auto c0 = static_cast<Eigen::Index>(std::floor(center.col - 0.5 * (side - 1) + 0.5));
  if (r0 < 0 || c0 < 0 || r0 + side > image.rows() || c0 + side > image.cols()) {
    throw ShapeError("ROI at (" + std::to_string(center.row) + ", " + std::to_string(center.col) +
                     ") extends outside the image");
  }
  return image.block(r0, c0, side, side);
}

std::vector<Roi> extract_rois(const ImageGrid& image, std::span<const PixelCenter> centers, int side, RoiLabel label,
                              int insert_index, std::int64_t scan_id) {
  std::vector<Roi> rois;
  rois.reserve(centers.size());
  for (const auto& center : centers) {
    rois.push_back(Roi{crop_patch(image.values, center, side), label, insert_index, scan_id, center});
  }
  return rois;
}

Eigen::MatrixXd channelize(const ChannelBasis& basis, std::span<const Roi> rois) {
  Eigen::MatrixXd out(basis.count(), static_cast<Eigen::Index>(rois.size()));
  const Eigen::Index n_pix = basis.U.rows();
  for (std::size_t i = 0; i < rois.size(); ++i) {
    const Matrix& patch = rois[i].patch;
    if (patch.size() != n_pix) throw ShapeError("channelize: patch size does not match the channel basis");
    out.col(static_cast<Eigen::Index>(i)) = basis.U.transpose() * Eigen::Map<const Eigen::VectorXd>(patch.data(), n_pix);
  }
  return out;
}

namespace {

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean) {
  const Eigen::MatrixXd centered = x.colwise() - mean;
  return centered * centered.transpose() / static_cast<double>(x.cols() - 1);
}

}  // namespace

ObserverModel train_cho(const Eigen::MatrixXd& channels_sp, const Eigen::MatrixXd& channels_sa) {
  if (channels_sp.cols() < 2 || channels_sa.cols() < 2) {
    throw InsufficientData("train_cho: need at least 2 samples per class");
  }
  if (channels_sp.rows() != channels_sa.rows()) throw ShapeError("train_cho: channel counts differ between classes");

  ObserverModel model;
  model.mean_sp = channels_sp.rowwise().mean();
  model.mean_sa = channels_sa.rowwise().mean();
  model.covariance = 0.5 * (sample_covariance(channels_sp, model.mean_sp) + sample_covariance(channels_sa, model.mean_sa));
  model.weights = model.covariance.completeOrthogonalDecomposition().solve(model.mean_sp - model.mean_sa);
  return model;
}

ObserverModel train_cho(std::span<const Roi> sp, std::span<const Roi> sa, const ChannelBasis& basis) {
  return train_cho(channelize(basis, sp), channelize(basis, sa));
}

Eigen::VectorXd score(const ObserverModel& model, const Eigen::MatrixXd& channels) {
  if (channels.rows() != model.weights.size()) throw ShapeError("score: channel count does not match the model");
  return channels.transpose() * model.weights;
}

std::vector<double> score(const ObserverModel& model, const ChannelBasis& basis, std::span<const Roi> rois) {
  const Eigen::VectorXd t = score(model, channelize(basis, rois));
  return {t.data(), t.data() + t.size()};
}

double auc_mann_whitney(std::span<const double> sp, std::span<const double> sa) {
  if (sp.empty() || sa.empty()) throw InsufficientData("auc: both score lists must be non-empty");
  const std::size_t n = sp.size() + sa.size();
  std::vector<std::pair<double, bool>> all;
  all.reserve(n);
  for (double s : sp) all.emplace_back(s, true);
  for (double s : sa) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  // Twice the SP rank sum, so midranks of ties stay integral.
  long double twice_rank_sum = 0.0L;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    std::size_t n_sp_tied = 0;
    while (j < n && all[j].first == all[i].first) {
      n_sp_tied += all[j].second ? 1 : 0;
      ++j;
    }
    // Ranks i+1 .. j; twice the midrank is i + j + 1.
    twice_rank_sum += static_cast<long double>(n_sp_tied) * static_cast<long double>(i + j + 1);
    i = j;
  }
  const auto n_sp = static_cast<long double>(sp.size());
  const auto n_sa = static_cast<long double>(sa.size());
  const long double twice_u = twice_rank_sum - n_sp * (n_sp + 1.0L);
  return static_cast<double>(twice_u / 2.0L) / static_cast<double>(n_sp * n_sa);
}

double detectability_index(std::span<const double> sp, std::span<const double> sa) {
  if (sp.size() < 2 || sa.size() < 2) throw InsufficientData("dprime: need at least 2 scores per class");
  auto moments = [](std::span<const double> x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss / static_cast<double>(x.size() - 1)};
  };
  const auto [m1, v1] = moments(sp);
  const auto [m0, v0] = moments(sa);
  return (m1 - m0) / std::sqrt(0.5 * (v1 + v0));
}

DetectabilityEstimate auc_with_uncertainty(const Eigen::MatrixXd& channels_sp, const Eigen::MatrixXd& channels_sa,
                                           const SplitProtocol& protocol, int workers) {
  const auto n_sp = static_cast<int>(channels_sp.cols());
  const auto n_sa = static_cast<int>(channels_sa.cols());
  const int k = protocol.train_pairs;
  if (protocol.repeats < 1) throw std::invalid_argument("auc_with_uncertainty: repeats must be positive");
  if (k < 2 || n_sp - k < 2 || n_sa - k < 2) {
    throw InsufficientData("auc_with_uncertainty: have " + std::to_string(n_sp) + " SP and " + std::to_string(n_sa) +
                           " SA samples; need " + std::to_string(k) + " training pairs plus at least 2 test samples per class");
  }

  std::vector<double> aucs(static_cast<std::size_t>(protocol.repeats));
  std::vector<double> dprimes(static_cast<std::size_t>(protocol.repeats));
  parallel_for(aucs.size(), workers, [&](std::size_t r) {
    SplitMix64 rng(mix_seed(protocol.seed, r));
    std::vector<Eigen::Index> idx_sp(static_cast<std::size_t>(n_sp));
    std::vector<Eigen::Index> idx_sa(static_cast<std::size_t>(n_sa));
    std::iota(idx_sp.begin(), idx_sp.end(), 0);
    std::iota(idx_sa.begin(), idx_sa.end(), 0);
    std::shuffle(idx_sp.begin(), idx_sp.end(), rng);
    std::shuffle(idx_sa.begin(), idx_sa.end(), rng);

    auto gather = [](const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx, std::size_t from, std::size_t to) {
      Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(to - from));
      for (std::size_t i = from; i < to; ++i) out.col(static_cast<Eigen::Index>(i - from)) = m.col(idx[i]);
      return out;
    };
    const auto kk = static_cast<std::size_t>(k);
    const ObserverModel model = train_cho(gather(channels_sp, idx_sp, 0, kk), gather(channels_sa, idx_sa, 0, kk));
    const Eigen::VectorXd t_sp = score(model, gather(channels_sp, idx_sp, kk, idx_sp.size()));
    const Eigen::VectorXd t_sa = score(model, gather(channels_sa, idx_sa, kk, idx_sa.size()));
    const std::span<const double> sp(t_sp.data(), static_cast<std::size_t>(t_sp.size()));
    const std::span<const double> sa(t_sa.data(), static_cast<std::size_t>(t_sa.size()));
    aucs[r] = auc_mann_whitney(sp, sa);
    dprimes[r] = detectability_index(sp, sa);
  });

  DetectabilityEstimate est;
  const double m = static_cast<double>(aucs.size());
  est.auc = std::accumulate(aucs.begin(), aucs.end(), 0.0) / m;
  double ss = 0.0;
  for (double a : aucs) ss += (a - est.auc) * (a - est.auc);
  est.auc_std = aucs.size() > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
  est.dprime = std::accumulate(dprimes.begin(), dprimes.end(), 0.0) / m;
  est.n_train_pairs = k;
  est.n_test_sp = n_sp - k;
  est.n_test_sa = n_sa - k;
  est.repeats = protocol.repeats;
  return est;
}

DetectabilityEstimate auc_with_uncertainty(std::span<const Roi> sp, std::span<const Roi> sa,
                                           const ChannelBasis& basis, const SplitProtocol& protocol, int workers) {
  return auc_with_uncertainty(channelize(basis, sp), channelize(basis, sa), protocol, workers);
}

}  // namespace lcd
