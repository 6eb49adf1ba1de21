#pragma once

#include "lcd/image.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lcd {

enum class RoiLabel { SignalPresent, SignalAbsent };

std::string_view to_string(RoiLabel label);
RoiLabel roi_label_from_string(std::string_view text);

/// Pixel-index position on an image (fractional allowed).
struct PixelCenter {
  double row = 0.0;
  double col = 0.0;
};

struct Roi {
  Matrix patch;  // p x p, HU
  RoiLabel label = RoiLabel::SignalAbsent;
  int insert_index = 0;
  std::int64_t scan_id = 0;
  PixelCenter center;
};

class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Laguerre polynomial L_j(x) by the three-term recurrence.
template <typename Scalar>
Scalar laguerre(int j, Scalar x) {
  if (j == 0) return Scalar(1);
  Scalar prev = Scalar(1);
  Scalar cur = Scalar(1) - x;
  for (int k = 1; k < j; ++k) {
    const Scalar next = ((Scalar(2 * k + 1) - x) * cur - Scalar(k) * prev) / Scalar(k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Columns are Laguerre-Gauss channels sampled on a p x p patch (row-major vec order).
struct ChannelBasis {
  Eigen::MatrixXd U;  // (p*p) x J
  int side = 0;
  double width = 0.0;

  int count() const { return static_cast<int>(U.cols()); }
};

/// Channel j: exp(-pi r^2 / a^2) * L_j(2 pi r^2 / a^2), r measured from the patch center
/// ((p-1)/2, (p-1)/2) in pixels, each column scaled to unit Euclidean norm.
ChannelBasis lg_channels(int side, int count, double width);

/// p x p crop whose top-left pixel is floor(center - (p-1)/2 + 1/2). Throws ShapeError if any part
/// of the crop falls outside the image.
Matrix crop_patch(const Matrix& image, const PixelCenter& center, int side);

std::vector<Roi> extract_rois(const ImageGrid& image, std::span<const PixelCenter> centers, int side, RoiLabel label,
                              int insert_index, std::int64_t scan_id);

/// J x n matrix of channel responses U^T vec(patch), one column per ROI.
Eigen::MatrixXd channelize(const ChannelBasis& basis, std::span<const Roi> rois);

struct ObserverModel {
  Eigen::VectorXd weights;  // Hotelling template in channel space
  Eigen::VectorXd mean_sp;
  Eigen::VectorXd mean_sa;
  Eigen::MatrixXd covariance;  // average of the two class covariances
};

/// Trains on channel data (J x n per class). Uses a minimum-norm least-squares solve, so a
/// singular covariance still yields finite weights.
ObserverModel train_cho(const Eigen::MatrixXd& channels_sp, const Eigen::MatrixXd& channels_sa);
ObserverModel train_cho(std::span<const Roi> sp, std::span<const Roi> sa, const ChannelBasis& basis);

Eigen::VectorXd score(const ObserverModel& model, const Eigen::MatrixXd& channels);
std::vector<double> score(const ObserverModel& model, const ChannelBasis& basis, std::span<const Roi> rois);

/// Mann-Whitney estimate with ties counted as 1/2, computed from midranks.
double auc_mann_whitney(std::span<const double> sp, std::span<const double> sa);

/// (mu_sp - mu_sa) / sqrt((var_sp + var_sa) / 2) with n-1 variances.
double detectability_index(std::span<const double> sp, std::span<const double> sa);

struct SplitProtocol {
  int train_pairs = 100;
  int repeats = 10;
  std::uint64_t seed = 0;
};

struct DetectabilityEstimate {
  double auc = 0.0;
  double auc_std = 0.0;  // sample std across repeats
  double dprime = 0.0;   // mean across repeats
  int n_train_pairs = 0;
  int n_test_sp = 0;
  int n_test_sa = 0;
  int repeats = 0;
};

/// Repeated random train/test partitions: each repeat trains on `train_pairs` samples of
/// each class and tests on the remainder. Repeat r shuffles with a seed derived from
/// (protocol.seed, r), so results do not depend on `workers`.
DetectabilityEstimate auc_with_uncertainty(const Eigen::MatrixXd& channels_sp, const Eigen::MatrixXd& channels_sa,
                                           const SplitProtocol& protocol, int workers = 1);
DetectabilityEstimate auc_with_uncertainty(std::span<const Roi> sp, std::span<const Roi> sa,
                                           const ChannelBasis& basis, const SplitProtocol& protocol,
                                           int workers = 1);

}  // namespace lcd
