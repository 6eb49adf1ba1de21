#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lcd {

/// Row-major dense matrix; row 0 is the top of the image (largest y).
template <typename Scalar>
using ImageMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Matrix = ImageMatrix<double>;

enum class Unit { HU, MuPerMm, Normalized };

std::string_view to_string(Unit unit);
Unit unit_from_string(std::string_view text);

/// Square image on a centered grid with isotropic pixel pitch.
struct ImageGrid {
  Matrix values;
  double pixel_mm = 1.0;
  Unit unit = Unit::HU;

  ImageGrid() = default;
  ImageGrid(Matrix v, double pixel, Unit u) : values(std::move(v)), pixel_mm(pixel), unit(u) {}

  Eigen::Index size() const { return values.rows(); }
  double fov_mm() const { return static_cast<double>(values.rows()) * pixel_mm; }

  /// Pixel-index coordinates (fractional) of a point given in mm, y up.
  double col_of(double x_mm) const { return x_mm / pixel_mm + 0.5 * static_cast<double>(size() - 1); }
  double row_of(double y_mm) const { return 0.5 * static_cast<double>(size() - 1) - y_mm / pixel_mm; }
  double x_of(double col) const { return (col - 0.5 * static_cast<double>(size() - 1)) * pixel_mm; }
  double y_of(double row) const { return (0.5 * static_cast<double>(size() - 1) - row) * pixel_mm; }
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_unit(const ImageGrid& img, Unit expected, const char* what) {
  if (img.unit != expected) {
    throw UnitError(std::string(what) + ": expected unit " + std::string(to_string(expected)) + ", got " +
                    std::string(to_string(img.unit)));
  }
}

inline void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* what) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
    throw ShapeError(std::string(what) + ": image shapes differ");
  }
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.derived().array().isFinite().all();
}

}  // namespace lcd
