#pragma once

#include "lcd/image.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace lcd {

inline constexpr double kMuWater = 0.02;              // mm^-1, monoenergetic
inline constexpr double kFluxNormal = 0.85 * 2.25e5;  // photons per detector element per view

/// mu = mu_water * (1 + HU / 1000)
template <typename Scalar>
constexpr Scalar hu_to_mu(Scalar hu, Scalar mu_water = Scalar(kMuWater)) {
  return mu_water * (Scalar(1) + hu / Scalar(1000));
}

template <typename Scalar>
constexpr Scalar mu_to_hu(Scalar mu, Scalar mu_water = Scalar(kMuWater)) {
  return Scalar(1000) * (mu / mu_water - Scalar(1));
}

struct DiskSpec {
  double center_x_mm = 0.0;
  double center_y_mm = 0.0;
  double radius_mm = 1.0;
  double contrast_hu = 0.0;
};

/// Water background disk in air, plus contrast inserts ordered by radius ascending
/// (index 0 is the smallest insert).
struct PhantomSpec {
  DiskSpec background;
  std::vector<DiskSpec> inserts;

  /// Throws std::invalid_argument on non-positive radii, inserts leaving the
  /// background, or overlapping inserts.
  void validate() const;
};

/// Layout constants for the CCT189-style phantom. Insert sizes and contrasts are fixed;
/// the placement is configurable.
struct Cct189Layout {
  double background_radius_mm = 100.0;
  double insert_ring_radius_mm = 50.0;
  std::vector<double> insert_angles_deg{45.0, 135.0, 225.0, 315.0};
};

/// (diameter mm, contrast HU) of the four low-contrast inserts, smallest first.
struct InsertClass {
  double diameter_mm;
  double contrast_hu;
};
inline const std::vector<InsertClass>& cct189_insert_classes() {
  static const std::vector<InsertClass> classes{{3.0, 14.0}, {5.0, 7.0}, {7.0, 5.0}, {10.0, 3.0}};
  return classes;
}

/// Inserts in the order 3 mm/14 HU, 5 mm/7 HU, 7 mm/5 HU, 10 mm/3 HU, one per layout angle.
PhantomSpec build_cct189(const Cct189Layout& layout = {});
PhantomSpec build_uniform_water(const Cct189Layout& layout = {});

/// Flat, centered, equispaced detector; full 360 degree scan with equiangular views.
struct FanBeamGeometry {
  double src_to_iso_mm = 500.0;
  double src_to_det_mm = 1000.0;
  int n_views = 984;
  int n_channels = 880;
  double det_pitch_mm = 1.0;

  double view_angle(int view) const;
  /// Physical detector coordinate of a channel center, measured from the central ray.
  double channel_offset(int channel) const;
  /// Radius at the iso-center that the fan fully covers.
  double covered_radius_mm() const;
  void validate() const;
};

bool operator==(const FanBeamGeometry& a, const FanBeamGeometry& b);

struct Ray {
  Eigen::Vector2d origin;
  Eigen::Vector2d direction;  // unit length
};

/// Ray from the source to the center of detector cell `channel` at view `view`.
Ray fan_ray(const FanBeamGeometry& geom, int view, int channel);

/// Length of the intersection of an infinite line with a disk, via the perpendicular distance.
template <typename Scalar>
Scalar chord_length(const Eigen::Matrix<Scalar, 2, 1>& origin, const Eigen::Matrix<Scalar, 2, 1>& unit_dir,
                    const Eigen::Matrix<Scalar, 2, 1>& center, Scalar radius) {
  const Eigen::Matrix<Scalar, 2, 1> rel = center - origin;
  const Scalar dist = std::abs(unit_dir.x() * rel.y() - unit_dir.y() * rel.x());
  if (dist >= radius) return Scalar(0);
  return Scalar(2) * std::sqrt((radius - dist) * (radius + dist));
}

/// Exact integral of mu along the ray (background at mu_water, inserts add their delta-mu).
double line_integral(const PhantomSpec& spec, const Ray& ray, double mu_water = kMuWater);

struct Sinogram {
  Matrix data;  // n_views x n_channels
  FanBeamGeometry geometry;
  std::uint64_t seed = 0;  // 0 for noiseless
  double flux_i0 = 0.0;    // 0 for noiseless
};

/// Throws std::invalid_argument when the fan does not cover the phantom.
Sinogram forward_project(const PhantomSpec& spec, const FanBeamGeometry& geom, double mu_water = kMuWater,
                         int workers = 1);

struct DoseLevel {
  double fraction = 1.0;
  double flux_i0() const { return fraction * kFluxNormal; }
};

/// Poisson counts around flux * exp(-p), log-converted back with zero counts clamped to one.
/// Entry (v, c) draws from a generator seeded by (seed, v * n_channels + c), so the
/// result is independent of worker count.
Sinogram apply_poisson_noise(const Sinogram& clean, const DoseLevel& dose, std::uint64_t seed, int workers = 1);

/// Seed for scan `scan_index` at dose `dose_index` of a study.
std::uint64_t scan_seed(std::uint64_t study_seed, std::uint64_t dose_index, std::uint64_t scan_index);

/// Point-sampled rendering of the phantom (HU, air -1000) on an n x n grid; supersampled
/// `ss` x `ss` per pixel.
ImageGrid rasterize(const PhantomSpec& spec, int n, double pixel_mm, int ss = 4);

}  // namespace lcd
