#pragma once

#include "lcd/config.hpp"

namespace testcfg {

/// A coarse scanner and a 128-pixel lattice: every stage of the study runs in seconds.
inline lcd::StudyConfig small_study() {
  lcd::StudyConfig c;
  c.geometry.n_views = 246;
  c.geometry.n_channels = 220;
  c.geometry.det_pitch_mm = 4.0;
  c.recon.n = 128;
  c.observer.roi_side = 16;
  c.n_sp_scans = 12;
  c.n_water_scans = 6;
  c.doses = {0.25, 1.0};
  c.tv.max_iters = 60;
  c.metrics.n_slices = 3;
  return c;
}

}  // namespace testcfg
