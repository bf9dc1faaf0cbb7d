#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "duallstm/dataset.hpp"
#include "duallstm/geometry.hpp"
#include "duallstm/track.hpp"

namespace duallstm {

/// Desk-scale synthetic traffic. Longitudinal kinematics follow the same
/// forward-Euler recursion the predictor integrates with, so integration
/// identities hold to machine precision; lane changes are raised-cosine
/// lateral transitions of exactly one lane width.
struct SynthConfig {
  int lk_tracks = 200;
  int llc_tracks = 50;
  int rlc_tracks = 50;
  double duration_s = 50.0;
  double speed_min = 15.0;             // m/s
  double speed_max = 30.0;             // m/s
  double accel_max = 0.2;              // m/s^2, piecewise-constant segments
  double segment_min_s = 10.0;
  double segment_max_s = 20.0;
  double lateral_noise_sigma = 0.05;   // m
  double lane_change_duration_s = 4.0;
  // Crossing early in the track keeps every feasible window's horizon
  // either inside the labeled interval or past visible lateral motion.
  double cross_time_min_s = 7.0;
  double cross_time_max_s = 8.8;

  static SynthConfig from_config(const std::filesystem::path& path);
  void validate(const LaneGeometry& geom) const;
};

struct SynthResult {
  std::vector<Track> tracks;
  std::vector<LaneChangeEvent> scheduled;  // ground truth, noiseless profile
};

SynthResult synth_generate(const SynthConfig& config, const LaneGeometry& geom,
                           std::uint64_t seed);

}  // namespace duallstm
