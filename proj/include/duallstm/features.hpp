#pragma once

#include <cstdint>
#include <vector>

#include "duallstm/geometry.hpp"
#include "duallstm/lstm.hpp"
#include "duallstm/track.hpp"

namespace duallstm {

constexpr double kDt = 0.1;              // s, 10 Hz sampling
constexpr int kWindowSteps = 50;         // 5 s past observations
constexpr int kHorizonSteps = 50;        // 5 s prediction horizon
constexpr int kFeatureDim = 8;

// Longitudinal features are scaled to magnitudes comparable with the
// geometry-bounded lateral ones before entering the networks.
constexpr double kSpeedScale = 1.0 / 30.0;   // per m/s
constexpr double kAccelScale = 1.0 / 3.0;    // per m/s^2

/// Feature column order within a window row.
enum FeatureIndex : int {
  kXRel = 0,
  kXRelDot = 1,
  kXRelDdot = 2,
  kXDev = 3,
  kXDevDot = 4,
  kXDevDdot = 5,
  kVy = 6,
  kAy = 7,
};

/// Symmetric moving average, radius up to 2 (5 taps), shrinking at the
/// boundaries so affine series pass through unchanged.
std::vector<double> moving_average_5(const std::vector<double>& series);

struct SeriesDerivatives {
  std::vector<double> first;
  std::vector<double> second;
};

/// Central differences in the interior, one-sided first differences at the
/// boundaries; the boundary second derivative copies its interior
/// neighbour. Exact for affine (first) and quadratic (second, interior)
/// series. Requires length >= 3.
SeriesDerivatives finite_diff_derivatives(const std::vector<double>& series, double dt);

/// A 50-step observation window with its labels and anchor state. Feature
/// values are stored in physical units; to_model_inputs applies scaling.
struct FeatureWindow {
  Matrix features;  // kWindowSteps x kFeatureDim

  std::int64_t vehicle_id = 0;
  std::size_t anchor = 0;       // frame index of the last observed step
  int current_lane = 0;
  int target_lane_used = 0;     // lane the x_dev columns reference

  IntentionClass label = IntentionClass::kLaneKeep;

  // Per-step targets over the horizon and ground truth for evaluation.
  Vector future_accel;   // m/s^2
  Vector future_x_dev;   // m, relative to target_lane_used's centerline
  Vector future_x;       // m, absolute lateral
  Vector future_y;       // m, absolute longitudinal

  // Anchor state for kinematic reconstruction.
  double v0 = 0.0;
  double y0 = 0.0;
  double x0 = 0.0;

  /// Same window re-referenced to another lane: the x_dev feature column and
  /// the future_x_dev targets shift by the centerline difference.
  FeatureWindow with_target_lane(int lane, const LaneGeometry& geom) const;
};

/// Network input rows: lateral features as stored, v_y and a_y scaled.
std::vector<Vector> to_model_inputs(const FeatureWindow& window);

/// Regression target for the trajectory head: 50 scaled accelerations
/// followed by 50 lateral deviations in meters.
Vector trajectory_target(const FeatureWindow& window);

/// Assembles one window at `anchor` (frame index into track.frames): 50
/// past steps ending at the anchor, 50 future target steps. Lateral
/// positions are smoothed before differencing; the x_dev reference lane is
/// target_lane(current, intention_for_targets). Throws if history or
/// horizon is missing.
FeatureWindow build_feature_window(const Track& track, const LaneGeometry& geom,
                                   std::size_t anchor,
                                   IntentionClass intention_for_targets);

/// Features and anchor state only, no future targets; needs 50 frames of
/// history but no horizon. This is what classification sees at deployment.
FeatureWindow build_observation_window(const Track& track, const LaneGeometry& geom,
                                       std::size_t anchor,
                                       IntentionClass intention_for_reference);

/// True when 50 past frames exist at the anchor.
bool history_feasible(const Track& track, std::size_t anchor);

/// True when a full window plus horizon fits around the anchor.
bool window_feasible(const Track& track, std::size_t anchor);

}  // namespace duallstm
