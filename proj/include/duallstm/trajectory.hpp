#pragma once

#include <cstdint>

#include "duallstm/features.hpp"
#include "duallstm/intention.hpp"
#include "duallstm/network.hpp"

namespace duallstm {

constexpr int kTrajectoryHidden = 128;

/// Second network: 128-cell LSTM + dense head emitting 50 future
/// accelerations and 50 future lateral deviations in one shot.
struct TrajectoryModel {
  LstmNetwork net;

  static TrajectoryModel init(std::uint64_t seed);
};

struct RawPrediction {
  Vector a_hat;      // m/s^2 over the horizon
  Vector x_dev_hat;  // m over the horizon
};

/// Head on the final hidden state; accelerations come back unscaled
/// (m/s^2), deviations in meters. The window's x_dev reference lane must
/// match how the caller wants the deviations interpreted.
RawPrediction predict_raw(const TrajectoryModel& model, const FeatureWindow& window);

struct IntegratedMotion {
  Vector v_hat;  // m/s
  Vector y_hat;  // m
};

/// Forward Euler: v(t) = v(t-1) + a(t) dt, y(t) = y(t-1) + v(t) dt, with
/// v(0)=v0, y(0)=y0. Negative speeds are not clamped.
IntegratedMotion integrate_longitudinal(double v0, double y0, const Vector& a_hat, double dt);

/// Lateral position: deviation plus the target-lane centerline.
Vector reconstruct_lateral(const Vector& x_dev_hat, int target_lane_idx,
                           const LaneGeometry& geom);

struct PredictionOutput {
  Vector a_hat;            // m/s^2
  Vector x_dev_hat;        // m (after the inference clamp)
  Vector v_hat;            // m/s
  Vector y_hat;            // m
  Vector x_hat;            // m
  Vector intention_probs;  // 3
  int target_lane = 0;
  int clamped_steps = 0;         // |x_dev_hat| > lane_width occurrences
  int negative_speed_steps = 0;  // diagnostic only, Eq. as written
};

/// Full pipeline for one window: classify on the current-lane-referenced
/// features, resolve the target lane, re-reference x_dev against it, run
/// the trajectory head, clamp deviations to one lane width, integrate.
PredictionOutput predict(const IntentionModel& intent_model,
                         const TrajectoryModel& traj_model, const FeatureWindow& window,
                         const LaneGeometry& geom);

}  // namespace duallstm
