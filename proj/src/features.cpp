#include "duallstm/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace duallstm {

std::vector<double> moving_average_5(const std::vector<double>& series) {
  const std::size_t n = series.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = std::min<std::size_t>({2, i, n - 1 - i});
    double sum = 0.0;
    for (std::size_t j = i - r; j <= i + r; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(2 * r + 1);
  }
  return out;
}

SeriesDerivatives finite_diff_derivatives(const std::vector<double>& series, double dt) {
  const std::size_t n = series.size();
  if (n < 3) throw std::invalid_argument("finite_diff_derivatives: series too short");
  if (!(dt > 0.0)) throw std::invalid_argument("finite_diff_derivatives: dt must be positive");

  SeriesDerivatives d;
  d.first.resize(n);
  d.second.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d.first[i] = (series[i + 1] - series[i - 1]) / (2.0 * dt);
    d.second[i] = (series[i + 1] - 2.0 * series[i] + series[i - 1]) / (dt * dt);
  }
  d.first[0] = (series[1] - series[0]) / dt;
  d.first[n - 1] = (series[n - 1] - series[n - 2]) / dt;
  d.second[0] = d.second[1];
  d.second[n - 1] = d.second[n - 2];
  return d;
}

FeatureWindow FeatureWindow::with_target_lane(int lane, const LaneGeometry& geom) const {
  FeatureWindow w = *this;
  if (lane == target_lane_used) return w;
  const double shift = geom.centerline(target_lane_used) - geom.centerline(lane);
  w.features.col(kXDev).array() += shift;
  w.future_x_dev.array() += shift;
  w.target_lane_used = lane;
  return w;
}

std::vector<Vector> to_model_inputs(const FeatureWindow& window) {
  std::vector<Vector> xs;
  xs.reserve(window.features.rows());
  for (Eigen::Index t = 0; t < window.features.rows(); ++t) {
    Vector x = window.features.row(t).transpose();
    x[kVy] *= kSpeedScale;
    x[kAy] *= kAccelScale;
    xs.push_back(std::move(x));
  }
  return xs;
}

Vector trajectory_target(const FeatureWindow& window) {
  Vector t(2 * kHorizonSteps);
  t.head(kHorizonSteps) = window.future_accel * kAccelScale;
  t.tail(kHorizonSteps) = window.future_x_dev;
  return t;
}

bool history_feasible(const Track& track, std::size_t anchor) {
  return anchor + 1 >= static_cast<std::size_t>(kWindowSteps) && anchor < track.frames.size();
}

bool window_feasible(const Track& track, std::size_t anchor) {
  return history_feasible(track, anchor) && anchor + kHorizonSteps < track.frames.size();
}

FeatureWindow build_observation_window(const Track& track, const LaneGeometry& geom,
                                       std::size_t anchor,
                                       IntentionClass intention_for_reference) {
  if (!history_feasible(track, anchor)) {
    throw std::invalid_argument("build_observation_window: insufficient history");
  }

  const std::size_t begin = anchor + 1 - kWindowSteps;

  // Smooth the lateral positions of the whole span once; derivatives come
  // from the smoothed series so marking/centerline switches cannot inject
  // lane-width/dt spikes.
  std::vector<double> lateral(kWindowSteps);
  for (int t = 0; t < kWindowSteps; ++t) lateral[t] = track.frames[begin + t].local_x;
  const std::vector<double> smooth = moving_average_5(lateral);
  const SeriesDerivatives deriv = finite_diff_derivatives(smooth, kDt);

  FeatureWindow w;
  w.vehicle_id = track.vehicle_id;
  w.anchor = anchor;
  w.current_lane = geom.lane_of(smooth.back());
  w.label = intention_for_reference;
  w.target_lane_used = target_lane(w.current_lane, intention_for_reference, geom);
  const double targ_center = geom.centerline(w.target_lane_used);

  w.features.resize(kWindowSteps, kFeatureDim);
  for (int t = 0; t < kWindowSteps; ++t) {
    const TrackFrame& f = track.frames[begin + t];
    const double x = smooth[t];
    const double x_n = nearest_marking(geom, x);
    w.features(t, kXRel) = relative_lateral(x, x_n);
    w.features(t, kXRelDot) = deriv.first[t];
    w.features(t, kXRelDdot) = deriv.second[t];
    w.features(t, kXDev) = lateral_deviation(x, targ_center);
    w.features(t, kXDevDot) = deriv.first[t];
    w.features(t, kXDevDdot) = deriv.second[t];
    w.features(t, kVy) = f.speed;
    w.features(t, kAy) = f.accel;
  }

  const TrackFrame& af = track.frames[anchor];
  w.v0 = af.speed;
  w.y0 = af.local_y;
  w.x0 = af.local_x;

  if (!w.features.allFinite()) {
    throw std::invalid_argument("build_observation_window: non-finite feature value");
  }
  return w;
}

FeatureWindow build_feature_window(const Track& track, const LaneGeometry& geom,
                                   std::size_t anchor,
                                   IntentionClass intention_for_targets) {
  if (!window_feasible(track, anchor)) {
    throw std::invalid_argument("build_feature_window: insufficient history or horizon");
  }

  FeatureWindow w = build_observation_window(track, geom, anchor, intention_for_targets);
  const double targ_center = geom.centerline(w.target_lane_used);

  w.future_accel.resize(kHorizonSteps);
  w.future_x_dev.resize(kHorizonSteps);
  w.future_x.resize(kHorizonSteps);
  w.future_y.resize(kHorizonSteps);
  for (int t = 0; t < kHorizonSteps; ++t) {
    const TrackFrame& f = track.frames[anchor + 1 + t];
    w.future_accel[t] = f.accel;
    w.future_x[t] = f.local_x;
    w.future_y[t] = f.local_y;
    w.future_x_dev[t] = lateral_deviation(f.local_x, targ_center);
  }
  return w;
}

}  // namespace duallstm
