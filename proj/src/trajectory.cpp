#include "duallstm/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace duallstm {

TrajectoryModel TrajectoryModel::init(std::uint64_t seed) {
  return TrajectoryModel{init_network(kFeatureDim, kTrajectoryHidden, 2 * kHorizonSteps,
                                      HeadKind::kRegression, seed)};
}

RawPrediction predict_raw(const TrajectoryModel& model, const FeatureWindow& window) {
  const Vector out = forward_output(model.net, to_model_inputs(window));
  RawPrediction raw;
  raw.a_hat = out.head(kHorizonSteps) / kAccelScale;
  raw.x_dev_hat = out.tail(kHorizonSteps);
  return raw;
}

IntegratedMotion integrate_longitudinal(double v0, double y0, const Vector& a_hat,
                                        double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_longitudinal: dt must be positive");
  if (!std::isfinite(v0) || !std::isfinite(y0) || !a_hat.allFinite()) {
    throw std::invalid_argument("integrate_longitudinal: non-finite input");
  }
  IntegratedMotion m;
  m.v_hat.resize(a_hat.size());
  m.y_hat.resize(a_hat.size());
  double v = v0;
  double y = y0;
  for (Eigen::Index t = 0; t < a_hat.size(); ++t) {
    v = v + a_hat[t] * dt;
    y = y + v * dt;
    m.v_hat[t] = v;
    m.y_hat[t] = y;
  }
  return m;
}

Vector reconstruct_lateral(const Vector& x_dev_hat, int target_lane_idx,
                           const LaneGeometry& geom) {
  return x_dev_hat.array() + geom.centerline(target_lane_idx);
}

PredictionOutput predict(const IntentionModel& intent_model,
                         const TrajectoryModel& traj_model, const FeatureWindow& window,
                         const LaneGeometry& geom) {
  // Classification always sees the current-lane reference; before any
  // intention is known that is the only consistent frame.
  const FeatureWindow current_ref = window.with_target_lane(window.current_lane, geom);

  PredictionOutput out;
  out.intention_probs = classify(intent_model, current_ref);
  const IntentionClass cls = argmax_intention(out.intention_probs);
  out.target_lane = target_lane(window.current_lane, cls, geom);

  const FeatureWindow target_ref = current_ref.with_target_lane(out.target_lane, geom);
  RawPrediction raw = predict_raw(traj_model, target_ref);

  const double bound = geom.lane_width();
  for (Eigen::Index t = 0; t < raw.x_dev_hat.size(); ++t) {
    if (std::abs(raw.x_dev_hat[t]) > bound) {
      raw.x_dev_hat[t] = std::clamp(raw.x_dev_hat[t], -bound, bound);
      ++out.clamped_steps;
    }
  }

  const IntegratedMotion motion = integrate_longitudinal(window.v0, window.y0, raw.a_hat, kDt);
  for (Eigen::Index t = 0; t < motion.v_hat.size(); ++t) {
    if (motion.v_hat[t] < 0.0) ++out.negative_speed_steps;
  }

  out.a_hat = std::move(raw.a_hat);
  out.x_dev_hat = std::move(raw.x_dev_hat);
  out.v_hat = motion.v_hat;
  out.y_hat = motion.y_hat;
  out.x_hat = reconstruct_lateral(out.x_dev_hat, out.target_lane, geom);
  return out;
}

}  // namespace duallstm
