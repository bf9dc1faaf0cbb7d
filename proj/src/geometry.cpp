#include "duallstm/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "duallstm/io.hpp"

namespace duallstm {

const char* intention_name(IntentionClass c) {
  switch (c) {
    case IntentionClass::kLaneKeep: return "LK";
    case IntentionClass::kLeftChange: return "LLC";
    case IntentionClass::kRightChange: return "RLC";
  }
  return "?";
}

LaneGeometry::LaneGeometry(int num_lanes, double lane_width, double leftmost_marking)
    : num_lanes_(num_lanes), lane_width_(lane_width) {
  if (num_lanes < 1) throw std::invalid_argument("LaneGeometry: num_lanes must be >= 1");
  if (!(lane_width > 0.0) || !std::isfinite(lane_width)) {
    throw std::invalid_argument("LaneGeometry: lane_width must be positive and finite");
  }
  if (!std::isfinite(leftmost_marking)) {
    throw std::invalid_argument("LaneGeometry: leftmost_marking must be finite");
  }
  markings_.resize(num_lanes + 1);
  centerlines_.resize(num_lanes);
  for (int i = 0; i <= num_lanes; ++i) markings_[i] = leftmost_marking + i * lane_width;
  for (int i = 0; i < num_lanes; ++i) centerlines_[i] = 0.5 * (markings_[i] + markings_[i + 1]);
}

LaneGeometry LaneGeometry::i80() { return LaneGeometry(6, 3.66, 0.0); }

LaneGeometry LaneGeometry::from_config(const std::filesystem::path& path) {
  const KeyValueMap kv = load_key_values(path);
  return LaneGeometry(static_cast<int>(kv_long(kv, "num_lanes", 6)),
                      kv_double(kv, "lane_width_m", 3.66),
                      kv_double(kv, "leftmost_marking_m", 0.0));
}

double LaneGeometry::centerline(int lane) const {
  if (!valid_lane(lane)) throw std::invalid_argument("centerline: invalid lane index");
  return centerlines_[lane - 1];
}

int LaneGeometry::lane_of(double x) const {
  if (x < markings_.front()) return 1;
  for (int lane = 1; lane <= num_lanes_; ++lane) {
    if (x < markings_[lane]) return lane;
  }
  return num_lanes_;
}

double nearest_marking(const LaneGeometry& geom, double x) {
  const auto& ms = geom.marking_positions();
  double best = ms.front();
  double best_dist = std::abs(x - best);
  for (double m : ms) {
    const double d = std::abs(x - m);
    if (d < best_dist) {  // strict: ties keep the smaller position
      best = m;
      best_dist = d;
    }
  }
  return best;
}

double relative_lateral(double x, double x_n) { return x - x_n; }

double lateral_deviation(double x, double x_targ) { return x - x_targ; }

int target_lane(int current_lane, IntentionClass intention, const LaneGeometry& geom) {
  if (!geom.valid_lane(current_lane)) {
    throw std::invalid_argument("target_lane: invalid current lane index");
  }
  int lane = current_lane;
  if (intention == IntentionClass::kLeftChange) lane = current_lane - 1;
  if (intention == IntentionClass::kRightChange) lane = current_lane + 1;
  if (!geom.valid_lane(lane)) lane = current_lane;
  return lane;
}

}  // namespace duallstm
