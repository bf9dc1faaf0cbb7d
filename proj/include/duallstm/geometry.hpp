#pragma once

#include <filesystem>
#include <vector>

namespace duallstm {

/// Driver intention classes. Lane indices grow to the right, lane 1 is the
/// leftmost lane, so a left change decrements the index.
enum class IntentionClass : int { kLaneKeep = 0, kLeftChange = 1, kRightChange = 2 };

constexpr int kNumIntentionClasses = 3;

const char* intention_name(IntentionClass c);

/// Straight multi-lane road: uniformly spaced markings, lateral positions in
/// meters measured from the left road edge. Lanes are 1-based.
class LaneGeometry {
 public:
  LaneGeometry(int num_lanes, double lane_width, double leftmost_marking);

  /// I-80 defaults: 6 lanes of 3.66 m, left edge at 0.
  static LaneGeometry i80();
  static LaneGeometry from_config(const std::filesystem::path& path);

  int num_lanes() const { return num_lanes_; }
  double lane_width() const { return lane_width_; }
  const std::vector<double>& marking_positions() const { return markings_; }
  const std::vector<double>& centerline_positions() const { return centerlines_; }

  /// Centerline of a valid lane (1..num_lanes). Throws on invalid index.
  double centerline(int lane) const;

  /// Lane containing x, clamped to [1, num_lanes] for positions off the road.
  int lane_of(double x) const;

  bool valid_lane(int lane) const { return lane >= 1 && lane <= num_lanes_; }

 private:
  int num_lanes_;
  double lane_width_;
  std::vector<double> markings_;     // num_lanes + 1, strictly increasing
  std::vector<double> centerlines_;  // num_lanes
};

/// Marking position minimizing |x - marking|; ties break toward the smaller
/// position. Positions outside the road resolve to the nearest outer marking.
double nearest_marking(const LaneGeometry& geom, double x);

/// x_rel: signed offset from the nearest lane marking.
double relative_lateral(double x, double x_n);

/// x_dev: signed offset from the target-lane centerline.
double lateral_deviation(double x, double x_targ);

/// Lane the vehicle is heading to under the given intention; intentions that
/// would exit the road resolve to the current lane.
int target_lane(int current_lane, IntentionClass intention, const LaneGeometry& geom);

}  // namespace duallstm
