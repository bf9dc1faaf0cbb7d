#pragma once

#include <cstdint>
#include <vector>

namespace duallstm {

/// One sample of a vehicle trajectory at 10 Hz. Positions are local road
/// coordinates in meters: x lateral from the left road edge, y longitudinal
/// from the entry edge.
struct TrackFrame {
  std::int64_t frame_id = 0;
  double local_x = 0.0;        // m
  double local_y = 0.0;        // m
  double speed = 0.0;          // m/s, longitudinal
  double accel = 0.0;          // m/s^2, longitudinal
  int lane_id = 0;
  double vehicle_length = 0.0; // m
  int vehicle_type = 0;

  bool operator==(const TrackFrame&) const = default;
};

/// One vehicle's contiguous time series; frame_ids are strictly increasing
/// with no gaps (gapped source data is split into separate tracks).
struct Track {
  std::int64_t vehicle_id = 0;
  std::vector<TrackFrame> frames;

  bool operator==(const Track&) const = default;
};

}  // namespace duallstm
