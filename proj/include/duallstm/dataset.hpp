#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "duallstm/features.hpp"
#include "duallstm/geometry.hpp"

namespace duallstm {

enum class UnitMode { kFeet, kMeters };

constexpr double kFeetToMeters = 0.3048;

struct ParseStats {
  std::size_t total_rows = 0;
  std::size_t malformed_rows = 0;
  std::size_t gap_splits = 0;
};

/// Trajectory-file ingestion. Whitespace- or comma-delimited rows in the
/// NGSIM column layout: Vehicle_ID Frame_ID Total_Frames Global_Time
/// Local_X Local_Y Global_X Global_Y v_Length v_Width v_Class v_Vel v_Acc
/// Lane_ID ... (extra columns ignored). Rows are grouped by vehicle and
/// frame-sorted; tracks with frame gaps are split at the gaps; malformed
/// rows are counted and skipped. Throws if more than 1% of rows are
/// malformed or the stream is unreadable.
std::vector<Track> parse_trajectory_file(std::istream& in, UnitMode unit_mode,
                                         ParseStats* stats = nullptr);

/// Writes tracks back in the same column order, meters, 17 significant
/// digits, so parse(serialize(tracks)) round-trips exactly.
void serialize_tracks(std::ostream& out, const std::vector<Track>& tracks);

struct LaneChangeEvent {
  std::int64_t vehicle_id = 0;
  bool left = false;           // toward lane 1
  std::size_t t_cross = 0;     // index of the first frame in the new lane
  int from_lane = 0;
  int to_lane = 0;
};

/// One event per marking crossing where the lane recomputed from the
/// (smoothed) lateral position changes and the vehicle stays in the new
/// lane for at least 2 s. Lane_ID column is ignored on purpose; it is
/// unreliable near markings.
std::vector<LaneChangeEvent> detect_lane_changes(const Track& track,
                                                 const LaneGeometry& geom);

/// Anchor frames inside [t_cross - 4 s, t_cross] of an event get that
/// event's class; overlapping intervals resolve to the nearest t_cross;
/// everything else is lane keeping.
IntentionClass label_intention(const std::vector<LaneChangeEvent>& events,
                               std::size_t anchor);
IntentionClass label_intention(const Track& track, const LaneGeometry& geom,
                               std::size_t anchor);

constexpr std::size_t kLabelIntervalFrames = 40;  // 4 s at 10 Hz

struct SliceConfig {
  std::size_t window = kWindowSteps;
  std::size_t stride = 10;  // window updates every second at 10 Hz
  std::size_t horizon = kHorizonSteps;
};

struct SampleSet {
  std::vector<FeatureWindow> windows;

  // Provenance: enough to reproduce the slice bit-for-bit.
  std::vector<std::string> sources;
  std::uint64_t seed = 0;
  SliceConfig config;
  std::size_t skipped_anchors = 0;
  std::size_t count_lk = 0, count_llc = 0, count_rlc = 0;

  void write_manifest(std::ostream& out) const;
};

/// Windows at anchors every `stride` frames wherever a full history and a
/// full horizon exist. Labels come from detect_lane_changes; the x_dev
/// reference is the ground-truth target lane of the label.
SampleSet slice_windows(const std::vector<Track>& tracks, const LaneGeometry& geom,
                        const SliceConfig& config = SliceConfig{});

/// Split by vehicle (all windows of one vehicle on one side) so no track
/// leaks across the boundary. Greedy fill of the train side in shuffled
/// vehicle order until it holds `ratio` of the windows.
std::pair<SampleSet, SampleSet> split_train_val(const SampleSet& samples, double ratio,
                                                std::uint64_t seed);

}  // namespace duallstm
