#include "duallstm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "duallstm/rng.hpp"

namespace duallstm {

namespace {

constexpr std::size_t kDwellFrames = 20;  // 2 s: "successful" lane change

struct RawRow {
  std::int64_t vehicle_id;
  std::int64_t frame_id;
  double local_x, local_y, v_length, v_vel, v_acc;
  int v_class, lane_id;
};

bool parse_row(const std::string& line, UnitMode unit_mode, RawRow* row) {
  std::string spaced = line;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream ss(spaced);
  std::vector<double> cols;
  double v;
  while (ss >> v) cols.push_back(v);
  if (cols.size() < 14) return false;

  const double unit = (unit_mode == UnitMode::kFeet) ? kFeetToMeters : 1.0;
  row->vehicle_id = static_cast<std::int64_t>(cols[0]);
  row->frame_id = static_cast<std::int64_t>(cols[1]);
  row->local_x = cols[4] * unit;
  row->local_y = cols[5] * unit;
  row->v_length = cols[8] * unit;
  row->v_class = static_cast<int>(cols[10]);
  row->v_vel = cols[11] * unit;
  row->v_acc = cols[12] * unit;
  row->lane_id = static_cast<int>(cols[13]);
  return std::isfinite(row->local_x) && std::isfinite(row->local_y) &&
         std::isfinite(row->v_vel) && std::isfinite(row->v_acc);
}

}  // namespace

std::vector<Track> parse_trajectory_file(std::istream& in, UnitMode unit_mode,
                                         ParseStats* stats_out) {
  ParseStats stats;
  std::map<std::int64_t, std::size_t> slot;  // vehicle -> index in order of appearance
  std::vector<std::vector<RawRow>> rows_by_vehicle;

  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    ++stats.total_rows;
    RawRow row;
    if (!parse_row(line, unit_mode, &row)) {
      ++stats.malformed_rows;
      continue;
    }
    auto [it, inserted] = slot.try_emplace(row.vehicle_id, rows_by_vehicle.size());
    if (inserted) rows_by_vehicle.emplace_back();
    rows_by_vehicle[it->second].push_back(row);
  }
  if (in.bad()) throw std::runtime_error("parse_trajectory_file: unreadable stream");
  if (stats.total_rows > 0 &&
      stats.malformed_rows * 100 > stats.total_rows) {
    throw std::runtime_error("parse_trajectory_file: " + std::to_string(stats.malformed_rows) +
                             " of " + std::to_string(stats.total_rows) +
                             " rows malformed (>1%)");
  }

  std::vector<Track> tracks;
  for (auto& rows : rows_by_vehicle) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.frame_id < b.frame_id; });
    Track current;
    current.vehicle_id = rows.front().vehicle_id;
    std::int64_t prev_frame = rows.front().frame_id - 1;
    for (const RawRow& r : rows) {
      if (r.frame_id == prev_frame) {  // duplicate frame: skip, count
        ++stats.malformed_rows;
        continue;
      }
      if (!current.frames.empty() && r.frame_id != prev_frame + 1) {
        tracks.push_back(std::move(current));
        ++stats.gap_splits;
        current = Track{};
        current.vehicle_id = r.vehicle_id;
      }
      current.frames.push_back(TrackFrame{r.frame_id, r.local_x, r.local_y, r.v_vel, r.v_acc,
                                          r.lane_id, r.v_length, r.v_class});
      prev_frame = r.frame_id;
    }
    if (!current.frames.empty()) tracks.push_back(std::move(current));
  }

  if (stats_out) *stats_out = stats;
  return tracks;
}

void serialize_tracks(std::ostream& out, const std::vector<Track>& tracks) {
  char buf[512];
  for (const Track& t : tracks) {
    for (const TrackFrame& f : t.frames) {
      // Vehicle_ID Frame_ID Total_Frames Global_Time Local_X Local_Y
      // Global_X Global_Y v_Length v_Width v_Class v_Vel v_Acc Lane_ID
      // Preceding Following Space_Headway Time_Headway
      std::snprintf(buf, sizeof(buf),
                    "%lld %lld %zu %lld %.17g %.17g %.17g %.17g %.17g 2 %d %.17g %.17g %d 0 0 0 0\n",
                    static_cast<long long>(t.vehicle_id), static_cast<long long>(f.frame_id),
                    t.frames.size(), static_cast<long long>(f.frame_id) * 100, f.local_x,
                    f.local_y, f.local_x, f.local_y, f.vehicle_length, f.vehicle_type, f.speed,
                    f.accel, f.lane_id);
      out << buf;
    }
  }
}

std::vector<LaneChangeEvent> detect_lane_changes(const Track& track,
                                                 const LaneGeometry& geom) {
  std::vector<LaneChangeEvent> events;
  const std::size_t n = track.frames.size();
  if (n < 2) return events;

  std::vector<double> lateral(n);
  for (std::size_t i = 0; i < n; ++i) lateral[i] = track.frames[i].local_x;
  const std::vector<double> smooth = moving_average_5(lateral);

  std::vector<int> lane(n);
  for (std::size_t i = 0; i < n; ++i) lane[i] = geom.lane_of(smooth[i]);

  // Dwell checks are majority votes (80% of 2 s) so a single noise-flicker
  // frame near the marking neither fabricates nor drops an event. The
  // pre-crossing dwell in the source lane rejects the return leg of an
  // aborted change.
  const std::size_t quorum = (kDwellFrames * 4) / 5;
  auto occupancy = [&lane](std::size_t begin, std::size_t end, int which) {
    std::size_t hits = 0;
    for (std::size_t j = begin; j < end; ++j) {
      if (lane[j] == which) ++hits;
    }
    return hits;
  };

  for (std::size_t i = 1; i < n; ++i) {
    if (lane[i] == lane[i - 1]) continue;
    if (std::abs(lane[i] - lane[i - 1]) != 1) continue;  // tracking glitch
    if (i + kDwellFrames > n) continue;                  // cannot verify dwell
    if (i < kDwellFrames) continue;
    if (occupancy(i, i + kDwellFrames, lane[i]) < quorum) continue;
    if (occupancy(i - kDwellFrames, i, lane[i - 1]) < quorum) continue;
    if (!events.empty() && events.back().to_lane == lane[i] &&
        i - events.back().t_cross < kDwellFrames) {
      continue;  // flicker re-entry of an already emitted crossing
    }
    LaneChangeEvent ev;
    ev.vehicle_id = track.vehicle_id;
    ev.from_lane = lane[i - 1];
    ev.to_lane = lane[i];
    ev.left = ev.to_lane < ev.from_lane;
    ev.t_cross = i;
    events.push_back(ev);
  }
  return events;
}

IntentionClass label_intention(const std::vector<LaneChangeEvent>& events,
                               std::size_t anchor) {
  const LaneChangeEvent* best = nullptr;
  std::size_t best_dist = 0;
  for (const LaneChangeEvent& ev : events) {
    if (anchor > ev.t_cross) continue;
    const std::size_t dist = ev.t_cross - anchor;
    if (dist > kLabelIntervalFrames) continue;
    if (!best || dist < best_dist) {
      best = &ev;
      best_dist = dist;
    }
  }
  if (!best) return IntentionClass::kLaneKeep;
  return best->left ? IntentionClass::kLeftChange : IntentionClass::kRightChange;
}

IntentionClass label_intention(const Track& track, const LaneGeometry& geom,
                               std::size_t anchor) {
  return label_intention(detect_lane_changes(track, geom), anchor);
}

void SampleSet::write_manifest(std::ostream& out) const {
  for (const auto& s : sources) out << "source=" << s << "\n";
  out << "seed=" << seed << "\n";
  out << "window=" << config.window << "\n";
  out << "stride=" << config.stride << "\n";
  out << "horizon=" << config.horizon << "\n";
  out << "windows=" << windows.size() << "\n";
  out << "count_lk=" << count_lk << "\n";
  out << "count_llc=" << count_llc << "\n";
  out << "count_rlc=" << count_rlc << "\n";
  out << "skipped_anchors=" << skipped_anchors << "\n";
}

SampleSet slice_windows(const std::vector<Track>& tracks, const LaneGeometry& geom,
                        const SliceConfig& config) {
  if (config.window != kWindowSteps || config.horizon != kHorizonSteps) {
    throw std::invalid_argument("slice_windows: window/horizon must be 50 steps");
  }
  SampleSet set;
  set.config = config;
  for (const Track& track : tracks) {
    const auto events = detect_lane_changes(track, geom);
    const std::size_t first = config.window - 1;
    for (std::size_t anchor = first; anchor < track.frames.size(); anchor += config.stride) {
      if (!window_feasible(track, anchor)) {
        ++set.skipped_anchors;
        continue;
      }
      const IntentionClass label = label_intention(events, anchor);
      try {
        set.windows.push_back(build_feature_window(track, geom, anchor, label));
      } catch (const std::exception&) {
        ++set.skipped_anchors;
        continue;
      }
      switch (label) {
        case IntentionClass::kLaneKeep: ++set.count_lk; break;
        case IntentionClass::kLeftChange: ++set.count_llc; break;
        case IntentionClass::kRightChange: ++set.count_rlc; break;
      }
    }
  }
  return set;
}

std::pair<SampleSet, SampleSet> split_train_val(const SampleSet& samples, double ratio,
                                                std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("split_train_val: ratio must lie in (0,1)");
  }

  std::vector<std::int64_t> vehicles;
  std::map<std::int64_t, std::size_t> counts;
  for (const FeatureWindow& w : samples.windows) {
    auto [it, inserted] = counts.try_emplace(w.vehicle_id, 0);
    if (inserted) vehicles.push_back(w.vehicle_id);
    ++it->second;
  }

  Rng rng(derive_seed(seed, "split_train_val"));
  rng.shuffle(vehicles);

  const double target = ratio * static_cast<double>(samples.windows.size());
  std::map<std::int64_t, bool> in_train;
  std::size_t cum = 0;
  for (std::int64_t v : vehicles) {
    if (static_cast<double>(cum) >= target) {
      in_train[v] = false;
    } else {
      in_train[v] = true;
      cum += counts[v];
    }
  }

  SampleSet train, val;
  train.sources = samples.sources;
  val.sources = samples.sources;
  train.config = val.config = samples.config;
  train.seed = val.seed = seed;
  for (const FeatureWindow& w : samples.windows) {
    SampleSet& side = in_train[w.vehicle_id] ? train : val;
    side.windows.push_back(w);
    switch (w.label) {
      case IntentionClass::kLaneKeep: ++side.count_lk; break;
      case IntentionClass::kLeftChange: ++side.count_llc; break;
      case IntentionClass::kRightChange: ++side.count_rlc; break;
    }
  }
  return {std::move(train), std::move(val)};
}

}  // namespace duallstm
