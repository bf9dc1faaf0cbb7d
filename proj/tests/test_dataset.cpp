#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "duallstm/dataset.hpp"
#include "duallstm/synth.hpp"

using namespace duallstm;

namespace {

std::string row(std::int64_t veh, std::int64_t frame, double x, double y,
                double vel = 20.0, double acc = 0.1, int lane = 2) {
  std::ostringstream ss;
  ss << veh << " " << frame << " 100 " << frame * 100 << " " << x << " " << y
     << " " << x << " " << y << " 4.5 2 2 " << vel << " " << acc << " " << lane
     << " 0 0 0 0\n";
  return ss.str();
}

Track straight_track(std::int64_t id, std::size_t frames, double x, double speed) {
  Track t;
  t.vehicle_id = id;
  t.frames.resize(frames);
  double y = 0.0;
  for (std::size_t f = 0; f < frames; ++f) {
    if (f > 0) y += speed * kDt;
    t.frames[f] = TrackFrame{static_cast<std::int64_t>(f) + 1, x, y, speed, 0.0, 2, 4.5, 2};
  }
  return t;
}

}  // namespace

TEST_CASE("parse: empty stream yields nothing, no errors") {
  std::istringstream in("");
  ParseStats stats;
  const auto tracks = parse_trajectory_file(in, UnitMode::kMeters, &stats);
  CHECK(tracks.empty());
  CHECK(stats.total_rows == 0);
  CHECK(stats.malformed_rows == 0);
}

TEST_CASE("parse: interleaved vehicles are grouped and frame-sorted") {
  std::ostringstream data;
  data << row(2, 11, 5.0, 10.0) << row(1, 3, 1.0, 0.0) << row(2, 10, 5.0, 9.0)
       << row(1, 1, 1.0, 0.0) << row(1, 2, 1.0, 0.0) << row(2, 12, 5.0, 11.0);
  std::istringstream in(data.str());
  const auto tracks = parse_trajectory_file(in, UnitMode::kMeters, nullptr);
  REQUIRE(tracks.size() == 2);
  CHECK(tracks[0].vehicle_id == 2);  // first appearance order
  CHECK(tracks[1].vehicle_id == 1);
  REQUIRE(tracks[0].frames.size() == 3);
  REQUIRE(tracks[1].frames.size() == 3);
  CHECK(tracks[0].frames[0].frame_id == 10);
  CHECK(tracks[0].frames[2].frame_id == 12);
  CHECK(tracks[1].frames[0].frame_id == 1);
}

TEST_CASE("parse: feet convert to meters") {
  std::istringstream in(row(1, 1, 12.0, 100.0, 60.0, 3.0));
  const auto tracks = parse_trajectory_file(in, UnitMode::kFeet, nullptr);
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].frames[0].local_x == doctest::Approx(3.6576).epsilon(1e-12));
  CHECK(tracks[0].frames[0].local_y == doctest::Approx(30.48).epsilon(1e-12));
  CHECK(tracks[0].frames[0].speed == doctest::Approx(18.288).epsilon(1e-12));
  CHECK(tracks[0].frames[0].accel == doctest::Approx(0.9144).epsilon(1e-12));
}

TEST_CASE("parse: malformed rows are counted; above 1% is fatal") {
  std::ostringstream ok;
  for (int f = 1; f <= 200; ++f) ok << row(1, f, 5.0, f * 2.0);
  {
    std::istringstream in(ok.str() + "garbage line\n");
    ParseStats stats;
    const auto tracks = parse_trajectory_file(in, UnitMode::kMeters, &stats);
    CHECK(tracks.size() == 1);
    CHECK(stats.malformed_rows == 1);
    CHECK(stats.total_rows == 201);
  }
  {
    std::istringstream in(ok.str() + "bad\nbad\nbad\n");  // 3 of 203 > 1%
    CHECK_THROWS_AS(parse_trajectory_file(in, UnitMode::kMeters, nullptr), std::runtime_error);
  }
}

TEST_CASE("parse: frame gaps split tracks") {
  std::ostringstream data;
  for (int f = 1; f <= 5; ++f) data << row(7, f, 5.0, f * 2.0);
  for (int f = 9; f <= 12; ++f) data << row(7, f, 5.0, f * 2.0);
  std::istringstream in(data.str());
  ParseStats stats;
  const auto tracks = parse_trajectory_file(in, UnitMode::kMeters, &stats);
  REQUIRE(tracks.size() == 2);
  CHECK(tracks[0].frames.size() == 5);
  CHECK(tracks[1].frames.size() == 4);
  CHECK(tracks[0].vehicle_id == 7);
  CHECK(tracks[1].vehicle_id == 7);
  CHECK(stats.gap_splits == 1);
}

TEST_CASE("parse/serialize round-trip is exact in meters mode") {
  const LaneGeometry g = LaneGeometry::i80();
  SynthConfig cfg;
  cfg.lk_tracks = 3;
  cfg.llc_tracks = 1;
  cfg.rlc_tracks = 1;
  cfg.duration_s = 15.0;
  const auto synth = synth_generate(cfg, g, 99);

  std::ostringstream out;
  serialize_tracks(out, synth.tracks);
  std::istringstream in(out.str());
  const auto reparsed = parse_trajectory_file(in, UnitMode::kMeters, nullptr);
  REQUIRE(reparsed.size() == synth.tracks.size());
  for (std::size_t i = 0; i < reparsed.size(); ++i) {
    CHECK(reparsed[i] == synth.tracks[i]);
  }
}

TEST_CASE("detect_lane_changes: none on a centerline track") {
  const LaneGeometry g = LaneGeometry::i80();
  const Track t = straight_track(1, 300, g.centerline(3), 25.0);
  CHECK(detect_lane_changes(t, g).empty());
}

TEST_CASE("detect_lane_changes: recovers the scheduled synthetic crossing") {
  const LaneGeometry g = LaneGeometry::i80();
  SynthConfig cfg;
  cfg.lk_tracks = 0;
  cfg.llc_tracks = 2;
  cfg.rlc_tracks = 2;
  cfg.duration_s = 25.0;
  const auto synth = synth_generate(cfg, g, 1234);
  REQUIRE(synth.scheduled.size() == 4);
  for (std::size_t i = 0; i < synth.tracks.size(); ++i) {
    const auto events = detect_lane_changes(synth.tracks[i], g);
    REQUIRE(events.size() == 1);
    const LaneChangeEvent& got = events[0];
    const LaneChangeEvent& want = synth.scheduled[i];
    CHECK(got.left == want.left);
    CHECK(got.from_lane == want.from_lane);
    CHECK(got.to_lane == want.to_lane);
    CHECK(std::abs(static_cast<long>(got.t_cross) - static_cast<long>(want.t_cross)) <= 2);
  }
}

TEST_CASE("detect_lane_changes: an aborted change (returns within 1 s) is not an event") {
  const LaneGeometry g = LaneGeometry::i80();
  Track t = straight_track(1, 300, g.centerline(3), 25.0);
  // Dip one full lane left for 8 frames, then return.
  for (std::size_t f = 150; f < 158; ++f) t.frames[f].local_x = g.centerline(2);
  CHECK(detect_lane_changes(t, g).empty());
}

TEST_CASE("slice_windows: anchor counting matches the closed form") {
  const LaneGeometry g = LaneGeometry::i80();
  auto count_for = [&](std::size_t frames) {
    const std::vector<Track> tracks{straight_track(1, frames, g.centerline(2), 20.0)};
    return slice_windows(tracks, g).windows.size();
  };
  CHECK(count_for(99) == 0);
  CHECK(count_for(100) == 1);
  CHECK(count_for(150) == 6);
  for (std::size_t len : {100u, 123u, 200u, 251u, 447u}) {
    CHECK(count_for(len) == (len - 100) / 10 + 1);
  }
}

TEST_CASE("slice_windows: labels follow the 4 s pre-crossing interval") {
  const LaneGeometry g = LaneGeometry::i80();
  SynthConfig cfg;
  cfg.lk_tracks = 0;
  cfg.llc_tracks = 1;
  cfg.rlc_tracks = 0;
  cfg.duration_s = 30.0;
  cfg.lateral_noise_sigma = 0.0;
  const auto synth = synth_generate(cfg, g, 7);
  const auto events = detect_lane_changes(synth.tracks[0], g);
  REQUIRE(events.size() == 1);
  const std::size_t t_cross = events[0].t_cross;

  CHECK(label_intention(events, t_cross - 20) == IntentionClass::kLeftChange);  // 2 s before
  CHECK(label_intention(events, t_cross) == IntentionClass::kLeftChange);
  CHECK(label_intention(events, t_cross - kLabelIntervalFrames) == IntentionClass::kLeftChange);
  CHECK(label_intention(events, t_cross - kLabelIntervalFrames - 1) == IntentionClass::kLaneKeep);
  CHECK(label_intention(events, t_cross + 1) == IntentionClass::kLaneKeep);
  CHECK(label_intention({}, 100) == IntentionClass::kLaneKeep);

  // Overlapping opposite intervals: nearest crossing wins.
  std::vector<LaneChangeEvent> two;
  two.push_back(LaneChangeEvent{1, true, 100, 3, 2});
  two.push_back(LaneChangeEvent{1, false, 120, 2, 3});
  CHECK(label_intention(two, 95) == IntentionClass::kLeftChange);    // 5 vs 25 frames
  CHECK(label_intention(two, 112) == IntentionClass::kRightChange);  // 8 frames to the right one
}

TEST_CASE("slice_windows: ground-truth labels put LC windows on the target lane") {
  const LaneGeometry g = LaneGeometry::i80();
  SynthConfig cfg;
  cfg.lk_tracks = 1;
  cfg.llc_tracks = 1;
  cfg.rlc_tracks = 0;
  cfg.duration_s = 25.0;
  const auto synth = synth_generate(cfg, g, 21);
  const SampleSet set = slice_windows(synth.tracks, g);
  CHECK(set.count_llc > 0);
  CHECK(set.count_lk > 0);
  for (const FeatureWindow& w : set.windows) {
    if (w.label == IntentionClass::kLeftChange) {
      CHECK(std::abs(w.target_lane_used - w.current_lane) == 1);
    }
    if (w.label == IntentionClass::kLaneKeep) {
      CHECK(w.target_lane_used == w.current_lane);
    }
  }
}

TEST_CASE("split_train_val: atomic per vehicle, 7/3 on equal counts, deterministic") {
  const LaneGeometry g = LaneGeometry::i80();
  std::vector<Track> tracks;
  for (int v = 1; v <= 10; ++v) {
    Track t = straight_track(v, 150, g.centerline(2), 20.0);  // 6 windows each
    tracks.push_back(std::move(t));
  }
  const SampleSet set = slice_windows(tracks, g);
  REQUIRE(set.windows.size() == 60);

  auto [train, val] = split_train_val(set, 0.7, 11);
  std::set<std::int64_t> train_v, val_v;
  for (const auto& w : train.windows) train_v.insert(w.vehicle_id);
  for (const auto& w : val.windows) val_v.insert(w.vehicle_id);
  CHECK(train_v.size() == 7);
  CHECK(val_v.size() == 3);
  CHECK(train.windows.size() == 42);
  CHECK(val.windows.size() == 18);
  for (std::int64_t v : train_v) CHECK(val_v.count(v) == 0);
  CHECK(train.windows.size() + val.windows.size() == set.windows.size());

  auto [train2, val2] = split_train_val(set, 0.7, 11);
  REQUIRE(train2.windows.size() == train.windows.size());
  for (std::size_t i = 0; i < train.windows.size(); ++i) {
    CHECK(train2.windows[i].vehicle_id == train.windows[i].vehicle_id);
    CHECK(train2.windows[i].anchor == train.windows[i].anchor);
  }

  // Single vehicle: everything lands on one side.
  const SampleSet solo = slice_windows({tracks[0]}, g);
  auto [strain, sval] = split_train_val(solo, 0.7, 3);
  CHECK((strain.windows.empty() != sval.windows.empty()));
  CHECK(strain.windows.size() + sval.windows.size() == solo.windows.size());

  CHECK_THROWS_AS(split_train_val(set, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_train_val(set, 1.0, 1), std::invalid_argument);
}

TEST_CASE("split_train_val: proportions within 2% at 60 vehicles of mixed size") {
  const LaneGeometry g = LaneGeometry::i80();
  std::vector<Track> tracks;
  for (int v = 1; v <= 60; ++v) {
    // Window counts vary between 1 and 16 per vehicle.
    tracks.push_back(straight_track(v, 100 + (v % 4) * 50, g.centerline(3), 22.0));
  }
  const SampleSet set = slice_windows(tracks, g);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    auto [train, val] = split_train_val(set, 0.7, seed);
    const double frac =
        static_cast<double>(train.windows.size()) / static_cast<double>(set.windows.size());
    CHECK(frac >= 0.68);
    CHECK(frac <= 0.72);
  }
}

TEST_CASE("synth_generate: determinism, exact displacement, recursion identity") {
  const LaneGeometry g = LaneGeometry::i80();
  SynthConfig cfg;
  cfg.lk_tracks = 2;
  cfg.llc_tracks = 2;
  cfg.rlc_tracks = 0;
  cfg.duration_s = 20.0;

  const auto a = synth_generate(cfg, g, 5);
  const auto b = synth_generate(cfg, g, 5);
  REQUIRE(a.tracks.size() == b.tracks.size());
  for (std::size_t i = 0; i < a.tracks.size(); ++i) CHECK(a.tracks[i] == b.tracks[i]);
  const auto c = synth_generate(cfg, g, 6);
  CHECK(!(c.tracks[0] == a.tracks[0]));

  // Noise-free left change moves exactly one lane width left.
  SynthConfig clean = cfg;
  clean.lk_tracks = 0;
  clean.llc_tracks = 1;
  clean.lateral_noise_sigma = 0.0;
  const auto lc = synth_generate(clean, g, 9);
  const Track& t = lc.tracks[0];
  CHECK(t.frames.back().local_x - t.frames.front().local_x == -g.lane_width());

  // Stored kinematics satisfy the integration recursion exactly.
  for (const Track& track : a.tracks) {
    double v = track.frames[0].speed;
    double y = track.frames[0].local_y;
    for (std::size_t f = 1; f < track.frames.size(); ++f) {
      v += track.frames[f].accel * kDt;
      y += v * kDt;
      CHECK(std::abs(track.frames[f].speed - v) < 1e-12);
      CHECK(std::abs(track.frames[f].local_y - y) < 1e-9);
    }
  }

  SynthConfig bad;
  bad.lk_tracks = -1;
  CHECK_THROWS_AS(synth_generate(bad, g, 1), std::invalid_argument);
  SynthConfig short_track;
  short_track.duration_s = 5.0;  // cannot dwell after the crossing
  CHECK_THROWS_AS(synth_generate(short_track, g, 1), std::invalid_argument);
}

TEST_CASE("sample-set manifest lists counts and provenance") {
  const LaneGeometry g = LaneGeometry::i80();
  const std::vector<Track> tracks{straight_track(1, 150, g.centerline(2), 20.0)};
  SampleSet set = slice_windows(tracks, g);
  set.sources.push_back("unit-test");
  set.seed = 4;
  std::ostringstream out;
  set.write_manifest(out);
  CHECK(out.str().find("windows=6") != std::string::npos);
  CHECK(out.str().find("source=unit-test") != std::string::npos);
}
