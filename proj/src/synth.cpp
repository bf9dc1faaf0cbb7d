#include "duallstm/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "duallstm/features.hpp"
#include "duallstm/io.hpp"
#include "duallstm/rng.hpp"

namespace duallstm {

namespace {

/// Raised-cosine step: 0 for t <= t0, 1 for t >= t0 + dur, C1 in between.
/// Compact support makes the one-lane displacement exact, not asymptotic.
double transition_profile(double t, double t0, double dur) {
  if (t <= t0) return 0.0;
  if (t >= t0 + dur) return 1.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * (t - t0) / dur));
}

}  // namespace

SynthConfig SynthConfig::from_config(const std::filesystem::path& path) {
  const KeyValueMap kv = load_key_values(path);
  SynthConfig c;
  c.lk_tracks = static_cast<int>(kv_long(kv, "lk_tracks", c.lk_tracks));
  c.llc_tracks = static_cast<int>(kv_long(kv, "llc_tracks", c.llc_tracks));
  c.rlc_tracks = static_cast<int>(kv_long(kv, "rlc_tracks", c.rlc_tracks));
  c.duration_s = kv_double(kv, "duration_s", c.duration_s);
  c.speed_min = kv_double(kv, "speed_min_mps", c.speed_min);
  c.speed_max = kv_double(kv, "speed_max_mps", c.speed_max);
  c.accel_max = kv_double(kv, "accel_max_mps2", c.accel_max);
  c.segment_min_s = kv_double(kv, "segment_min_s", c.segment_min_s);
  c.segment_max_s = kv_double(kv, "segment_max_s", c.segment_max_s);
  c.lateral_noise_sigma = kv_double(kv, "lateral_noise_sigma_m", c.lateral_noise_sigma);
  c.lane_change_duration_s = kv_double(kv, "lane_change_duration_s", c.lane_change_duration_s);
  c.cross_time_min_s = kv_double(kv, "cross_time_min_s", c.cross_time_min_s);
  c.cross_time_max_s = kv_double(kv, "cross_time_max_s", c.cross_time_max_s);
  return c;
}

void SynthConfig::validate(const LaneGeometry& geom) const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("SynthConfig: " + msg); };
  if (lk_tracks < 0 || llc_tracks < 0 || rlc_tracks < 0) fail("negative track count");
  if (lk_tracks + llc_tracks + rlc_tracks == 0) fail("no tracks requested");
  if (!(duration_s > 0.0)) fail("duration must be positive");
  if (!(speed_min > 0.0 && speed_max >= speed_min)) fail("bad speed range");
  if (accel_max < 0.0) fail("negative accel_max");
  if (!(segment_min_s > 0.0 && segment_max_s >= segment_min_s)) fail("bad segment range");
  if (lateral_noise_sigma < 0.0) fail("negative noise sigma");
  if (!(lane_change_duration_s > 0.0)) fail("lane-change duration must be positive");
  if ((llc_tracks + rlc_tracks) > 0) {
    if (!(cross_time_min_s > lane_change_duration_s / 2.0)) {
      fail("crossing scheduled before the transition can start");
    }
    if (!(cross_time_max_s >= cross_time_min_s)) fail("bad crossing window");
    if (cross_time_max_s + lane_change_duration_s / 2.0 + 2.0 >= duration_s) {
      fail("track too short to finish and dwell after the lane change");
    }
    if (geom.num_lanes() < 2) fail("lane changes need at least two lanes");
  }
}

SynthResult synth_generate(const SynthConfig& config, const LaneGeometry& geom,
                           std::uint64_t seed) {
  config.validate(geom);

  const std::size_t frames = static_cast<std::size_t>(std::llround(config.duration_s / kDt));
  const double width = geom.lane_width();
  const int total = config.lk_tracks + config.llc_tracks + config.rlc_tracks;

  SynthResult result;
  result.tracks.reserve(total);

  for (int idx = 0; idx < total; ++idx) {
    const bool is_llc = idx >= config.lk_tracks && idx < config.lk_tracks + config.llc_tracks;
    const bool is_rlc = idx >= config.lk_tracks + config.llc_tracks;
    Rng rng(derive_seed(seed, "synth-track-" + std::to_string(idx)));

    int lane;
    if (is_llc) {
      lane = 2 + static_cast<int>(rng.index(geom.num_lanes() - 1));
    } else if (is_rlc) {
      lane = 1 + static_cast<int>(rng.index(geom.num_lanes() - 1));
    } else {
      lane = 1 + static_cast<int>(rng.index(geom.num_lanes()));
    }
    const double base = geom.centerline(lane);
    const double dir = is_llc ? -1.0 : (is_rlc ? 1.0 : 0.0);

    double t_cross = 0.0;
    if (is_llc || is_rlc) {
      t_cross = rng.uniform(config.cross_time_min_s, config.cross_time_max_s);
    }
    const double t0 = t_cross - config.lane_change_duration_s / 2.0;

    // Piecewise-constant longitudinal acceleration; segments long enough
    // that most horizons see a constant value.
    double v = rng.uniform(config.speed_min, config.speed_max);
    auto keep_speed_sane = [&](double cand, double seg_duration) {
      if (v + cand * seg_duration < 1.0) return std::abs(cand);
      if (v + cand * seg_duration > config.speed_max * 1.5) return -std::abs(cand);
      return cand;
    };
    double seg_len = rng.uniform(config.segment_min_s, config.segment_max_s);
    double segment_end = seg_len;
    double a = keep_speed_sane(rng.uniform(-config.accel_max, config.accel_max), seg_len);

    Track track;
    track.vehicle_id = idx + 1;
    track.frames.resize(frames);

    double y = 0.0;
    std::size_t scheduled_cross = 0;
    for (std::size_t f = 0; f < frames; ++f) {
      const double t = static_cast<double>(f) * kDt;
      if (t >= segment_end) {
        seg_len = rng.uniform(config.segment_min_s, config.segment_max_s);
        segment_end = t + seg_len;
        a = keep_speed_sane(rng.uniform(-config.accel_max, config.accel_max), seg_len);
      }
      if (f > 0) {
        // Same recursion the predictor integrates with.
        v = v + a * kDt;
        y = y + v * kDt;
      }

      const double clean_x =
          base + dir * width * transition_profile(t, t0, config.lane_change_duration_s);
      if ((is_llc || is_rlc) && scheduled_cross == 0 && geom.lane_of(clean_x) != lane) {
        scheduled_cross = f;
      }
      const double x = clean_x + config.lateral_noise_sigma * rng.gaussian();

      TrackFrame& frame = track.frames[f];
      frame.frame_id = static_cast<std::int64_t>(f) + 1;
      frame.local_x = x;
      frame.local_y = y;
      frame.speed = v;
      frame.accel = a;
      frame.lane_id = geom.lane_of(x);
      frame.vehicle_length = 4.5;
      frame.vehicle_type = 2;
    }

    if (is_llc || is_rlc) {
      LaneChangeEvent ev;
      ev.vehicle_id = track.vehicle_id;
      ev.left = is_llc;
      ev.t_cross = scheduled_cross;
      ev.from_lane = lane;
      ev.to_lane = lane + (is_llc ? -1 : 1);
      result.scheduled.push_back(ev);
    }
    result.tracks.push_back(std::move(track));
  }
  return result;
}

}  // namespace duallstm
