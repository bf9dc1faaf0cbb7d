// Command-line front end: generate synthetic traffic, train the two-stage
// predictor, emit per-anchor trajectory predictions, evaluate RMSE and
// lane-change recognition timing.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "duallstm/checkpoint.hpp"
#include "duallstm/dataset.hpp"
#include "duallstm/io.hpp"
#include "duallstm/synth.hpp"
#include "duallstm/train.hpp"

namespace fs = std::filesystem;
using namespace duallstm;

namespace {

constexpr const char* kToolVersion = "duallstm 1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

/// Data-shaped failures (missing/unreadable/malformed inputs) exit with 2;
/// anything else that escapes is a numeric failure and exits with 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void require_readable(const fs::path& path, const char* what) {
  if (!fs::exists(path)) {
    throw DataError(std::string(what) + " not found: " + path.string());
  }
}

LaneGeometry load_geometry(const std::string& geom_path) {
  if (geom_path.empty()) return LaneGeometry::i80();
  require_readable(geom_path, "geometry config");
  return LaneGeometry::from_config(geom_path);
}

std::vector<Track> load_tracks(const std::string& data_path, UnitMode units,
                               ParseStats* stats) {
  require_readable(data_path, "data file");
  std::ifstream in(data_path);
  if (!in) throw DataError("cannot open data file: " + data_path);
  try {
    return parse_trajectory_file(in, units, stats);
  } catch (const std::exception& e) {
    throw DataError(std::string("parse failure in ") + data_path + ": " + e.what());
  }
}

struct CommonArgs {
  std::string geom_path;
  std::string units = "meters";
  std::uint64_t seed = 42;
  bool seed_given = false;

  UnitMode unit_mode() const {
    return units == "feet" ? UnitMode::kFeet : UnitMode::kMeters;
  }
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--geom", args->geom_path, "lane geometry config (key=value); default I-80");
  cmd->add_option("--units", args->units, "input position units")
      ->check(CLI::IsMember({"feet", "meters"}));
  cmd->add_option("--seed", args->seed, "seed override")->each([args](const std::string&) {
    args->seed_given = true;
  });
}

int cmd_synth(const std::string& config_path, const std::string& out_path,
              const CommonArgs& common) {
  const double t0 = now_s();
  SynthConfig config;
  if (!config_path.empty()) {
    require_readable(config_path, "synth config");
    config = SynthConfig::from_config(config_path);
  }
  const LaneGeometry geom = load_geometry(common.geom_path);
  const SynthResult result = synth_generate(config, geom, common.seed);

  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write output: " + out_path);
  serialize_tracks(out, result.tracks);
  out.close();

  RunManifest manifest;
  manifest.command = "synth";
  manifest.tool_version = kToolVersion;
  manifest.seed = common.seed;
  if (!config_path.empty()) {
    manifest.inputs.emplace_back(config_path, std::to_string(fnv1a_file_digest(config_path)));
  }
  manifest.outputs.push_back(out_path);
  manifest.notes.emplace_back("tracks", std::to_string(result.tracks.size()));
  manifest.notes.emplace_back("scheduled_lane_changes", std::to_string(result.scheduled.size()));
  manifest.wall_time_s = now_s() - t0;
  write_manifest(manifest, out_path + ".manifest");
  return kExitOk;
}

int cmd_train(const std::string& data_path, const std::string& hyper_path,
              const std::string& out_path, const CommonArgs& common) {
  const double t0 = now_s();
  HyperConfig hyper;
  if (!hyper_path.empty()) {
    require_readable(hyper_path, "hyper config");
    hyper = HyperConfig::from_config(hyper_path);
  }
  if (common.seed_given) hyper.seed = common.seed;

  const LaneGeometry geom = load_geometry(common.geom_path);
  ParseStats stats;
  const std::vector<Track> tracks = load_tracks(data_path, common.unit_mode(), &stats);

  SampleSet samples = slice_windows(tracks, geom);
  samples.sources.push_back(data_path);
  samples.seed = hyper.seed;
  if (samples.windows.empty()) throw DataError("no samples: no track admits a full window");

  auto [train_set, val_set] = split_train_val(samples, 0.7, hyper.seed);

  auto [intent, intent_history] = train_intention(train_set, val_set, geom, hyper);
  auto [traj, traj_history] = train_trajectory(train_set, val_set, hyper);

  ModelBundle bundle;
  bundle.intent = std::move(intent);
  bundle.traj = std::move(traj);
  bundle.hyper["input_dim"] = std::to_string(kFeatureDim);
  bundle.hyper["intent_hidden_dim"] = std::to_string(kIntentionHidden);
  bundle.hyper["traj_hidden_dim"] = std::to_string(kTrajectoryHidden);
  bundle.hyper["horizon_steps"] = std::to_string(kHorizonSteps);
  bundle.hyper["dt"] = "0.1";
  bundle.hyper["clip_norm"] = std::to_string(hyper.clip_norm);
  bundle.hyper["seed"] = std::to_string(hyper.seed);
  bundle.hyper["forget_bias_init"] = "1";
  save_checkpoint(fs::path(out_path), bundle);

  {
    std::ofstream h(out_path + ".intent_history.txt");
    intent_history.write_table(h);
  }
  {
    std::ofstream h(out_path + ".traj_history.txt");
    traj_history.write_table(h);
  }
  {
    std::ofstream h(out_path + ".samples.txt");
    samples.write_manifest(h);
  }

  RunManifest manifest;
  manifest.command = "train";
  manifest.tool_version = kToolVersion;
  manifest.seed = hyper.seed;
  manifest.inputs.emplace_back(data_path, std::to_string(fnv1a_file_digest(data_path)));
  manifest.outputs.push_back(out_path);
  manifest.notes.emplace_back("tracks", std::to_string(tracks.size()));
  manifest.notes.emplace_back("malformed_rows", std::to_string(stats.malformed_rows));
  manifest.notes.emplace_back("windows", std::to_string(samples.windows.size()));
  manifest.notes.emplace_back("train_windows", std::to_string(train_set.windows.size()));
  manifest.notes.emplace_back("val_windows", std::to_string(val_set.windows.size()));
  manifest.notes.emplace_back("skipped_anchors", std::to_string(samples.skipped_anchors));
  manifest.wall_time_s = now_s() - t0;
  write_manifest(manifest, out_path + ".manifest");

  if (intent_history.diverged || traj_history.diverged) {
    std::cerr << "training diverged; best checkpoint written to " << out_path << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_predict(const std::string& checkpoint_path, const std::string& data_path,
                const std::string& out_path, const CommonArgs& common) {
  const double t0 = now_s();
  require_readable(checkpoint_path, "checkpoint");
  ModelBundle bundle;
  try {
    bundle = load_checkpoint(fs::path(checkpoint_path));
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  const LaneGeometry geom = load_geometry(common.geom_path);
  const std::vector<Track> tracks = load_tracks(data_path, common.unit_mode(), nullptr);

  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write output: " + out_path);

  std::size_t records = 0, skipped = 0;
  char buf[256];
  for (const Track& track : tracks) {
    for (std::size_t anchor = kWindowSteps - 1; anchor < track.frames.size(); anchor += 10) {
      FeatureWindow window;
      try {
        window = build_observation_window(track, geom, anchor, IntentionClass::kLaneKeep);
      } catch (const std::exception&) {
        ++skipped;
        continue;
      }
      const PredictionOutput p = predict(bundle.intent, bundle.traj, window, geom);
      std::snprintf(buf, sizeof(buf),
                    "# vehicle=%lld anchor=%lld p_lk=%.9g p_llc=%.9g p_rlc=%.9g "
                    "target_lane=%d clamped=%d negative_speed=%d\n",
                    static_cast<long long>(track.vehicle_id),
                    static_cast<long long>(track.frames[anchor].frame_id),
                    p.intention_probs[0], p.intention_probs[1], p.intention_probs[2],
                    p.target_lane, p.clamped_steps, p.negative_speed_steps);
      out << buf;
      for (int t = 0; t < kHorizonSteps; ++t) {
        std::snprintf(buf, sizeof(buf), "%.1f,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                      (t + 1) * kDt, p.x_hat[t], p.y_hat[t], p.v_hat[t], p.a_hat[t],
                      p.x_dev_hat[t]);
        out << buf;
      }
      ++records;
    }
  }

  RunManifest manifest;
  manifest.command = "predict";
  manifest.tool_version = kToolVersion;
  manifest.seed = common.seed;
  manifest.inputs.emplace_back(checkpoint_path, std::to_string(fnv1a_file_digest(checkpoint_path)));
  manifest.inputs.emplace_back(data_path, std::to_string(fnv1a_file_digest(data_path)));
  manifest.outputs.push_back(out_path);
  manifest.notes.emplace_back("records", std::to_string(records));
  manifest.notes.emplace_back("skipped_anchors", std::to_string(skipped));
  manifest.wall_time_s = now_s() - t0;
  write_manifest(manifest, out_path + ".manifest");
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::string& out_path, const CommonArgs& common) {
  const double t0 = now_s();
  require_readable(checkpoint_path, "checkpoint");
  ModelBundle bundle;
  try {
    bundle = load_checkpoint(fs::path(checkpoint_path));
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  const LaneGeometry geom = load_geometry(common.geom_path);
  const std::vector<Track> tracks = load_tracks(data_path, common.unit_mode(), nullptr);

  SampleSet samples = slice_windows(tracks, geom);
  if (samples.windows.empty()) throw DataError("no samples: no track admits a full window");

  const RmseTable deployed = evaluate_rmse(bundle.intent, bundle.traj, samples, geom, true);
  const RmseTable stage = evaluate_rmse(bundle.intent, bundle.traj, samples, geom, false);
  const LeadTimeSummary leads = evaluate_lead_times(bundle.intent, tracks, geom);

  {
    std::ofstream f(out_path + ".rmse.txt");
    deployed.write_table(f);
  }
  {
    std::ofstream f(out_path + ".rmse_stage.txt");
    stage.write_table(f);
  }
  {
    std::ofstream f(out_path + ".lead_times.txt");
    leads.write_table(f);
  }
  std::ostringstream echo;
  echo << "RMSE (recognized intentions):\n";
  deployed.write_table(echo);
  echo << "RMSE (ground-truth target lane):\n";
  stage.write_table(echo);
  echo << "Lane-change recognition lead times:\n";
  leads.write_table(echo);
  std::cout << echo.str();

  RunManifest manifest;
  manifest.command = "eval";
  manifest.tool_version = kToolVersion;
  manifest.seed = common.seed;
  manifest.inputs.emplace_back(checkpoint_path, std::to_string(fnv1a_file_digest(checkpoint_path)));
  manifest.inputs.emplace_back(data_path, std::to_string(fnv1a_file_digest(data_path)));
  manifest.outputs.push_back(out_path + ".rmse.txt");
  manifest.outputs.push_back(out_path + ".rmse_stage.txt");
  manifest.outputs.push_back(out_path + ".lead_times.txt");
  manifest.notes.emplace_back("windows", std::to_string(samples.windows.size()));
  manifest.notes.emplace_back("events", std::to_string(leads.events()));
  manifest.wall_time_s = now_s() - t0;
  write_manifest(manifest, out_path + ".manifest");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-LSTM intention-aware vehicle trajectory predictor"};
  app.require_subcommand(1);

  CommonArgs synth_args, train_args, predict_args, eval_args;
  std::string synth_config, synth_out;
  std::string train_data, train_hyper, train_out;
  std::string predict_ckpt, predict_data, predict_out;
  std::string eval_ckpt, eval_data, eval_out;

  CLI::App* synth = app.add_subcommand("synth", "generate synthetic tracks");
  synth->add_option("--config", synth_config, "synth config (key=value)");
  synth->add_option("--out", synth_out, "output trajectory file")->required();
  add_common(synth, &synth_args);

  CLI::App* train = app.add_subcommand("train", "train both stages");
  train->add_option("--data", train_data, "trajectory file")->required();
  train->add_option("--hyper", train_hyper, "hyper config (key=value)");
  train->add_option("--out", train_out, "output checkpoint")->required();
  add_common(train, &train_args);

  CLI::App* predict = app.add_subcommand("predict", "predict trajectories per anchor");
  predict->add_option("--checkpoint", predict_ckpt, "model checkpoint")->required();
  predict->add_option("--data", predict_data, "trajectory file")->required();
  predict->add_option("--out", predict_out, "output predictions")->required();
  add_common(predict, &predict_args);

  CLI::App* eval = app.add_subcommand("eval", "RMSE and lead-time evaluation");
  eval->add_option("--checkpoint", eval_ckpt, "model checkpoint")->required();
  eval->add_option("--data", eval_data, "trajectory file")->required();
  eval->add_option("--out", eval_out, "output file prefix")->required();
  add_common(eval, &eval_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_config, synth_out, synth_args);
    if (train->parsed()) return cmd_train(train_data, train_hyper, train_out, train_args);
    if (predict->parsed()) return cmd_predict(predict_ckpt, predict_data, predict_out, predict_args);
    if (eval->parsed()) return cmd_eval(eval_ckpt, eval_data, eval_out, eval_args);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
