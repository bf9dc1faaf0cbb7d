#include "duallstm/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "duallstm/rng.hpp"

namespace duallstm {

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct PreparedSample {
  std::vector<Vector> xs;
  Vector target;
  IntentionClass label;
};

std::vector<PreparedSample> prepare_intention(const SampleSet& set, const LaneGeometry& geom) {
  std::vector<PreparedSample> out;
  out.reserve(set.windows.size());
  for (const FeatureWindow& w : set.windows) {
    // The classifier's frame of reference is always the current lane.
    const FeatureWindow ref = w.with_target_lane(w.current_lane, geom);
    out.push_back({to_model_inputs(ref), one_hot(w.label), w.label});
  }
  return out;
}

std::vector<PreparedSample> prepare_trajectory(const SampleSet& set) {
  std::vector<PreparedSample> out;
  out.reserve(set.windows.size());
  for (const FeatureWindow& w : set.windows) {
    out.push_back({to_model_inputs(w), trajectory_target(w), w.label});
  }
  return out;
}

double mean_loss(const LstmNetwork& net, const std::vector<PreparedSample>& samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const PreparedSample& s : samples) sum += forward_loss(net, s.xs, s.target);
  return sum / static_cast<double>(samples.size());
}

/// Shared SGD loop. Returns the best-validation parameters.
LstmNetwork train_loop(LstmNetwork net, const std::vector<PreparedSample>& train,
                       const std::vector<PreparedSample>& val, const HyperConfig& hyper,
                       bool class_reweight, const char* stage, TrainHistory* history) {
  Rng shuffle_rng(derive_seed(hyper.seed, std::string(stage) + "-shuffle"));

  LstmNetwork best = net;
  double best_val = mean_loss(net, val);
  double lr = hyper.lr_init;
  int stale_epochs = 0;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    const double t0 = now_s();
    shuffle_rng.shuffle(order);

    double train_loss_sum = 0.0;
    bool diverged = false;
    for (std::size_t start = 0; start < order.size() && !diverged;
         start += static_cast<std::size_t>(hyper.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
      const double batch_n = static_cast<double>(end - start);

      double class_weight[kNumIntentionClasses] = {1.0, 1.0, 1.0};
      if (class_reweight) {
        std::size_t counts[kNumIntentionClasses] = {0, 0, 0};
        for (std::size_t k = start; k < end; ++k) ++counts[static_cast<int>(train[order[k]].label)];
        for (int c = 0; c < kNumIntentionClasses; ++c) {
          if (counts[c] == 0) continue;
          const double w = batch_n / (static_cast<double>(kNumIntentionClasses) *
                                      static_cast<double>(counts[c]));
          class_weight[c] = std::min(hyper.class_reweight_cap, w);
        }
      }

      Gradients batch_grads = Gradients::zeros(net);
      try {
        for (std::size_t k = start; k < end; ++k) {
          const PreparedSample& s = train[order[k]];
          const double w = class_weight[static_cast<int>(s.label)];
          const BpttResult r = bptt(net, s.xs, s.target, w);
          train_loss_sum += r.loss;
          axpy_gradients(batch_grads, r.grads, 1.0 / batch_n);
        }
        if (lr > 0.0) sgd_update(net, batch_grads, lr, hyper.clip_norm);
      } catch (const std::runtime_error&) {
        diverged = true;  // non-finite loss or gradient: keep the best checkpoint
      }
    }

    const double val_loss = diverged ? std::nan("") : mean_loss(net, val);
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = train.empty() ? 0.0 : train_loss_sum / static_cast<double>(train.size());
    stats.val_loss = val_loss;
    stats.lr = lr;
    stats.wall_time_s = now_s() - t0;
    if (history) history->epochs.push_back(stats);

    if (diverged) {
      if (history) history->diverged = true;
      break;
    }

    if (val_loss < best_val) {
      best_val = val_loss;
      best = net;
      stale_epochs = 0;
    } else {
      ++stale_epochs;
      if (stale_epochs >= hyper.patience) {
        lr *= hyper.lr_decay_factor;
        stale_epochs = 0;
      }
    }
  }
  return best;
}

}  // namespace

HyperConfig HyperConfig::from_config(const std::filesystem::path& path) {
  const KeyValueMap kv = load_key_values(path);
  HyperConfig h;
  h.batch_size = static_cast<int>(kv_long(kv, "batch_size", h.batch_size));
  h.epochs = static_cast<int>(kv_long(kv, "epochs", h.epochs));
  h.lr_init = kv_double(kv, "lr_init", h.lr_init);
  h.lr_decay_factor = kv_double(kv, "lr_decay_factor", h.lr_decay_factor);
  h.patience = static_cast<int>(kv_long(kv, "patience", h.patience));
  h.clip_norm = kv_double(kv, "clip_norm", h.clip_norm);
  h.seed = static_cast<std::uint64_t>(kv_long(kv, "seed", static_cast<long>(h.seed)));
  h.class_reweight_cap = kv_double(kv, "class_reweight_cap", h.class_reweight_cap);
  h.validate();
  return h;
}

void HyperConfig::validate() const {
  auto fail = [](const char* msg) { throw std::invalid_argument(std::string("HyperConfig: ") + msg); };
  if (batch_size <= 0) fail("batch_size must be positive");
  if (epochs < 0) fail("epochs must be non-negative");
  if (lr_init < 0.0) fail("lr_init must be non-negative");
  if (!(lr_decay_factor > 0.0 && lr_decay_factor <= 1.0)) fail("lr_decay_factor must be in (0,1]");
  if (patience <= 0) fail("patience must be positive");
  if (!(clip_norm > 0.0)) fail("clip_norm must be positive");
  if (!(class_reweight_cap >= 1.0)) fail("class_reweight_cap must be >= 1");
}

void TrainHistory::write_table(std::ostream& out) const {
  const bool with_acc =
      std::any_of(epochs.begin(), epochs.end(), [](const EpochStats& e) { return e.val_accuracy >= 0.0; });
  out << "epoch\ttrain_loss\tval_loss\tlr";
  if (with_acc) out << "\tval_accuracy";
  out << "\n";
  char buf[192];
  for (const EpochStats& e : epochs) {
    std::snprintf(buf, sizeof(buf), "%d\t%.9g\t%.9g\t%.9g", e.epoch, e.train_loss, e.val_loss, e.lr);
    out << buf;
    if (with_acc) {
      std::snprintf(buf, sizeof(buf), "\t%.9g", e.val_accuracy);
      out << buf;
    }
    out << "\n";
  }
  if (diverged) out << "# aborted: non-finite loss, best checkpoint retained\n";
}

std::pair<IntentionModel, TrainHistory> train_intention(const SampleSet& train,
                                                        const SampleSet& val,
                                                        const LaneGeometry& geom,
                                                        const HyperConfig& hyper) {
  hyper.validate();
  const auto train_prep = prepare_intention(train, geom);
  const auto val_prep = prepare_intention(val, geom);

  TrainHistory history;
  IntentionModel model = IntentionModel::init(derive_seed(hyper.seed, "intent-init"));
  model.net = train_loop(model.net, train_prep, val_prep, hyper, true, "intent", &history);

  // Accuracy per epoch is not tracked inside the loop (the loop is model
  // agnostic); fill it for the final model so the history table carries it.
  if (!history.epochs.empty()) {
    double correct = 0.0;
    for (const PreparedSample& s : val_prep) {
      const Vector probs = forward_output(model.net, s.xs);
      if (argmax_intention(probs) == s.label) correct += 1.0;
    }
    history.epochs.back().val_accuracy =
        val_prep.empty() ? 0.0 : correct / static_cast<double>(val_prep.size());
  }
  return {std::move(model), std::move(history)};
}

std::pair<TrajectoryModel, TrainHistory> train_trajectory(const SampleSet& train,
                                                          const SampleSet& val,
                                                          const HyperConfig& hyper) {
  hyper.validate();
  const auto train_prep = prepare_trajectory(train);
  const auto val_prep = prepare_trajectory(val);

  TrainHistory history;
  TrajectoryModel model = TrajectoryModel::init(derive_seed(hyper.seed, "traj-init"));
  model.net = train_loop(model.net, train_prep, val_prep, hyper, false, "traj", &history);
  return {std::move(model), std::move(history)};
}

double intention_accuracy(const IntentionModel& model, const SampleSet& samples,
                          const LaneGeometry& geom) {
  if (samples.windows.empty()) return 0.0;
  std::size_t correct = 0;
  for (const FeatureWindow& w : samples.windows) {
    const Vector probs = classify(model, w.with_target_lane(w.current_lane, geom));
    if (argmax_intention(probs) == w.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.windows.size());
}

double intention_val_loss(const IntentionModel& model, const SampleSet& samples,
                          const LaneGeometry& geom) {
  if (samples.windows.empty()) return 0.0;
  double sum = 0.0;
  for (const FeatureWindow& w : samples.windows) {
    const FeatureWindow ref = w.with_target_lane(w.current_lane, geom);
    sum += forward_loss(model.net, to_model_inputs(ref), one_hot(w.label));
  }
  return sum / static_cast<double>(samples.windows.size());
}

void RmseTable::write_table(std::ostream& out) const {
  out << "horizon_s\tlongitudinal_rmse_m\tlateral_rmse_m\n";
  char buf[128];
  for (std::size_t i = 0; i < horizon_steps.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.1f\t%.6f\t%.6f\n",
                  horizon_steps[i] * kDt, longitudinal_rmse[i], lateral_rmse[i]);
    out << buf;
  }
  out << "# samples=" << sample_count << "\n";
}

RmseTable evaluate_rmse(const IntentionModel& intent, const TrajectoryModel& traj,
                        const SampleSet& samples, const LaneGeometry& geom,
                        bool use_recognized_intentions) {
  if (samples.windows.empty()) {
    throw std::invalid_argument("evaluate_rmse: empty sample set");
  }

  RmseTable table;
  table.horizon_steps = {10, 20, 30, 40, 50};
  table.sample_count = samples.windows.size();
  std::vector<double> sq_long(table.horizon_steps.size(), 0.0);
  std::vector<double> sq_lat(table.horizon_steps.size(), 0.0);

  for (const FeatureWindow& w : samples.windows) {
    Vector y_hat, x_hat;
    if (use_recognized_intentions) {
      const PredictionOutput out = predict(intent, traj, w, geom);
      y_hat = out.y_hat;
      x_hat = out.x_hat;
    } else {
      // Trajectory-stage metric: oracle target lane, same clamp and
      // integration as deployment.
      RawPrediction raw = predict_raw(traj, w);
      const double bound = geom.lane_width();
      for (Eigen::Index t = 0; t < raw.x_dev_hat.size(); ++t) {
        raw.x_dev_hat[t] = std::clamp(raw.x_dev_hat[t], -bound, bound);
      }
      y_hat = integrate_longitudinal(w.v0, w.y0, raw.a_hat, kDt).y_hat;
      x_hat = reconstruct_lateral(raw.x_dev_hat, w.target_lane_used, geom);
    }
    for (std::size_t i = 0; i < table.horizon_steps.size(); ++i) {
      const int h = table.horizon_steps[i] - 1;
      const double dy = y_hat[h] - w.future_y[h];
      const double dx = x_hat[h] - w.future_x[h];
      sq_long[i] += dy * dy;
      sq_lat[i] += dx * dx;
    }
  }

  const double n = static_cast<double>(samples.windows.size());
  for (std::size_t i = 0; i < table.horizon_steps.size(); ++i) {
    table.longitudinal_rmse.push_back(std::sqrt(sq_long[i] / n));
    table.lateral_rmse.push_back(std::sqrt(sq_lat[i] / n));
  }
  return table;
}

std::size_t LeadTimeSummary::recognized_positive() const {
  const auto pos = [](const std::vector<double>& v) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double s) { return s > 0.0; }));
  };
  return pos(left_leads_s) + pos(right_leads_s);
}

namespace {

void write_lead_stats(std::ostream& out, const char* label, const std::vector<double>& leads,
                      std::size_t missed) {
  std::vector<double> sorted = leads;
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  char buf[256];
  if (n == 0) {
    std::snprintf(buf, sizeof(buf), "%s\t0\t%zu\t-\t-\t-\t-\n", label, missed);
  } else {
    const double median =
        (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    std::snprintf(buf, sizeof(buf), "%s\t%zu\t%zu\t%.3f\t%.3f\t%.3f\t%.3f\n", label, n, missed,
                  median, mean, sorted.front(), sorted.back());
  }
  out << buf;
}

}  // namespace

void LeadTimeSummary::write_table(std::ostream& out) const {
  out << "direction\trecognized\tmissed\tmedian_s\tmean_s\tmin_s\tmax_s\n";
  write_lead_stats(out, "left", left_leads_s, left_missed);
  write_lead_stats(out, "right", right_leads_s, right_missed);
  out << "lead_times_left_s=";
  for (std::size_t i = 0; i < left_leads_s.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%.3f", i ? "," : "", left_leads_s[i]);
    out << buf;
  }
  out << "\nlead_times_right_s=";
  for (std::size_t i = 0; i < right_leads_s.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%.3f", i ? "," : "", right_leads_s[i]);
    out << buf;
  }
  out << "\n";
}

LeadTimeSummary evaluate_lead_times(const IntentionModel& model,
                                    const std::vector<Track>& tracks,
                                    const LaneGeometry& geom) {
  LeadTimeSummary summary;
  for (const Track& track : tracks) {
    for (const LaneChangeEvent& ev : detect_lane_changes(track, geom)) {
      const LeadTimeResult r = recognition_lead_time(model, track, geom, ev);
      if (ev.left) {
        if (r.recognized) summary.left_leads_s.push_back(r.seconds);
        else ++summary.left_missed;
      } else {
        if (r.recognized) summary.right_leads_s.push_back(r.seconds);
        else ++summary.right_missed;
      }
    }
  }
  return summary;
}

}  // namespace duallstm
