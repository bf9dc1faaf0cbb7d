#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "duallstm/checkpoint.hpp"
#include "duallstm/dataset.hpp"
#include "duallstm/intention.hpp"
#include "duallstm/trajectory.hpp"

namespace duallstm {

struct HyperConfig {
  int batch_size = 100;
  int epochs = 5;
  double lr_init = 1.0;
  double lr_decay_factor = 0.5;
  int patience = 1;  // epochs without val improvement before a decay
  double clip_norm = 5.0;
  std::uint64_t seed = 42;
  double class_reweight_cap = 10.0;

  static HyperConfig from_config(const std::filesystem::path& path);
  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
  double val_accuracy = -1.0;  // classification stages only
  double wall_time_s = 0.0;    // excluded from the serialized table
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  bool diverged = false;

  /// Machine-parsable table; omits wall time so same-seed runs serialize
  /// byte-identically.
  void write_table(std::ostream& out) const;
};

/// Stage one: class-reweighted cross-entropy over shuffled batches of 100,
/// decaying learning rate on validation plateau, best-validation
/// checkpoint returned. Deterministic under (seed, data, hyper).
std::pair<IntentionModel, TrainHistory> train_intention(const SampleSet& train,
                                                        const SampleSet& val,
                                                        const LaneGeometry& geom,
                                                        const HyperConfig& hyper);

/// Stage two: L2 loss over both output groups; window features reference
/// the ground-truth target lane (as built by slice_windows).
std::pair<TrajectoryModel, TrainHistory> train_trajectory(const SampleSet& train,
                                                          const SampleSet& val,
                                                          const HyperConfig& hyper);

/// Fraction of windows whose recognized intention matches the label.
double intention_accuracy(const IntentionModel& model, const SampleSet& samples,
                          const LaneGeometry& geom);

/// Mean unweighted cross-entropy of the intention model over a sample set.
double intention_val_loss(const IntentionModel& model, const SampleSet& samples,
                          const LaneGeometry& geom);

struct RmseTable {
  std::vector<int> horizon_steps;       // {10,20,30,40,50}
  std::vector<double> longitudinal_rmse;  // m
  std::vector<double> lateral_rmse;       // m
  std::size_t sample_count = 0;

  void write_table(std::ostream& out) const;
};

/// RMSE of predicted vs actual positions at 1..5 s. With
/// use_recognized_intentions the full deployment pipeline runs (predict());
/// otherwise the trajectory net consumes the ground-truth target-lane
/// windows, i.e. the trajectory stage's own validation metric.
RmseTable evaluate_rmse(const IntentionModel& intent, const TrajectoryModel& traj,
                        const SampleSet& samples, const LaneGeometry& geom,
                        bool use_recognized_intentions = true);

struct LeadTimeSummary {
  std::vector<double> left_leads_s;
  std::vector<double> right_leads_s;
  std::size_t left_missed = 0;
  std::size_t right_missed = 0;

  std::size_t events() const {
    return left_leads_s.size() + right_leads_s.size() + left_missed + right_missed;
  }
  std::size_t recognized_positive() const;

  void write_table(std::ostream& out) const;
};

/// Recognition lead times over every lane-change event detected in the
/// given tracks, split by direction.
LeadTimeSummary evaluate_lead_times(const IntentionModel& model,
                                    const std::vector<Track>& tracks,
                                    const LaneGeometry& geom);

}  // namespace duallstm
