#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "duallstm/dataset.hpp"
#include "duallstm/features.hpp"
#include "duallstm/network.hpp"

namespace duallstm {

constexpr int kIntentionHidden = 64;

/// First network: 64-cell LSTM + 3-class softmax head over
/// {lane keep, left change, right change}.
struct IntentionModel {
  LstmNetwork net;

  static IntentionModel init(std::uint64_t seed);
};

Vector one_hot(IntentionClass c);

/// Probabilities from the final hidden state of the unrolled window.
/// The window is consumed as given; callers keep the x_dev reference lane
/// consistent with how the model was trained (current lane).
Vector classify(const IntentionModel& model, const FeatureWindow& window);

/// Argmax with ties resolved to the lowest class index (lane keeping).
IntentionClass argmax_intention(const Vector& probs);

struct LeadTimeResult {
  bool recognized = false;
  double seconds = 0.0;  // t_cross minus the earliest sustained detection
};

using ClassifierFn = std::function<Vector(const FeatureWindow&)>;

/// Scans window anchors (every second) up to the crossing frame; the event
/// counts as recognized at the earliest anchor where its class probability
/// exceeds 0.5 and stays the argmax through t_cross. Events never meeting
/// that are missed.
LeadTimeResult recognition_lead_time(const ClassifierFn& classifier, const Track& track,
                                     const LaneGeometry& geom, const LaneChangeEvent& event,
                                     std::size_t stride = 10);

LeadTimeResult recognition_lead_time(const IntentionModel& model, const Track& track,
                                     const LaneGeometry& geom, const LaneChangeEvent& event,
                                     std::size_t stride = 10);

}  // namespace duallstm
