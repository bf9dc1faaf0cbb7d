#include "duallstm/intention.hpp"

#include <stdexcept>

#include "duallstm/rng.hpp"

namespace duallstm {

IntentionModel IntentionModel::init(std::uint64_t seed) {
  return IntentionModel{init_network(kFeatureDim, kIntentionHidden, kNumIntentionClasses,
                                     HeadKind::kClassification, seed)};
}

Vector one_hot(IntentionClass c) {
  Vector v = Vector::Zero(kNumIntentionClasses);
  v[static_cast<int>(c)] = 1.0;
  return v;
}

Vector classify(const IntentionModel& model, const FeatureWindow& window) {
  return forward_output(model.net, to_model_inputs(window));
}

IntentionClass argmax_intention(const Vector& probs) {
  int best = 0;
  for (int i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return static_cast<IntentionClass>(best);
}

LeadTimeResult recognition_lead_time(const ClassifierFn& classifier, const Track& track,
                                     const LaneGeometry& geom, const LaneChangeEvent& event,
                                     std::size_t stride) {
  const IntentionClass cls =
      event.left ? IntentionClass::kLeftChange : IntentionClass::kRightChange;
  const int cls_idx = static_cast<int>(cls);

  // Anchor grid: every `stride` frames from the first full history window,
  // stopping at the crossing frame.
  std::vector<std::size_t> anchors;
  for (std::size_t a = kWindowSteps - 1; a <= event.t_cross && a < track.frames.size();
       a += stride) {
    anchors.push_back(a);
  }
  if (anchors.empty()) return LeadTimeResult{false, 0.0};

  std::vector<Vector> probs;
  probs.reserve(anchors.size());
  for (std::size_t a : anchors) {
    probs.push_back(
        classifier(build_observation_window(track, geom, a, IntentionClass::kLaneKeep)));
  }

  // Earliest anchor with p > 0.5 whose class stays the argmax afterwards.
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (probs[i][cls_idx] <= 0.5) continue;
    bool sustained = true;
    for (std::size_t j = i; j < anchors.size(); ++j) {
      if (argmax_intention(probs[j]) != cls) {
        sustained = false;
        break;
      }
    }
    if (sustained) {
      const double lead = static_cast<double>(event.t_cross - anchors[i]) * kDt;
      return LeadTimeResult{true, lead};
    }
  }
  return LeadTimeResult{false, 0.0};
}

LeadTimeResult recognition_lead_time(const IntentionModel& model, const Track& track,
                                     const LaneGeometry& geom, const LaneChangeEvent& event,
                                     std::size_t stride) {
  return recognition_lead_time(
      [&model](const FeatureWindow& w) { return classify(model, w); }, track, geom, event,
      stride);
}

}  // namespace duallstm
