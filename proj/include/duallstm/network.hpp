#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "duallstm/lstm.hpp"

namespace duallstm {

/// Loss head applied to the final hidden state.
enum class HeadKind {
  kRegression,      // affine map, 0.5*||y - t||^2 loss
  kClassification,  // affine map + softmax, cross-entropy loss
};

/// One LSTM layer plus its dense output head. Both networks in the
/// predictor are instances of this with different dimensions and heads.
struct LstmNetwork {
  LstmParams lstm;
  DenseParams head;
  HeadKind head_kind = HeadKind::kRegression;

  int input_dim() const { return lstm.input_dim(); }
  int hidden_dim() const { return lstm.hidden_dim(); }
  int output_dim() const { return head.out_dim(); }

  void validate() const;
};

/// Per-parameter partials of the scalar loss; shape-mirrors LstmNetwork.
struct Gradients {
  LstmParams lstm;
  DenseParams head;

  static Gradients zeros(const LstmNetwork& net);
};

/// Named view over every parameter tensor of a network (or gradient set).
/// Vectors appear as n x 1. Drives checkpoints, the global-norm clip and
/// the finite-difference sweep.
template <typename Ptr>
struct BasicTensorRef {
  std::string name;
  Ptr data;
  Eigen::Index rows;
  Eigen::Index cols;

  Eigen::Index size() const { return rows * cols; }
};

using TensorRef = BasicTensorRef<double*>;
using ConstTensorRef = BasicTensorRef<const double*>;

std::vector<TensorRef> named_tensors(LstmNetwork& net);
std::vector<TensorRef> named_tensors(Gradients& grads);
std::vector<ConstTensorRef> named_tensors(const LstmNetwork& net);
std::vector<ConstTensorRef> named_tensors(const Gradients& grads);

struct BpttResult {
  double loss = 0.0;
  Gradients grads;
};

/// Forward pass only: unrolled LSTM from a zero state, head on the final
/// hidden state, scalar loss against `target` scaled by `sample_weight`.
double forward_loss(const LstmNetwork& net, const std::vector<Vector>& xs,
                    const Vector& target, double sample_weight = 1.0);

/// Head output (probabilities for a classification head) on the final
/// hidden state of the unrolled sequence.
Vector forward_output(const LstmNetwork& net, const std::vector<Vector>& xs);

/// Reverse-mode derivatives of the loss w.r.t. every parameter, unrolled
/// over the whole sequence. Loss matches forward_loss exactly. Throws,
/// naming the offending tensor, if a non-finite gradient shows up.
BpttResult bptt(const LstmNetwork& net, const std::vector<Vector>& xs,
                const Vector& target, double sample_weight = 1.0);

/// Global-norm clip followed by theta <- theta - lr * grad. Deterministic.
void sgd_update(LstmNetwork& net, const Gradients& grads, double lr, double clip_norm);

/// Central-difference check of bptt over every parameter. Returns the max
/// over parameters of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
double grad_check(const LstmNetwork& net, const std::vector<Vector>& xs,
                  const Vector& target, double eps);

/// Xavier-uniform weights, zero biases except the forget-gate bias at 1.
LstmNetwork init_network(int input_dim, int hidden_dim, int output_dim,
                         HeadKind head_kind, std::uint64_t seed);

/// In-place accumulate: acc += scale * g.
void axpy_gradients(Gradients& acc, const Gradients& g, double scale);

}  // namespace duallstm
