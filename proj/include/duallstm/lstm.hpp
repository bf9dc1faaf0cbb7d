#pragma once

#include <Eigen/Dense>
#include <vector>

namespace duallstm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Weights and biases of one LSTM layer. w_x* act on the input, w_h* on the
/// previous hidden state; one block per gate (input, forget, output) plus the
/// cell candidate.
struct LstmParams {
  Matrix w_xi, w_xf, w_xo, w_xc;  // hidden_dim x input_dim
  Matrix w_hi, w_hf, w_ho, w_hc;  // hidden_dim x hidden_dim
  Vector b_i, b_f, b_o, b_c;      // hidden_dim

  static LstmParams zeros(int input_dim, int hidden_dim);

  int input_dim() const { return static_cast<int>(w_xi.cols()); }
  int hidden_dim() const { return static_cast<int>(w_xi.rows()); }

  /// Throws if shapes are inconsistent or any entry is non-finite.
  void validate() const;
};

/// Hidden and cell state after one step. h stays in (-1, 1) componentwise.
struct LstmState {
  Vector h;
  Vector c;

  static LstmState zeros(int hidden_dim);
};

/// Elementwise logistic sigmoid.
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// One cell update:
///   i = sigmoid(w_xi x + w_hi h_prev + b_i)     f, o alike
///   g = tanh(w_xc x + w_hc h_prev + b_c)
///   c = f (*) c_prev + i (*) g
///   h = o (*) tanh(c)
LstmState lstm_step(const LstmParams& params, const Vector& x_t, const LstmState& prev);

/// Unrolls lstm_step over a non-empty sequence; states[t] derives from
/// states[t-1], with the given initial state before step 0.
std::vector<LstmState> lstm_forward(const LstmParams& params,
                                    const std::vector<Vector>& xs,
                                    const LstmState& init);

/// Affine output layer, no activation.
struct DenseParams {
  Matrix w;  // out_dim x in_dim
  Vector b;  // out_dim

  static DenseParams zeros(int in_dim, int out_dim);

  int in_dim() const { return static_cast<int>(w.cols()); }
  int out_dim() const { return static_cast<int>(w.rows()); }

  void validate() const;
};

Vector dense_forward(const DenseParams& params, const Vector& h);

/// Max-subtracted softmax; output components lie in (0,1) and sum to 1.
Vector softmax(const Vector& logits);

/// -ln(probs[target class]); target must be one-hot.
double cross_entropy_loss(const Vector& probs, const Vector& one_hot_target);

/// 0.5 * sum((pred - target)^2).
double l2_loss(const Vector& pred, const Vector& target);

}  // namespace duallstm
