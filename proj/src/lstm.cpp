#include "duallstm/lstm.hpp"

#include <cmath>
#include <stdexcept>

namespace duallstm {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

LstmParams LstmParams::zeros(int input_dim, int hidden_dim) {
  LstmParams p;
  p.w_xi = Matrix::Zero(hidden_dim, input_dim);
  p.w_xf = Matrix::Zero(hidden_dim, input_dim);
  p.w_xo = Matrix::Zero(hidden_dim, input_dim);
  p.w_xc = Matrix::Zero(hidden_dim, input_dim);
  p.w_hi = Matrix::Zero(hidden_dim, hidden_dim);
  p.w_hf = Matrix::Zero(hidden_dim, hidden_dim);
  p.w_ho = Matrix::Zero(hidden_dim, hidden_dim);
  p.w_hc = Matrix::Zero(hidden_dim, hidden_dim);
  p.b_i = Vector::Zero(hidden_dim);
  p.b_f = Vector::Zero(hidden_dim);
  p.b_o = Vector::Zero(hidden_dim);
  p.b_c = Vector::Zero(hidden_dim);
  return p;
}

void LstmParams::validate() const {
  const int h = hidden_dim();
  const int in = input_dim();
  require(h > 0 && in > 0, "LstmParams: empty dimensions");
  for (const Matrix* m : {&w_xi, &w_xf, &w_xo, &w_xc}) {
    require(m->rows() == h && m->cols() == in, "LstmParams: input-weight shape mismatch");
    require(m->allFinite(), "LstmParams: non-finite input weight");
  }
  for (const Matrix* m : {&w_hi, &w_hf, &w_ho, &w_hc}) {
    require(m->rows() == h && m->cols() == h, "LstmParams: recurrent-weight shape mismatch");
    require(m->allFinite(), "LstmParams: non-finite recurrent weight");
  }
  for (const Vector* v : {&b_i, &b_f, &b_o, &b_c}) {
    require(v->size() == h, "LstmParams: bias length mismatch");
    require(v->allFinite(), "LstmParams: non-finite bias");
  }
}

LstmState LstmState::zeros(int hidden_dim) {
  return LstmState{Vector::Zero(hidden_dim), Vector::Zero(hidden_dim)};
}

LstmState lstm_step(const LstmParams& params, const Vector& x_t, const LstmState& prev) {
  const int h = params.hidden_dim();
  require(x_t.size() == params.input_dim(), "lstm_step: input dimension mismatch");
  require(prev.h.size() == h && prev.c.size() == h, "lstm_step: state dimension mismatch");
  require(x_t.allFinite() && prev.h.allFinite() && prev.c.allFinite(),
          "lstm_step: non-finite input");

  const Vector i = (params.w_xi * x_t + params.w_hi * prev.h + params.b_i)
                       .unaryExpr([](double v) { return sigmoid(v); });
  const Vector f = (params.w_xf * x_t + params.w_hf * prev.h + params.b_f)
                       .unaryExpr([](double v) { return sigmoid(v); });
  const Vector o = (params.w_xo * x_t + params.w_ho * prev.h + params.b_o)
                       .unaryExpr([](double v) { return sigmoid(v); });
  const Vector g = (params.w_xc * x_t + params.w_hc * prev.h + params.b_c)
                       .array()
                       .tanh();

  LstmState next;
  next.c = f.cwiseProduct(prev.c) + i.cwiseProduct(g);
  next.h = o.cwiseProduct(next.c.array().tanh().matrix());
  return next;
}

std::vector<LstmState> lstm_forward(const LstmParams& params,
                                    const std::vector<Vector>& xs,
                                    const LstmState& init) {
  require(!xs.empty(), "lstm_forward: empty input sequence");
  std::vector<LstmState> states;
  states.reserve(xs.size());
  const LstmState* prev = &init;
  for (const Vector& x : xs) {
    states.push_back(lstm_step(params, x, *prev));
    prev = &states.back();
  }
  return states;
}

DenseParams DenseParams::zeros(int in_dim, int out_dim) {
  return DenseParams{Matrix::Zero(out_dim, in_dim), Vector::Zero(out_dim)};
}

void DenseParams::validate() const {
  require(w.rows() == b.size(), "DenseParams: weight/bias shape mismatch");
  require(w.allFinite() && b.allFinite(), "DenseParams: non-finite entry");
}

Vector dense_forward(const DenseParams& params, const Vector& h) {
  require(h.size() == params.in_dim(), "dense_forward: input dimension mismatch");
  return params.w * h + params.b;
}

Vector softmax(const Vector& logits) {
  require(logits.size() >= 1, "softmax: empty logits");
  require(logits.allFinite(), "softmax: non-finite logits");
  const double m = logits.maxCoeff();
  Vector e = (logits.array() - m).exp();
  return e / e.sum();
}

double cross_entropy_loss(const Vector& probs, const Vector& one_hot_target) {
  require(probs.size() == one_hot_target.size(), "cross_entropy_loss: length mismatch");
  int hot = -1;
  for (int i = 0; i < one_hot_target.size(); ++i) {
    const double v = one_hot_target[i];
    if (v == 1.0) {
      require(hot < 0, "cross_entropy_loss: target is not one-hot");
      hot = i;
    } else {
      require(v == 0.0, "cross_entropy_loss: target is not one-hot");
    }
  }
  require(hot >= 0, "cross_entropy_loss: target is not one-hot");
  return -std::log(probs[hot]);
}

double l2_loss(const Vector& pred, const Vector& target) {
  require(pred.size() == target.size(), "l2_loss: length mismatch");
  return 0.5 * (pred - target).squaredNorm();
}

}  // namespace duallstm
