#include "duallstm/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "duallstm/rng.hpp"

namespace duallstm {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Vector head_delta(const LstmNetwork& net, const Vector& logits, const Vector& target,
                  double sample_weight, double* loss_out) {
  if (net.head_kind == HeadKind::kClassification) {
    const Vector probs = softmax(logits);
    if (loss_out) *loss_out = sample_weight * cross_entropy_loss(probs, target);
    return sample_weight * (probs - target);
  }
  if (loss_out) *loss_out = sample_weight * l2_loss(logits, target);
  return sample_weight * (logits - target);
}

struct StepCache {
  Vector i, f, o, g, c, tanh_c, h;
};

}  // namespace

void LstmNetwork::validate() const {
  lstm.validate();
  head.validate();
  require(head.in_dim() == lstm.hidden_dim(), "LstmNetwork: head input dim != hidden dim");
}

Gradients Gradients::zeros(const LstmNetwork& net) {
  Gradients g;
  g.lstm = LstmParams::zeros(net.input_dim(), net.hidden_dim());
  g.head = DenseParams::zeros(net.hidden_dim(), net.output_dim());
  return g;
}

namespace {

template <typename LstmT, typename DenseT>
auto tensor_list(LstmT& p, DenseT& h) {
  using Ref = BasicTensorRef<decltype(p.w_xi.data())>;
  return std::vector<Ref>{
      {"w_xi", p.w_xi.data(), p.w_xi.rows(), p.w_xi.cols()},
      {"w_xf", p.w_xf.data(), p.w_xf.rows(), p.w_xf.cols()},
      {"w_xo", p.w_xo.data(), p.w_xo.rows(), p.w_xo.cols()},
      {"w_xc", p.w_xc.data(), p.w_xc.rows(), p.w_xc.cols()},
      {"w_hi", p.w_hi.data(), p.w_hi.rows(), p.w_hi.cols()},
      {"w_hf", p.w_hf.data(), p.w_hf.rows(), p.w_hf.cols()},
      {"w_ho", p.w_ho.data(), p.w_ho.rows(), p.w_ho.cols()},
      {"w_hc", p.w_hc.data(), p.w_hc.rows(), p.w_hc.cols()},
      {"b_i", p.b_i.data(), p.b_i.size(), 1},
      {"b_f", p.b_f.data(), p.b_f.size(), 1},
      {"b_o", p.b_o.data(), p.b_o.size(), 1},
      {"b_c", p.b_c.data(), p.b_c.size(), 1},
      {"head.w", h.w.data(), h.w.rows(), h.w.cols()},
      {"head.b", h.b.data(), h.b.size(), 1},
  };
}

}  // namespace

std::vector<TensorRef> named_tensors(LstmNetwork& net) {
  return tensor_list(net.lstm, net.head);
}

std::vector<TensorRef> named_tensors(Gradients& grads) {
  return tensor_list(grads.lstm, grads.head);
}

std::vector<ConstTensorRef> named_tensors(const LstmNetwork& net) {
  return tensor_list(net.lstm, net.head);
}

std::vector<ConstTensorRef> named_tensors(const Gradients& grads) {
  return tensor_list(grads.lstm, grads.head);
}

Vector forward_output(const LstmNetwork& net, const std::vector<Vector>& xs) {
  const auto states = lstm_forward(net.lstm, xs, LstmState::zeros(net.hidden_dim()));
  const Vector logits = dense_forward(net.head, states.back().h);
  return net.head_kind == HeadKind::kClassification ? softmax(logits) : logits;
}

double forward_loss(const LstmNetwork& net, const std::vector<Vector>& xs,
                    const Vector& target, double sample_weight) {
  const auto states = lstm_forward(net.lstm, xs, LstmState::zeros(net.hidden_dim()));
  const Vector logits = dense_forward(net.head, states.back().h);
  double loss = 0.0;
  head_delta(net, logits, target, sample_weight, &loss);
  return loss;
}

BpttResult bptt(const LstmNetwork& net, const std::vector<Vector>& xs,
                const Vector& target, double sample_weight) {
  require(!xs.empty(), "bptt: empty input sequence");
  require(target.size() == net.output_dim(), "bptt: target dimension mismatch");

  const int hidden = net.hidden_dim();
  const int steps = static_cast<int>(xs.size());
  const LstmParams& p = net.lstm;

  // Forward, caching every gate activation.
  std::vector<StepCache> cache(steps);
  const Vector zero = Vector::Zero(hidden);
  const Vector* h_prev = &zero;
  const Vector* c_prev = &zero;
  for (int t = 0; t < steps; ++t) {
    require(xs[t].size() == net.input_dim(), "bptt: input dimension mismatch");
    StepCache& s = cache[t];
    s.i = (p.w_xi * xs[t] + p.w_hi * *h_prev + p.b_i).unaryExpr([](double v) { return sigmoid(v); });
    s.f = (p.w_xf * xs[t] + p.w_hf * *h_prev + p.b_f).unaryExpr([](double v) { return sigmoid(v); });
    s.o = (p.w_xo * xs[t] + p.w_ho * *h_prev + p.b_o).unaryExpr([](double v) { return sigmoid(v); });
    s.g = (p.w_xc * xs[t] + p.w_hc * *h_prev + p.b_c).array().tanh();
    s.c = s.f.cwiseProduct(*c_prev) + s.i.cwiseProduct(s.g);
    s.tanh_c = s.c.array().tanh();
    s.h = s.o.cwiseProduct(s.tanh_c);
    h_prev = &s.h;
    c_prev = &s.c;
  }

  BpttResult out;
  out.grads = Gradients::zeros(net);
  Gradients& g = out.grads;

  const Vector& h_last = cache[steps - 1].h;
  const Vector logits = dense_forward(net.head, h_last);
  const Vector delta = head_delta(net, logits, target, sample_weight, &out.loss);

  g.head.w.noalias() = delta * h_last.transpose();
  g.head.b = delta;

  Vector dh = net.head.w.transpose() * delta;
  Vector dc = Vector::Zero(hidden);

  for (int t = steps - 1; t >= 0; --t) {
    const StepCache& s = cache[t];
    const Vector& hp = (t > 0) ? cache[t - 1].h : zero;
    const Vector& cp = (t > 0) ? cache[t - 1].c : zero;

    // h = o (*) tanh(c)
    const Vector da_o =
        dh.cwiseProduct(s.tanh_c).cwiseProduct(s.o).cwiseProduct(Vector::Ones(hidden) - s.o);
    dc += dh.cwiseProduct(s.o).cwiseProduct(
        (Vector::Ones(hidden) - s.tanh_c.cwiseProduct(s.tanh_c)));

    // c = f (*) c_prev + i (*) g
    const Vector da_f =
        dc.cwiseProduct(cp).cwiseProduct(s.f).cwiseProduct(Vector::Ones(hidden) - s.f);
    const Vector da_i =
        dc.cwiseProduct(s.g).cwiseProduct(s.i).cwiseProduct(Vector::Ones(hidden) - s.i);
    const Vector da_g =
        dc.cwiseProduct(s.i).cwiseProduct(Vector::Ones(hidden) - s.g.cwiseProduct(s.g));

    g.lstm.w_xi.noalias() += da_i * xs[t].transpose();
    g.lstm.w_xf.noalias() += da_f * xs[t].transpose();
    g.lstm.w_xo.noalias() += da_o * xs[t].transpose();
    g.lstm.w_xc.noalias() += da_g * xs[t].transpose();
    g.lstm.w_hi.noalias() += da_i * hp.transpose();
    g.lstm.w_hf.noalias() += da_f * hp.transpose();
    g.lstm.w_ho.noalias() += da_o * hp.transpose();
    g.lstm.w_hc.noalias() += da_g * hp.transpose();
    g.lstm.b_i += da_i;
    g.lstm.b_f += da_f;
    g.lstm.b_o += da_o;
    g.lstm.b_c += da_g;

    dh.noalias() = p.w_hi.transpose() * da_i;
    dh.noalias() += p.w_hf.transpose() * da_f;
    dh.noalias() += p.w_ho.transpose() * da_o;
    dh.noalias() += p.w_hc.transpose() * da_g;
    dc = dc.cwiseProduct(s.f);
  }

  if (!std::isfinite(out.loss)) {
    throw std::runtime_error("bptt: non-finite loss (gradient explosion)");
  }
  for (const ConstTensorRef& t : named_tensors(std::as_const(g))) {
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      if (!std::isfinite(t.data[k])) {
        throw std::runtime_error("bptt: non-finite gradient in tensor " + t.name);
      }
    }
  }
  return out;
}

void sgd_update(LstmNetwork& net, const Gradients& grads, double lr, double clip_norm) {
  require(lr > 0.0, "sgd_update: lr must be positive");
  require(clip_norm > 0.0, "sgd_update: clip_norm must be positive");

  double sq = 0.0;
  for (const ConstTensorRef& t : named_tensors(grads)) {
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      const double v = t.data[k];
      if (!std::isfinite(v)) {
        throw std::invalid_argument("sgd_update: non-finite gradient in tensor " + t.name);
      }
      sq += v * v;
    }
  }
  const double norm = std::sqrt(sq);
  const double scale = (norm > clip_norm) ? clip_norm / norm : 1.0;

  const auto gts = named_tensors(grads);
  const auto pts = named_tensors(net);
  for (std::size_t n = 0; n < pts.size(); ++n) {
    for (Eigen::Index k = 0; k < pts[n].size(); ++k) {
      pts[n].data[k] -= lr * scale * gts[n].data[k];
    }
  }
}

double grad_check(const LstmNetwork& net, const std::vector<Vector>& xs,
                  const Vector& target, double eps) {
  require(eps >= 1e-7 && eps <= 1e-3, "grad_check: eps out of range");

  const BpttResult analytic = bptt(net, xs, target);

  LstmNetwork work = net;
  auto work_tensors = named_tensors(work);
  auto grad_tensors = named_tensors(analytic.grads);

  double max_rel = 0.0;
  for (std::size_t n = 0; n < work_tensors.size(); ++n) {
    for (Eigen::Index k = 0; k < work_tensors[n].size(); ++k) {
      double& theta = work_tensors[n].data[k];
      const double saved = theta;
      theta = saved + eps;
      const double lp = forward_loss(work, xs, target);
      theta = saved - eps;
      const double lm = forward_loss(work, xs, target);
      theta = saved;
      const double numeric = (lp - lm) / (2.0 * eps);
      const double a = grad_tensors[n].data[k];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

LstmNetwork init_network(int input_dim, int hidden_dim, int output_dim,
                         HeadKind head_kind, std::uint64_t seed) {
  LstmNetwork net;
  net.lstm = LstmParams::zeros(input_dim, hidden_dim);
  net.head = DenseParams::zeros(hidden_dim, output_dim);
  net.head_kind = head_kind;

  Rng rng(seed);
  auto fill = [&rng](Matrix& m) {
    const double s = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        m(r, c) = rng.uniform(-s, s);
      }
    }
  };
  fill(net.lstm.w_xi);
  fill(net.lstm.w_xf);
  fill(net.lstm.w_xo);
  fill(net.lstm.w_xc);
  fill(net.lstm.w_hi);
  fill(net.lstm.w_hf);
  fill(net.lstm.w_ho);
  fill(net.lstm.w_hc);
  fill(net.head.w);
  net.lstm.b_f.setConstant(1.0);  // forget-gate bias trick
  return net;
}

void axpy_gradients(Gradients& acc, const Gradients& g, double scale) {
  auto at = named_tensors(acc);
  auto gt = named_tensors(g);
  for (std::size_t n = 0; n < at.size(); ++n) {
    for (Eigen::Index k = 0; k < at[n].size(); ++k) {
      at[n].data[k] += scale * gt[n].data[k];
    }
  }
}

}  // namespace duallstm
