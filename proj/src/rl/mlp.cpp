#include "p2psim/rl/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "p2psim/error.hpp"
#include "p2psim/rl/vec_env.hpp"

namespace p2psim::rl {

const char* to_string(Activation a) {
  switch (a) {
  case Activation::Relu: return "relu";
  case Activation::Tanh: return "tanh";
  case Activation::Identity: return "identity";
  }
  return "?";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw ValidationError("unknown activation '" + name + "'");
}

Mlp::Mlp(std::vector<int> sizes, Activation hidden) : sizes_(std::move(sizes)), hidden_(hidden) {
  if (sizes_.size() < 2) throw ValidationError("mlp: need at least input and output sizes");
  for (int s : sizes_)
    if (s <= 0) throw ValidationError("mlp: layer sizes must be positive");
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(offset);
    offset += static_cast<std::size_t>(sizes_[l] * sizes_[l + 1] + sizes_[l + 1]);
  }
  params_.assign(offset, 0.0);
}

Mlp::Mlp(std::vector<int> sizes, Activation hidden, util::Rng& rng) : Mlp(std::move(sizes), hidden) {
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    double* p = params_.data() + offsets_[l];
    for (int k = 0; k < in * out + out; ++k) p[k] = rng.uniform(-bound, bound);
  }
}

Mlp Mlp::zeros(std::vector<int> sizes, Activation hidden) { return Mlp(std::move(sizes), hidden); }

std::vector<double> Mlp::forward(std::span<const double> input) const {
  Tape tape;
  return forward(input, tape);
}

const std::vector<double>& Mlp::forward(std::span<const double> input, Tape& tape) const {
  if (static_cast<int>(input.size()) != input_size()) throw ValidationError("mlp: input size mismatch");
  const std::size_t layers = sizes_.size() - 1;
  tape.pre.resize(layers);
  tape.post.resize(layers + 1);
  tape.post[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* w = params_.data() + offsets_[l];
    const double* b = w + in * out;
    const auto& x = tape.post[l];
    auto& z = tape.pre[l];
    z.resize(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + o * in;
      for (int i = 0; i < in; ++i) acc += row[i] * x[static_cast<std::size_t>(i)];
      z[static_cast<std::size_t>(o)] = acc;
    }
    auto& y = tape.post[l + 1];
    y = z;
    if (l + 1 < layers) {
      switch (hidden_) {
      case Activation::Relu:
        for (auto& v : y) v = v > 0.0 ? v : 0.0;
        break;
      case Activation::Tanh:
        for (auto& v : y) v = std::tanh(v);
        break;
      case Activation::Identity:
        break;
      }
    }
  }
  return tape.post.back();
}

void Mlp::backward(const Tape& tape, std::span<const double> grad_output, std::span<double> grad_params) const {
  if (grad_params.size() != params_.size()) throw ValidationError("mlp: gradient buffer size mismatch");
  const std::size_t layers = sizes_.size() - 1;
  std::vector<double> delta(grad_output.begin(), grad_output.end());
  std::vector<double> prev;
  for (std::size_t l = layers; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    if (l + 1 < layers) {
      // delta currently holds dL/dpost; fold in the activation derivative.
      const auto& z = tape.pre[l];
      const auto& y = tape.post[l + 1];
      for (int o = 0; o < out; ++o) {
        const auto k = static_cast<std::size_t>(o);
        switch (hidden_) {
        case Activation::Relu: delta[k] = z[k] > 0.0 ? delta[k] : 0.0; break;
        case Activation::Tanh: delta[k] *= 1.0 - y[k] * y[k]; break;
        case Activation::Identity: break;
        }
      }
    }
    const double* w = params_.data() + offsets_[l];
    double* gw = grad_params.data() + offsets_[l];
    double* gb = gw + in * out;
    const auto& x = tape.post[l];
    for (int o = 0; o < out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      double* grow = gw + o * in;
      for (int i = 0; i < in; ++i) grow[i] += d * x[static_cast<std::size_t>(i)];
      gb[o] += d;
    }
    if (l == 0) break;
    prev.assign(static_cast<std::size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      const double* row = w + o * in;
      for (int i = 0; i < in; ++i) prev[static_cast<std::size_t>(i)] += row[i] * d;
    }
    delta.swap(prev);
  }
}

OutputLoss squared_error_loss(std::vector<double> target) {
  return [target = std::move(target)](std::span<const double> y, std::vector<double>* grad) {
    if (y.size() != target.size()) throw ValidationError("squared_error_loss: size mismatch");
    double loss = 0.0;
    if (grad) grad->assign(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double d = y[i] - target[i];
      loss += 0.5 * d * d;
      if (grad) (*grad)[i] = d;
    }
    return loss;
  };
}

double gradcheck(const Mlp& net, std::span<const double> input, const OutputLoss& loss, double h) {
  Mlp::Tape tape;
  std::vector<double> grad_out;
  loss(net.forward(input, tape), &grad_out);
  std::vector<double> analytic(net.param_count(), 0.0);
  net.backward(tape, grad_out, analytic);

  Mlp probe = net;
  double worst = 0.0;
  for (std::size_t k = 0; k < probe.param_count(); ++k) {
    const double saved = probe.params()[k];
    probe.params()[k] = saved + h;
    const double up = loss(probe.forward(input), nullptr);
    probe.params()[k] = saved - h;
    const double down = loss(probe.forward(input), nullptr);
    probe.params()[k] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
  }
  return worst;
}

double tail_mean(const LearningCurve& curve, std::size_t n) {
  if (curve.empty()) return 0.0;
  const std::size_t take = std::min(n, curve.size());
  double sum = 0.0;
  for (std::size_t i = curve.size() - take; i < curve.size(); ++i) sum += curve[i].mean_reward;
  return sum / static_cast<double>(take);
}

int argmax_random_tie(std::span<const double> values, util::Rng& rng) {
  if (values.empty()) throw ValidationError("argmax of an empty vector");
  const double best = *std::max_element(values.begin(), values.end());
  std::vector<int> ties;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == best) ties.push_back(static_cast<int>(i));
  return ties.size() == 1 ? ties[0] : ties[static_cast<std::size_t>(rng.below(ties.size()))];
}

int argmax(std::span<const double> values) {
  if (values.empty()) throw ValidationError("argmax of an empty vector");
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

double linear_schedule(double initial, double final, double fraction, double progress) {
  if (fraction <= 0.0 || progress >= fraction) return final;
  return initial + (final - initial) * (progress / fraction);
}

} // namespace p2psim::rl
