#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "p2psim/util/random.hpp"

namespace p2psim::rl {

enum class Activation { Relu, Tanh, Identity };

const char* to_string(Activation activation);
Activation activation_from_string(const std::string& name);

// Fully connected network with a linear output layer. Parameters live in one
// flat vector, layer by layer: weights (out x in, row-major) then biases.
class Mlp {
public:
  struct Tape {
    // post[0] is the input; post[l+1] is the output of layer l.
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;
  };

  Mlp() = default;
  Mlp(std::vector<int> sizes, Activation hidden, util::Rng& rng);

  static Mlp zeros(std::vector<int> sizes, Activation hidden);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  Activation activation() const { return hidden_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  std::vector<double> forward(std::span<const double> input) const;
  const std::vector<double>& forward(std::span<const double> input, Tape& tape) const;

  // Adds dLoss/dparams to `grad_params` for the forward pass recorded in `tape`.
  void backward(const Tape& tape, std::span<const double> grad_output, std::span<double> grad_params) const;

private:
  Mlp(std::vector<int> sizes, Activation hidden);
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

  std::vector<int> sizes_;
  Activation hidden_ = Activation::Relu;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// Loss of a network output; fills dLoss/doutput when `grad_output` is non-null.
using OutputLoss = std::function<double(std::span<const double> output, std::vector<double>* grad_output)>;

OutputLoss squared_error_loss(std::vector<double> target);

// Largest relative disagreement between backprop gradients and central
// finite differences over every parameter. Relative error is
// |a - n| / max(|a|, |n|, 1e-6).
double gradcheck(const Mlp& net, std::span<const double> input, const OutputLoss& loss, double h = 1e-5);

} // namespace p2psim::rl
