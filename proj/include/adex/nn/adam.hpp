#pragma once

#include <cstdint>
#include <vector>

#include "adex/nn/tensor.hpp"

namespace adex::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction. Moments are laid out in the same order as the
/// ParamList the state was created for.
class AdamState {
 public:
  AdamState() = default;
  AdamState(AdamConfig config, const ParamList& params);

  /// Applies one update from the accumulated gradients. Throws TrainingError
  /// without touching any parameter if a gradient is non-finite.
  void step(const ParamList& params);

  std::uint64_t steps() const { return t_; }
  const AdamConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }

 private:
  AdamConfig config_;
  std::uint64_t t_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

void zero_grad(const ParamList& params);

/// Global L2 norm of all gradients.
double grad_norm(const ParamList& params);

/// Rescales gradients so the global norm is at most max_norm. Returns the
/// norm before clipping. max_norm <= 0 disables clipping.
double clip_grad_norm(const ParamList& params, double max_norm);

void copy_values(const ParamList& from, const ParamList& to);

}  // namespace adex::nn
