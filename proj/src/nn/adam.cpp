#include "adex/nn/adam.hpp"

#include <cmath>

#include "adex/error.hpp"

namespace adex::nn {

AdamState::AdamState(AdamConfig config, const ParamList& params) : config_(config) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const auto& p : params) {
    m_.emplace_back(p.value->shape());
    v_.emplace_back(p.value->shape());
  }
}

void AdamState::step(const ParamList& params) {
  if (params.size() != m_.size()) throw ConfigError("adam: parameter list changed size");
  for (const auto& p : params) {
    if (!p.grad->all_finite()) throw TrainingError("non-finite gradient in " + p.name);
  }
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    double* w = params[k].value->data();
    const double* g = params[k].grad->data();
    double* m = m_[k].data();
    double* v = v_[k].data();
    const std::size_t n = params[k].value->size();
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

void zero_grad(const ParamList& params) {
  for (const auto& p : params) p.grad->fill(0.0);
}

double grad_norm(const ParamList& params) {
  double sq = 0.0;
  for (const auto& p : params) {
    for (double g : p.grad->values()) sq += g * g;
  }
  return std::sqrt(sq);
}

double clip_grad_norm(const ParamList& params, double max_norm) {
  const double norm = grad_norm(params);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (const auto& p : params) {
      for (double& g : p.grad->values()) g *= scale;
    }
  }
  return norm;
}

void copy_values(const ParamList& from, const ParamList& to) {
  if (from.size() != to.size()) throw ConfigError("parameter lists differ in length");
  for (std::size_t k = 0; k < from.size(); ++k) {
    if (from[k].value->shape() != to[k].value->shape()) {
      throw ConfigError("parameter shape mismatch for " + from[k].name);
    }
    *to[k].value = *from[k].value;
  }
}

}  // namespace adex::nn
