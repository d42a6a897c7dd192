#include "sdcnn/optimizer.hpp"

#include <cmath>

namespace sdcnn::nn {

Adam::Adam(std::vector<ParamRef> params, AdamConfig config)
    : config_(config) {
  for (ParamRef& p : params) {
    if (!p.trainable) continue;
    params_.push_back(p);
    first_moment_.emplace_back(p.value->values.size(), 0.0);
    second_moment_.emplace_back(p.value->values.size(), 0.0);
  }
}

void Adam::step() {
  ++step_count_;
  const double t = static_cast<double>(step_count_);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  for (size_t k = 0; k < params_.size(); ++k) {
    ParamRef& p = params_[k];
    std::vector<double>& m = first_moment_[k];
    std::vector<double>& v = second_moment_[k];
    for (size_t i = 0; i < m.size(); ++i) {
      const double g = p.grad->values[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p.value->values[i] -=
          config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

}  // namespace sdcnn::nn
