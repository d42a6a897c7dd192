#pragma once

#include <cstdint>
#include <vector>

#include "sdcnn/layers.hpp"

namespace sdcnn::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam over a fixed parameter list.
class Adam {
public:
  Adam(std::vector<ParamRef> params, AdamConfig config);

  /// One update from the gradients currently stored in the parameter refs.
  void step();

  void set_learning_rate(double lr) { config_.learning_rate = lr; }

  int64_t step_count() const noexcept { return step_count_; }
  const AdamConfig& config() const noexcept { return config_; }

private:
  std::vector<ParamRef> params_;
  AdamConfig config_;
  std::vector<std::vector<double>> first_moment_, second_moment_;
  int64_t step_count_ = 0;
};

}  // namespace sdcnn::nn
