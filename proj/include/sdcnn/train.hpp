#pragma once

#include <cstdint>
#include <vector>

#include "sdcnn/graph.hpp"
#include "sdcnn/optimizer.hpp"

namespace sdcnn::nn {

struct TrainConfig {
  int64_t batch_size = 32;
  int64_t max_epochs = 100;
  double validation_fraction = 0.2;
  int64_t patience = 20;  // epochs without validation improvement
  AdamConfig adam;
  // Cosine decay of the learning rate towards lr * lr_final_fraction over
  // max_epochs; 1.0 keeps the rate constant.
  double lr_final_fraction = 1.0;
};

struct TrainResult {
  std::vector<double> train_loss;  // per epoch, mean over batches
  std::vector<double> val_loss;    // per epoch
  int64_t best_epoch = -1;         // 0-based epoch of the restored snapshot
  double best_val_loss = 0.0;
  int64_t epochs_run = 0;
};

/// Row-gather a columnar batch.
BatchInputs gather(const BatchInputs& all, const std::vector<int64_t>& rows);
std::vector<double> gather(const std::vector<double>& all,
                           const std::vector<int64_t>& rows);

/// Mini-batch training with a seeded validation split and restore-best early
/// stopping. The same (graph, data, config, seed) always produces the same
/// parameters bit for bit.
TrainResult train(NetworkGraph& graph, const BatchInputs& inputs,
                  const std::vector<double>& targets, const TrainConfig& config,
                  Rng& rng);

/// Validation-style loss (dropout off, running statistics).
double evaluate_loss(NetworkGraph& graph, const BatchInputs& inputs,
                     const std::vector<double>& targets, int64_t batch_size);

}  // namespace sdcnn::nn
