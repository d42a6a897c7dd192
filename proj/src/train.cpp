#include "sdcnn/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace sdcnn::nn {

namespace {

Tensor gather_rows(const Tensor& t, const std::vector<int64_t>& rows) {
  if (t.size() == 0) return t;
  const int64_t n = t.dim(0);
  const int64_t stride = t.size() / n;
  std::vector<int64_t> shape = t.shape;
  shape[0] = static_cast<int64_t>(rows.size());
  Tensor out = Tensor::zeros(shape);
  for (size_t i = 0; i < rows.size(); ++i) {
    const int64_t r = rows[i];
    require(r >= 0 && r < n, ErrorCode::InvalidArgument, "gather row out of range");
    std::copy(t.values.begin() + r * stride, t.values.begin() + (r + 1) * stride,
              out.values.begin() + static_cast<int64_t>(i) * stride);
  }
  return out;
}

}  // namespace

BatchInputs gather(const BatchInputs& all, const std::vector<int64_t>& rows) {
  BatchInputs out;
  out.coords = gather_rows(all.coords, rows);
  out.coords_basis = gather_rows(all.coords_basis, rows);
  out.basis_images.reserve(all.basis_images.size());
  for (const Tensor& img : all.basis_images) {
    out.basis_images.push_back(gather_rows(img, rows));
  }
  return out;
}

std::vector<double> gather(const std::vector<double>& all,
                           const std::vector<int64_t>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (int64_t r : rows) out.push_back(all[static_cast<size_t>(r)]);
  return out;
}

double evaluate_loss(NetworkGraph& graph, const BatchInputs& inputs,
                     const std::vector<double>& targets, int64_t batch_size) {
  const int64_t n = inputs.batch_size();
  require(n == static_cast<int64_t>(targets.size()), ErrorCode::InvalidArgument,
          "target count does not match inputs");
  ForwardCtx ctx{Mode::Off, nullptr};
  double sum = 0.0;
  for (int64_t at = 0; at < n; at += batch_size) {
    const int64_t take = std::min(batch_size, n - at);
    std::vector<int64_t> rows(static_cast<size_t>(take));
    std::iota(rows.begin(), rows.end(), at);
    Tensor pred = graph.forward(gather(inputs, rows), ctx);
    for (int64_t i = 0; i < take; ++i) {
      const double r = pred.values[static_cast<size_t>(i)] -
                       targets[static_cast<size_t>(at + i)];
      sum += r * r;
    }
  }
  return sum / static_cast<double>(n);
}

TrainResult train(NetworkGraph& graph, const BatchInputs& inputs,
                  const std::vector<double>& targets, const TrainConfig& config,
                  Rng& rng) {
  const int64_t n = inputs.batch_size();
  require(n > 0, ErrorCode::InvalidArgument, "empty training dataset");
  require(n == static_cast<int64_t>(targets.size()), ErrorCode::InvalidArgument,
          "target count does not match inputs");
  require(config.batch_size >= 1, ErrorCode::InvalidArgument, "batch_size must be >= 1");
  require(config.max_epochs >= 1, ErrorCode::InvalidArgument, "max_epochs must be >= 1");
  require(config.validation_fraction > 0.0 && config.validation_fraction < 1.0,
          ErrorCode::InvalidArgument, "validation_fraction must lie in (0, 1)");
  require(config.patience >= 0, ErrorCode::InvalidArgument, "patience must be >= 0");

  std::vector<int64_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  const int64_t n_val =
      std::max<int64_t>(1, static_cast<int64_t>(std::floor(
                               config.validation_fraction * static_cast<double>(n))));
  require(n - n_val >= 1, ErrorCode::InvalidArgument,
          "dataset too small for the validation split");
  std::vector<int64_t> val_rows(order.begin(), order.begin() + n_val);
  std::vector<int64_t> fit_rows(order.begin() + n_val, order.end());

  const BatchInputs val_inputs = gather(inputs, val_rows);
  const std::vector<double> val_targets = gather(targets, val_rows);
  const BatchInputs fit_inputs = gather(inputs, fit_rows);
  const std::vector<double> fit_targets = gather(targets, fit_rows);
  const int64_t n_fit = static_cast<int64_t>(fit_rows.size());

  Adam optimizer(graph.params(), config.adam);

  TrainResult result;
  std::vector<double> best_snapshot;
  double best_val = std::numeric_limits<double>::infinity();
  int64_t epochs_since_improvement = 0;

  std::vector<int64_t> epoch_order(static_cast<size_t>(n_fit));
  std::iota(epoch_order.begin(), epoch_order.end(), 0);

  require(config.lr_final_fraction > 0.0 && config.lr_final_fraction <= 1.0,
          ErrorCode::InvalidArgument, "lr_final_fraction must lie in (0, 1]");

  for (int64_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    if (config.lr_final_fraction < 1.0 && config.max_epochs > 1) {
      const double t = static_cast<double>(epoch) /
                       static_cast<double>(config.max_epochs - 1);
      const double frac = config.lr_final_fraction +
                          (1.0 - config.lr_final_fraction) * 0.5 *
                              (1.0 + std::cos(M_PI * t));
      optimizer.set_learning_rate(config.adam.learning_rate * frac);
    }
    rng.shuffle(epoch_order);
    double epoch_sum = 0.0;
    int64_t at = 0;
    while (at < n_fit) {
      int64_t take = std::min(config.batch_size, n_fit - at);
      // A trailing batch of one sample would break batch statistics; fold it
      // into this batch instead.
      if (n_fit - (at + take) == 1) take += 1;
      std::vector<int64_t> rows(epoch_order.begin() + at,
                                epoch_order.begin() + at + take);
      at += take;

      BatchInputs batch = gather(fit_inputs, rows);
      const std::vector<double> batch_targets = gather(fit_targets, rows);
      Tensor y = Tensor::of({take}, DoubleVec(batch_targets.begin(), batch_targets.end()));

      ForwardCtx ctx{Mode::Train, &rng};
      Tensor pred = graph.forward(batch, ctx);
      const double loss = quadratic_loss(pred, y);
      if (!std::isfinite(loss)) {
        fail(ErrorCode::Numeric,
             "non-finite training loss at epoch " + std::to_string(epoch));
      }
      epoch_sum += loss * static_cast<double>(take);
      graph.backward(quadratic_loss_grad(pred, y));
      optimizer.step();
    }
    result.train_loss.push_back(epoch_sum / static_cast<double>(n_fit));

    const double val_loss =
        evaluate_loss(graph, val_inputs, val_targets, config.batch_size);
    if (!std::isfinite(val_loss)) {
      fail(ErrorCode::Numeric,
           "non-finite validation loss at epoch " + std::to_string(epoch));
    }
    result.val_loss.push_back(val_loss);
    result.epochs_run = epoch + 1;

    if (val_loss < best_val) {
      best_val = val_loss;
      best_snapshot = graph.snapshot();
      result.best_epoch = epoch;
      epochs_since_improvement = 0;
    } else {
      ++epochs_since_improvement;
      if (epochs_since_improvement > config.patience) break;
    }
  }

  graph.restore(best_snapshot);
  result.best_val_loss = best_val;
  return result;
}

}  // namespace sdcnn::nn
