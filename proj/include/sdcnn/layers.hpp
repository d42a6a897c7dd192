#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sdcnn/rng.hpp"
#include "sdcnn/tensor.hpp"

namespace sdcnn::nn {

enum class Activation { Identity, ReLU, Sigmoid };

double activate(Activation f, double x);
const char* activation_name(Activation f);
Activation activation_from_name(const std::string& name);

/// Dropout / batch-norm behavior for a forward pass.
enum class Mode {
  Train,      // dropout active, batch statistics, running stats updated
  McPredict,  // dropout active, running statistics
  Off,        // dropout identity, running statistics
};

struct ForwardCtx {
  Mode mode = Mode::Off;
  Rng* rng = nullptr;  // required when mode != Off and a dropout rate is > 0
};

struct ParamRef {
  std::string name;
  Tensor* value = nullptr;
  Tensor* grad = nullptr;   // null for non-trainable state
  bool trainable = true;
};

class Layer {
public:
  virtual ~Layer() = default;

  /// Batched forward pass; caches whatever backward() needs.
  virtual Tensor forward(const Tensor& input, ForwardCtx& ctx) = 0;

  /// Reverse-mode pass for the batch of the last forward() call. Writes
  /// parameter gradients and returns the gradient w.r.t. the input.
  virtual Tensor backward(const Tensor& grad_output) = 0;

  /// Parameters (and non-trainable state such as running statistics), in a
  /// fixed order used by the optimizer, snapshots and serialization.
  virtual void collect_params(const std::string& prefix,
                              std::vector<ParamRef>& out) = 0;

  virtual std::string kind() const = 0;
};

/// Fully connected layer, y = f(x W + c) with W of shape in x out.
class DenseLayer final : public Layer {
public:
  DenseLayer(int64_t in_dim, int64_t out_dim, Activation activation);

  Tensor forward(const Tensor& input, ForwardCtx& ctx) override;
  Tensor backward(const Tensor& grad_output) override;
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef>& out) override;
  std::string kind() const override { return "dense"; }

  int64_t in_dim() const { return in_dim_; }
  int64_t out_dim() const { return out_dim_; }
  Activation activation() const { return activation_; }

  Tensor weights;  // [in, out]
  Tensor bias;     // [out]

private:
  int64_t in_dim_, out_dim_;
  Activation activation_;
  Tensor grad_weights_, grad_bias_;
  Tensor input_, pre_act_;
  bool batched_input_ = true;
};

/// Valid 2x2 correlation with stride 1 over a single-channel image,
/// per-filter bias, ReLU. Input [B, n, m] -> output [B, nF, n-1, m-1].
class Conv2dLayer final : public Layer {
public:
  Conv2dLayer(int n_filters, Activation activation = Activation::ReLU);

  Tensor forward(const Tensor& input, ForwardCtx& ctx) override;
  Tensor backward(const Tensor& grad_output) override;
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef>& out) override;
  std::string kind() const override { return "conv2d"; }

  int n_filters() const { return n_filters_; }

  Tensor filters;  // [nF, 2, 2]
  Tensor bias;     // [nF]

private:
  int n_filters_;
  Activation activation_;
  Tensor grad_filters_, grad_bias_;
  Tensor input_, pre_act_;
};

/// Inverted dropout: units dropped with probability `rate`, survivors scaled
/// by 1/(1-rate). Identity in Off mode. A fresh mask is drawn on every
/// active forward pass unless the mask is frozen (gradient-check hook).
class DropoutLayer final : public Layer {
public:
  explicit DropoutLayer(double rate);

  Tensor forward(const Tensor& input, ForwardCtx& ctx) override;
  Tensor backward(const Tensor& grad_output) override;
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef>& out) override;
  std::string kind() const override { return "dropout"; }

  double rate() const { return rate_; }
  void freeze_mask(bool frozen) { frozen_ = frozen; }
  const std::vector<double>& last_mask() const { return mask_; }

private:
  double rate_;
  bool frozen_ = false;
  bool active_ = false;  // whether the last forward applied a mask
  std::vector<double> mask_;
};

/// Per-feature batch normalization over [B, d] inputs with an affine
/// (gamma, beta) stage. Training mode normalizes by biased batch statistics
/// and updates the running ones; other modes use the running statistics.
class BatchNormLayer final : public Layer {
public:
  explicit BatchNormLayer(int64_t dim, double epsilon = 1e-5,
                          double momentum = 0.99);

  Tensor forward(const Tensor& input, ForwardCtx& ctx) override;
  Tensor backward(const Tensor& grad_output) override;
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef>& out) override;
  std::string kind() const override { return "batchnorm"; }

  int64_t dim() const { return dim_; }

  Tensor gamma, beta;
  Tensor running_mean, running_var;

private:
  int64_t dim_;
  double epsilon_, momentum_;
  Tensor grad_gamma_, grad_beta_;
  // caches for the training-mode backward pass
  Tensor centered_, normalized_;
  std::vector<double> inv_std_;
  int64_t batch_ = 0;
  bool trained_forward_ = false;
};

/// [B, ...] -> [B, prod(rest)]; pure reshape.
class FlattenLayer final : public Layer {
public:
  Tensor forward(const Tensor& input, ForwardCtx& ctx) override;
  Tensor backward(const Tensor& grad_output) override;
  void collect_params(const std::string&, std::vector<ParamRef>&) override {}
  std::string kind() const override { return "flatten"; }

private:
  std::vector<int64_t> input_shape_;
};

/// Mean of squared residuals (batch-size invariant).
double quadratic_loss(const Tensor& pred, const Tensor& obs);

/// d quadratic_loss / d pred, same shape as pred.
Tensor quadratic_loss_grad(const Tensor& pred, const Tensor& obs);

}  // namespace sdcnn::nn
