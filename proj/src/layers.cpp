#include "sdcnn/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

namespace sdcnn::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using CMatMap = Eigen::Map<const RowMat>;
using CRowVecMap = Eigen::Map<const Eigen::RowVectorXd>;

double activation_grad(Activation f, double pre) {
  switch (f) {
    case Activation::Identity: return 1.0;
    case Activation::ReLU: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-pre));
      return s * (1.0 - s);
    }
  }
  return 0.0;
}

}  // namespace

double activate(Activation f, double x) {
  switch (f) {
    case Activation::Identity: return x;
    case Activation::ReLU: return x > 0.0 ? x : 0.0;
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return 0.0;
}

const char* activation_name(Activation f) {
  switch (f) {
    case Activation::Identity: return "identity";
    case Activation::ReLU: return "relu";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "?";
}

Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::Identity;
  if (name == "relu") return Activation::ReLU;
  if (name == "sigmoid") return Activation::Sigmoid;
  fail(ErrorCode::Parse, "unknown activation: " + name);
}

// ---- DenseLayer -----------------------------------------------------------

DenseLayer::DenseLayer(int64_t in_dim, int64_t out_dim, Activation activation)
    : weights(Tensor::zeros({in_dim, out_dim})),
      bias(Tensor::zeros({out_dim})),
      in_dim_(in_dim),
      out_dim_(out_dim),
      activation_(activation),
      grad_weights_(Tensor::zeros({in_dim, out_dim})),
      grad_bias_(Tensor::zeros({out_dim})) {}

Tensor DenseLayer::forward(const Tensor& input, ForwardCtx&) {
  batched_input_ = input.rank() != 1;
  Tensor x = batched_input_ ? input : input.reshaped({1, input.size()});
  require(x.rank() == 2 && x.dim(1) == in_dim_, ErrorCode::InvalidArgument,
          "dense layer expects input width " + std::to_string(in_dim_));
  const int64_t batch = x.dim(0);

  input_ = x;
  pre_act_ = Tensor::zeros({batch, out_dim_});
  {
    CMatMap xm(x.data(), batch, in_dim_);
    CMatMap wm(weights.data(), in_dim_, out_dim_);
    MatMap zm(pre_act_.data(), batch, out_dim_);
    zm.noalias() = xm * wm;
    zm.rowwise() += CRowVecMap(bias.data(), out_dim_);
  }
  Tensor out = Tensor::zeros({batch, out_dim_});
  for (int64_t i = 0; i < out.size(); ++i) {
    out.values[i] = activate(activation_, pre_act_.values[i]);
  }
  return batched_input_ ? out : out.reshaped({out_dim_});
}

Tensor DenseLayer::backward(const Tensor& grad_output) {
  Tensor g = grad_output.rank() == 1
                 ? grad_output.reshaped({1, grad_output.size()})
                 : grad_output;
  const int64_t batch = input_.dim(0);
  require(g.rank() == 2 && g.dim(0) == batch && g.dim(1) == out_dim_,
          ErrorCode::InvalidArgument, "dense backward shape mismatch");

  Tensor dz = Tensor::zeros({batch, out_dim_});
  for (int64_t i = 0; i < dz.size(); ++i) {
    dz.values[i] = g.values[i] * activation_grad(activation_, pre_act_.values[i]);
  }

  Tensor dx = Tensor::zeros({batch, in_dim_});
  {
    CMatMap xm(input_.data(), batch, in_dim_);
    CMatMap dzm(dz.data(), batch, out_dim_);
    CMatMap wm(weights.data(), in_dim_, out_dim_);
    MatMap dwm(grad_weights_.data(), in_dim_, out_dim_);
    MatMap dxm(dx.data(), batch, in_dim_);
    dwm.noalias() = xm.transpose() * dzm;
    dxm.noalias() = dzm * wm.transpose();
    Eigen::Map<Eigen::RowVectorXd>(grad_bias_.data(), out_dim_) = dzm.colwise().sum();
  }
  return batched_input_ ? dx : dx.reshaped({in_dim_});
}

void DenseLayer::collect_params(const std::string& prefix,
                                std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weights", &weights, &grad_weights_, true});
  out.push_back({prefix + ".bias", &bias, &grad_bias_, true});
}

// ---- Conv2dLayer ----------------------------------------------------------

Conv2dLayer::Conv2dLayer(int n_filters, Activation activation)
    : filters(Tensor::zeros({n_filters, 2, 2})),
      bias(Tensor::zeros({n_filters})),
      n_filters_(n_filters),
      activation_(activation),
      grad_filters_(Tensor::zeros({n_filters, 2, 2})),
      grad_bias_(Tensor::zeros({n_filters})) {
  require(n_filters >= 1, ErrorCode::InvalidArgument, "n_filters must be >= 1");
}

Tensor Conv2dLayer::forward(const Tensor& input, ForwardCtx&) {
  const bool batched = input.rank() == 3;
  require(batched || input.rank() == 2, ErrorCode::InvalidArgument,
          "conv2d expects a [B, n, m] or [n, m] tensor");
  Tensor x = batched ? input : input.reshaped({1, input.dim(0), input.dim(1)});
  const int64_t batch = x.dim(0), n = x.dim(1), m = x.dim(2);
  require(n >= 2 && m >= 2, ErrorCode::InvalidArgument,
          "conv2d input must be at least 2x2");

  input_ = x;
  const int64_t on = n - 1, om = m - 1;
  pre_act_ = Tensor::zeros({batch, n_filters_, on, om});
  Tensor out = Tensor::zeros({batch, n_filters_, on, om});

  const double* img = x.data();
  const double* flt = filters.data();
  double* pre = pre_act_.data();
  double* y = out.data();
  for (int64_t b = 0; b < batch; ++b) {
    const double* ib = img + b * n * m;
    for (int64_t l = 0; l < n_filters_; ++l) {
      const double* fl = flt + l * 4;
      double* pb = pre + (b * n_filters_ + l) * on * om;
      double* yb = y + (b * n_filters_ + l) * on * om;
      for (int64_t p = 0; p < on; ++p) {
        for (int64_t q = 0; q < om; ++q) {
          double acc = 0.0;
          for (int64_t fm = 0; fm < 2; ++fm) {
            for (int64_t fn = 0; fn < 2; ++fn) {
              acc += ib[(p + fm) * m + (q + fn)] * fl[fm * 2 + fn];
            }
          }
          acc += bias.values[l];
          pb[p * om + q] = acc;
          yb[p * om + q] = activate(activation_, acc);
        }
      }
    }
  }
  return batched ? out
                 : out.reshaped({static_cast<int64_t>(n_filters_), on, om});
}

Tensor Conv2dLayer::backward(const Tensor& grad_output) {
  const int64_t batch = input_.dim(0), n = input_.dim(1), m = input_.dim(2);
  const int64_t on = n - 1, om = m - 1;
  Tensor g = grad_output.rank() == 3
                 ? grad_output.reshaped({1, grad_output.dim(0), grad_output.dim(1),
                                         grad_output.dim(2)})
                 : grad_output;
  require(g.rank() == 4 && g.dim(0) == batch && g.dim(1) == n_filters_ &&
              g.dim(2) == on && g.dim(3) == om,
          ErrorCode::InvalidArgument, "conv2d backward shape mismatch");

  std::fill(grad_filters_.values.begin(), grad_filters_.values.end(), 0.0);
  std::fill(grad_bias_.values.begin(), grad_bias_.values.end(), 0.0);
  Tensor dx = Tensor::zeros(input_.shape);

  const double* img = input_.data();
  const double* flt = filters.data();
  const double* pre = pre_act_.data();
  for (int64_t b = 0; b < batch; ++b) {
    const double* ib = img + b * n * m;
    double* dib = dx.data() + b * n * m;
    for (int64_t l = 0; l < n_filters_; ++l) {
      const double* fl = flt + l * 4;
      double* dfl = grad_filters_.data() + l * 4;
      const int64_t plane = (b * n_filters_ + l) * on * om;
      for (int64_t p = 0; p < on; ++p) {
        for (int64_t q = 0; q < om; ++q) {
          const double dpre = g.values[plane + p * om + q] *
                              activation_grad(activation_, pre[plane + p * om + q]);
          if (dpre == 0.0) continue;
          grad_bias_.values[l] += dpre;
          for (int64_t fm = 0; fm < 2; ++fm) {
            for (int64_t fn = 0; fn < 2; ++fn) {
              dfl[fm * 2 + fn] += dpre * ib[(p + fm) * m + (q + fn)];
              dib[(p + fm) * m + (q + fn)] += dpre * fl[fm * 2 + fn];
            }
          }
        }
      }
    }
  }
  return dx;
}

void Conv2dLayer::collect_params(const std::string& prefix,
                                 std::vector<ParamRef>& out) {
  out.push_back({prefix + ".filters", &filters, &grad_filters_, true});
  out.push_back({prefix + ".bias", &bias, &grad_bias_, true});
}

// ---- DropoutLayer ---------------------------------------------------------

DropoutLayer::DropoutLayer(double rate) : rate_(rate) {
  require(rate >= 0.0 && rate < 1.0, ErrorCode::InvalidArgument,
          "dropout rate must lie in [0, 1)");
}

Tensor DropoutLayer::forward(const Tensor& input, ForwardCtx& ctx) {
  if (ctx.mode == Mode::Off || rate_ == 0.0) {
    active_ = false;
    return input;
  }
  require(ctx.rng != nullptr, ErrorCode::Internal,
          "dropout requires an rng in train/mc modes");
  active_ = true;
  const size_t n = input.values.size();
  const bool reuse = frozen_ && mask_.size() == n;
  if (!reuse) {
    mask_.resize(n);
    const double keep_scale = 1.0 / (1.0 - rate_);
    for (size_t i = 0; i < n; ++i) {
      mask_[i] = ctx.rng->uniform() < rate_ ? 0.0 : keep_scale;
    }
  }
  Tensor out = input;
  for (size_t i = 0; i < n; ++i) out.values[i] *= mask_[i];
  return out;
}

Tensor DropoutLayer::backward(const Tensor& grad_output) {
  if (!active_) return grad_output;
  require(grad_output.values.size() == mask_.size(), ErrorCode::InvalidArgument,
          "dropout backward shape mismatch");
  Tensor out = grad_output;
  for (size_t i = 0; i < mask_.size(); ++i) out.values[i] *= mask_[i];
  return out;
}

void DropoutLayer::collect_params(const std::string&, std::vector<ParamRef>&) {}

// ---- BatchNormLayer -------------------------------------------------------

BatchNormLayer::BatchNormLayer(int64_t dim, double epsilon, double momentum)
    : gamma(Tensor::zeros({dim})),
      beta(Tensor::zeros({dim})),
      running_mean(Tensor::zeros({dim})),
      running_var(Tensor::zeros({dim})),
      dim_(dim),
      epsilon_(epsilon),
      momentum_(momentum),
      grad_gamma_(Tensor::zeros({dim})),
      grad_beta_(Tensor::zeros({dim})) {
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
  require(momentum > 0.0 && momentum < 1.0, ErrorCode::InvalidArgument,
          "momentum must lie in (0, 1)");
  std::fill(gamma.values.begin(), gamma.values.end(), 1.0);
  std::fill(running_var.values.begin(), running_var.values.end(), 1.0);
}

Tensor BatchNormLayer::forward(const Tensor& input, ForwardCtx& ctx) {
  require(input.rank() == 2 && input.dim(1) == dim_, ErrorCode::InvalidArgument,
          "batchnorm expects a [B, " + std::to_string(dim_) + "] tensor");
  const int64_t batch = input.dim(0);
  Tensor out = Tensor::zeros({batch, dim_});

  if (ctx.mode == Mode::Train) {
    require(batch >= 2, ErrorCode::InvalidArgument,
            "batchnorm training requires a batch of at least 2");
    trained_forward_ = true;
    batch_ = batch;
    centered_ = Tensor::zeros({batch, dim_});
    normalized_ = Tensor::zeros({batch, dim_});
    inv_std_.assign(static_cast<size_t>(dim_), 0.0);
    for (int64_t j = 0; j < dim_; ++j) {
      double mean = 0.0;
      for (int64_t b = 0; b < batch; ++b) mean += input.values[b * dim_ + j];
      mean /= static_cast<double>(batch);
      double var = 0.0;  // biased, as normalization uses the batch itself
      for (int64_t b = 0; b < batch; ++b) {
        const double c = input.values[b * dim_ + j] - mean;
        centered_.values[b * dim_ + j] = c;
        var += c * c;
      }
      var /= static_cast<double>(batch);
      const double inv = 1.0 / std::sqrt(var + epsilon_);
      inv_std_[static_cast<size_t>(j)] = inv;
      for (int64_t b = 0; b < batch; ++b) {
        const double xn = centered_.values[b * dim_ + j] * inv;
        normalized_.values[b * dim_ + j] = xn;
        out.values[b * dim_ + j] = gamma.values[j] * xn + beta.values[j];
      }
      running_mean.values[j] = momentum_ * running_mean.values[j] + (1.0 - momentum_) * mean;
      running_var.values[j] = momentum_ * running_var.values[j] + (1.0 - momentum_) * var;
    }
    return out;
  }

  trained_forward_ = false;
  for (int64_t j = 0; j < dim_; ++j) {
    const double inv = 1.0 / std::sqrt(running_var.values[j] + epsilon_);
    const double rm = running_mean.values[j];
    for (int64_t b = 0; b < batch; ++b) {
      out.values[b * dim_ + j] =
          gamma.values[j] * (input.values[b * dim_ + j] - rm) * inv + beta.values[j];
    }
  }
  return out;
}

Tensor BatchNormLayer::backward(const Tensor& grad_output) {
  require(trained_forward_, ErrorCode::Internal,
          "batchnorm backward requires a training-mode forward");
  const int64_t batch = batch_;
  require(grad_output.rank() == 2 && grad_output.dim(0) == batch &&
              grad_output.dim(1) == dim_,
          ErrorCode::InvalidArgument, "batchnorm backward shape mismatch");

  Tensor dx = Tensor::zeros({batch, dim_});
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (int64_t j = 0; j < dim_; ++j) {
    double dgamma = 0.0, dbeta = 0.0;
    for (int64_t b = 0; b < batch; ++b) {
      const double g = grad_output.values[b * dim_ + j];
      dgamma += g * normalized_.values[b * dim_ + j];
      dbeta += g;
    }
    grad_gamma_.values[j] = dgamma;
    grad_beta_.values[j] = dbeta;

    // dxhat = g * gamma; fold the mean/variance paths in the usual closed form:
    // dx = inv_std/B * (B*dxhat - sum(dxhat) - xhat * sum(dxhat*xhat))
    const double inv = inv_std_[static_cast<size_t>(j)];
    double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
    for (int64_t b = 0; b < batch; ++b) {
      const double dxhat = grad_output.values[b * dim_ + j] * gamma.values[j];
      sum_dxhat += dxhat;
      sum_dxhat_xhat += dxhat * normalized_.values[b * dim_ + j];
    }
    for (int64_t b = 0; b < batch; ++b) {
      const double dxhat = grad_output.values[b * dim_ + j] * gamma.values[j];
      const double xhat = normalized_.values[b * dim_ + j];
      dx.values[b * dim_ + j] =
          inv * inv_b *
          (static_cast<double>(batch) * dxhat - sum_dxhat - xhat * sum_dxhat_xhat);
    }
  }
  return dx;
}

void BatchNormLayer::collect_params(const std::string& prefix,
                                    std::vector<ParamRef>& out) {
  out.push_back({prefix + ".gamma", &gamma, &grad_gamma_, true});
  out.push_back({prefix + ".beta", &beta, &grad_beta_, true});
  out.push_back({prefix + ".running_mean", &running_mean, nullptr, false});
  out.push_back({prefix + ".running_var", &running_var, nullptr, false});
}

// ---- FlattenLayer ----------------------------------------------------------

Tensor FlattenLayer::forward(const Tensor& input, ForwardCtx&) {
  require(input.rank() >= 2, ErrorCode::InvalidArgument,
          "flatten layer expects a batched tensor");
  input_shape_ = input.shape;
  return input.reshaped({input.dim(0), input.size() / input.dim(0)});
}

Tensor FlattenLayer::backward(const Tensor& grad_output) {
  return grad_output.reshaped(input_shape_);
}

// ---- loss -------------------------------------------------------------------

double quadratic_loss(const Tensor& pred, const Tensor& obs) {
  require(pred.size() == obs.size(), ErrorCode::InvalidArgument,
          "quadratic_loss length mismatch");
  require(pred.size() > 0, ErrorCode::InvalidArgument, "quadratic_loss on empty input");
  double sum = 0.0;
  for (int64_t i = 0; i < pred.size(); ++i) {
    const double r = pred.values[i] - obs.values[i];
    sum += r * r;
  }
  return sum / static_cast<double>(pred.size());
}

Tensor quadratic_loss_grad(const Tensor& pred, const Tensor& obs) {
  require(pred.size() == obs.size(), ErrorCode::InvalidArgument,
          "quadratic_loss length mismatch");
  Tensor g = Tensor::zeros(pred.shape);
  const double scale = 2.0 / static_cast<double>(pred.size());
  for (int64_t i = 0; i < pred.size(); ++i) {
    g.values[i] = scale * (pred.values[i] - obs.values[i]);
  }
  return g;
}

}  // namespace sdcnn::nn
