#include "sdcnn/models.hpp"

#include <cmath>
#include <numeric>

#include "sdcnn/train.hpp"

namespace sdcnn::models {

using nn::Activation;
using nn::BatchNormLayer;
using nn::Conv2dLayer;
using nn::DenseLayer;
using nn::DropoutLayer;
using nn::FlattenLayer;

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::BaselineDnn: return "baseline_dnn";
    case ModelKind::DeepKriging: return "deepkriging";
    case ModelKind::Sdcnn: return "sdcnn";
  }
  return "?";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "baseline_dnn") return ModelKind::BaselineDnn;
  if (name == "deepkriging") return ModelKind::DeepKriging;
  if (name == "sdcnn") return ModelKind::Sdcnn;
  fail(ErrorCode::Parse, "unknown model kind: " + name);
}

void validate(const ModelSpec& spec, const std::vector<basis::Resolution>& resolutions) {
  require(spec.hidden_width >= 1, ErrorCode::InvalidArgument, "hidden_width must be >= 1");
  require(spec.n_filters >= 1, ErrorCode::InvalidArgument, "n_filters must be >= 1");
  require(spec.dropout_rate >= 0.0 && spec.dropout_rate < 1.0,
          ErrorCode::InvalidArgument, "dropout_rate must lie in [0, 1)");
  require(spec.n_covariates >= 0, ErrorCode::InvalidArgument,
          "n_covariates must be nonnegative");
  if (spec.kind != ModelKind::BaselineDnn) {
    require(!resolutions.empty(), ErrorCode::InvalidArgument,
            std::string(model_kind_name(spec.kind)) +
                " requires at least one basis resolution");
  }
  if (spec.kind == ModelKind::Sdcnn) {
    for (const auto& res : resolutions) {
      require(res.rows >= 2 && res.cols >= 2, ErrorCode::InvalidArgument,
              "sdcnn basis images must be at least 2x2");
    }
  }
}

namespace {

// He-style uniform fan-in init for ReLU layers, Glorot for the identity
// output; biases zero. Entries drawn row-major so builds are seed-stable.
void init_dense(DenseLayer& layer, Rng& rng) {
  const double fan_in = static_cast<double>(layer.in_dim());
  const double fan_out = static_cast<double>(layer.out_dim());
  const double limit = layer.activation() == Activation::ReLU
                           ? std::sqrt(6.0 / fan_in)
                           : std::sqrt(6.0 / (fan_in + fan_out));
  for (double& w : layer.weights.values) w = rng.uniform(-limit, limit);
}

void init_conv(Conv2dLayer& layer, Rng& rng) {
  const double limit = std::sqrt(6.0 / 4.0);  // fan-in of a 2x2 single-channel filter
  for (double& w : layer.filters.values) w = rng.uniform(-limit, limit);
}

// dropout -> dense(ReLU) -> batchnorm
void push_hidden_block(std::vector<std::unique_ptr<nn::Layer>>& layers,
                       int64_t in_dim, int64_t out_dim, double rate, Rng& rng) {
  layers.push_back(std::make_unique<DropoutLayer>(rate));
  auto dense = std::make_unique<DenseLayer>(in_dim, out_dim, Activation::ReLU);
  init_dense(*dense, rng);
  layers.push_back(std::move(dense));
  layers.push_back(std::make_unique<BatchNormLayer>(out_dim));
}

void push_output_block(std::vector<std::unique_ptr<nn::Layer>>& layers,
                       int64_t in_dim, double rate, Rng& rng) {
  layers.push_back(std::make_unique<DropoutLayer>(rate));
  auto dense = std::make_unique<DenseLayer>(in_dim, 1, Activation::Identity);
  init_dense(*dense, rng);
  layers.push_back(std::move(dense));
}

}  // namespace

nn::NetworkGraph build_baseline_dnn(const ModelSpec& spec, Rng& init_rng) {
  validate(spec, {});
  const int64_t width = spec.hidden_width;
  const int64_t in = 2 + spec.n_covariates;

  nn::NetworkGraph graph;
  nn::Branch branch;
  branch.input = nn::InputKind::Coords;
  push_hidden_block(branch.layers, in, width, spec.dropout_rate, init_rng);
  for (int i = 0; i < 3; ++i) {
    push_hidden_block(branch.layers, width, width, spec.dropout_rate, init_rng);
  }
  graph.branches.push_back(std::move(branch));
  push_output_block(graph.head, width, spec.dropout_rate, init_rng);
  return graph;
}

nn::NetworkGraph build_deepkriging(const ModelSpec& spec,
                                   const std::vector<basis::Resolution>& resolutions,
                                   Rng& init_rng) {
  validate(spec, resolutions);
  const int64_t width = spec.hidden_width;
  const int64_t in = 2 + spec.n_covariates + basis::total_basis_size(resolutions);

  nn::NetworkGraph graph;
  nn::Branch branch;
  branch.input = nn::InputKind::CoordsBasisVector;
  push_hidden_block(branch.layers, in, width, spec.dropout_rate, init_rng);
  for (int i = 0; i < 2; ++i) {
    push_hidden_block(branch.layers, width, width, spec.dropout_rate, init_rng);
  }
  graph.branches.push_back(std::move(branch));
  push_output_block(graph.head, width, spec.dropout_rate, init_rng);
  return graph;
}

nn::NetworkGraph build_sdcnn(const ModelSpec& spec,
                             const std::vector<basis::Resolution>& resolutions,
                             Rng& init_rng) {
  validate(spec, resolutions);
  const int64_t width = spec.hidden_width;

  nn::NetworkGraph graph;
  for (size_t k = 0; k < resolutions.size(); ++k) {
    const auto& res = resolutions[k];
    nn::Branch branch;
    branch.input = nn::InputKind::BasisImage;
    branch.resolution_index = static_cast<int>(k);

    auto conv = std::make_unique<Conv2dLayer>(spec.n_filters);
    init_conv(*conv, init_rng);
    branch.layers.push_back(std::move(conv));
    branch.layers.push_back(std::make_unique<FlattenLayer>());

    const int64_t flat = static_cast<int64_t>(spec.n_filters) * (res.rows - 1) *
                         (res.cols - 1);
    push_hidden_block(branch.layers, flat, width, spec.dropout_rate, init_rng);
    push_hidden_block(branch.layers, width, width, spec.dropout_rate, init_rng);
    push_hidden_block(branch.layers, width, width, spec.dropout_rate, init_rng);
    graph.branches.push_back(std::move(branch));
  }

  nn::Branch coords;
  coords.input = nn::InputKind::Coords;
  push_hidden_block(coords.layers, 2 + spec.n_covariates, width, spec.dropout_rate,
                    init_rng);
  push_hidden_block(coords.layers, width, width, spec.dropout_rate, init_rng);
  push_hidden_block(coords.layers, width, width, spec.dropout_rate, init_rng);
  graph.branches.push_back(std::move(coords));

  const int64_t concat_width =
      static_cast<int64_t>(resolutions.size() + 1) * width;
  push_output_block(graph.head, concat_width, spec.dropout_rate, init_rng);
  return graph;
}

nn::NetworkGraph build_model(const ModelSpec& spec,
                             const std::vector<basis::Resolution>& resolutions,
                             Rng& init_rng) {
  switch (spec.kind) {
    case ModelKind::BaselineDnn: return build_baseline_dnn(spec, init_rng);
    case ModelKind::DeepKriging: return build_deepkriging(spec, resolutions, init_rng);
    case ModelKind::Sdcnn: return build_sdcnn(spec, resolutions, init_rng);
  }
  fail(ErrorCode::Internal, "unreachable model kind");
}

nn::BatchInputs assemble_inputs(ModelKind kind,
                                const std::vector<basis::Location>& scaled_locations,
                                const std::vector<basis::Resolution>& resolutions,
                                const basis::KernelSpec& kernel,
                                const std::vector<std::vector<double>>& covariates) {
  const int64_t n = static_cast<int64_t>(scaled_locations.size());
  require(n > 0, ErrorCode::InvalidArgument, "no locations to assemble");
  const int64_t n_cov =
      covariates.empty() ? 0 : static_cast<int64_t>(covariates.front().size());
  if (!covariates.empty()) {
    require(static_cast<int64_t>(covariates.size()) == n, ErrorCode::InvalidArgument,
            "covariate rows do not match locations");
  }

  nn::BatchInputs out;
  auto fill_coords = [&](Tensor& t) {
    t = Tensor::zeros({n, 2 + n_cov});
    for (int64_t i = 0; i < n; ++i) {
      t.values[i * (2 + n_cov)] = scaled_locations[static_cast<size_t>(i)].x1;
      t.values[i * (2 + n_cov) + 1] = scaled_locations[static_cast<size_t>(i)].x2;
      for (int64_t c = 0; c < n_cov; ++c) {
        t.values[i * (2 + n_cov) + 2 + c] = covariates[static_cast<size_t>(i)][c];
      }
    }
  };

  if (kind == ModelKind::BaselineDnn) {
    fill_coords(out.coords);
    return out;
  }

  require(!resolutions.empty(), ErrorCode::InvalidArgument,
          "basis resolutions required for this model kind");

  if (kind == ModelKind::DeepKriging) {
    const int64_t k_total = basis::total_basis_size(resolutions);
    const int64_t row_width = 2 + n_cov + k_total;
    out.coords_basis = Tensor::zeros({n, row_width});
    for (int64_t i = 0; i < n; ++i) {
      double* row = out.coords_basis.data() + i * row_width;
      row[0] = scaled_locations[static_cast<size_t>(i)].x1;
      row[1] = scaled_locations[static_cast<size_t>(i)].x2;
      for (int64_t c = 0; c < n_cov; ++c) {
        row[2 + c] = covariates[static_cast<size_t>(i)][c];
      }
      const std::vector<double> vec = basis::evaluate_basis_vector(
          scaled_locations[static_cast<size_t>(i)], resolutions, kernel);
      std::copy(vec.begin(), vec.end(), row + 2 + n_cov);
    }
    return out;
  }

  // sdcnn
  fill_coords(out.coords);
  for (const auto& res : resolutions) {
    Tensor stack = Tensor::zeros({n, res.rows, res.cols});
    for (int64_t i = 0; i < n; ++i) {
      basis::BasisImage img = basis::evaluate_basis_image(
          scaled_locations[static_cast<size_t>(i)], res, kernel);
      std::copy(img.values.values.begin(), img.values.values.end(),
                stack.values.begin() + i * res.knot_count());
    }
    out.basis_images.push_back(std::move(stack));
  }
  return out;
}

nn::BatchInputs to_batch(ModelKind kind, const ModelInput& input,
                         const std::vector<basis::Resolution>& resolutions) {
  nn::BatchInputs out;
  const int64_t n_cov = static_cast<int64_t>(input.covariates.size());
  auto fill_coords = [&](Tensor& t) {
    t = Tensor::zeros({1, 2 + n_cov});
    t.values[0] = input.x1;
    t.values[1] = input.x2;
    std::copy(input.covariates.begin(), input.covariates.end(),
              t.values.begin() + 2);
  };

  switch (kind) {
    case ModelKind::BaselineDnn:
      fill_coords(out.coords);
      break;
    case ModelKind::DeepKriging: {
      require(!input.basis_vector.empty(), ErrorCode::InvalidArgument,
              "deepkriging input requires a basis vector");
      const int64_t width = 2 + n_cov + static_cast<int64_t>(input.basis_vector.size());
      out.coords_basis = Tensor::zeros({1, width});
      out.coords_basis.values[0] = input.x1;
      out.coords_basis.values[1] = input.x2;
      std::copy(input.covariates.begin(), input.covariates.end(),
                out.coords_basis.values.begin() + 2);
      std::copy(input.basis_vector.begin(), input.basis_vector.end(),
                out.coords_basis.values.begin() + 2 + n_cov);
      break;
    }
    case ModelKind::Sdcnn: {
      require(input.basis_images.size() == resolutions.size(),
              ErrorCode::InvalidArgument,
              "sdcnn input requires one basis image per resolution");
      fill_coords(out.coords);
      for (const auto& img : input.basis_images) {
        Tensor t = img.values.reshaped({1, img.values.dim(0), img.values.dim(1)});
        out.basis_images.push_back(std::move(t));
      }
      break;
    }
  }
  return out;
}

double forward(nn::NetworkGraph& graph, ModelKind kind, const ModelInput& input,
               const std::vector<basis::Resolution>& resolutions) {
  nn::BatchInputs batch = to_batch(kind, input, resolutions);
  nn::ForwardCtx ctx{nn::Mode::Off, nullptr};
  return graph.forward(batch, ctx).values[0];
}

score::PredictiveSamples mc_predict(nn::NetworkGraph& graph,
                                    const nn::BatchInputs& inputs,
                                    int64_t n_samples, Rng& rng,
                                    int64_t batch_size) {
  require(n_samples >= 1, ErrorCode::InvalidArgument, "n_samples must be >= 1");
  const int64_t n = inputs.batch_size();
  score::PredictiveSamples out;
  out.n_locations = n;
  out.n_samples = n_samples;
  out.values.assign(static_cast<size_t>(n * n_samples), 0.0);
  out.location_ids.resize(static_cast<size_t>(n));
  std::iota(out.location_ids.begin(), out.location_ids.end(), 0);

  for (int64_t s = 0; s < n_samples; ++s) {
    nn::ForwardCtx ctx{nn::Mode::McPredict, &rng};
    for (int64_t at = 0; at < n; at += batch_size) {
      const int64_t take = std::min(batch_size, n - at);
      std::vector<int64_t> rows(static_cast<size_t>(take));
      std::iota(rows.begin(), rows.end(), at);
      Tensor pred = graph.forward(nn::gather(inputs, rows), ctx);
      for (int64_t i = 0; i < take; ++i) {
        out.values[static_cast<size_t>((at + i) * n_samples + s)] =
            pred.values[static_cast<size_t>(i)];
      }
    }
  }
  return out;
}

std::vector<double> predict_mean(nn::NetworkGraph& graph,
                                 const nn::BatchInputs& inputs,
                                 int64_t batch_size) {
  const int64_t n = inputs.batch_size();
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  nn::ForwardCtx ctx{nn::Mode::Off, nullptr};
  for (int64_t at = 0; at < n; at += batch_size) {
    const int64_t take = std::min(batch_size, n - at);
    std::vector<int64_t> rows(static_cast<size_t>(take));
    std::iota(rows.begin(), rows.end(), at);
    Tensor pred = graph.forward(nn::gather(inputs, rows), ctx);
    for (int64_t i = 0; i < take; ++i) {
      out[static_cast<size_t>(at + i)] = pred.values[static_cast<size_t>(i)];
    }
  }
  return out;
}

}  // namespace sdcnn::models
