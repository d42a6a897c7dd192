#pragma once

#include <string>
#include <vector>

#include "sdcnn/basis.hpp"
#include "sdcnn/graph.hpp"
#include "sdcnn/scoring.hpp"

namespace sdcnn::models {

enum class ModelKind { BaselineDnn, DeepKriging, Sdcnn };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::Sdcnn;
  int64_t hidden_width = 100;  // N_h
  int n_filters = 128;         // n_F
  double dropout_rate = 0.1;
  int n_covariates = 0;  // extra inputs alongside the scaled coordinates
};

void validate(const ModelSpec& spec, const std::vector<basis::Resolution>& resolutions);

/// One location's inputs; the fields the model kind demands must be present.
struct ModelInput {
  double x1 = 0.0, x2 = 0.0;  // min-max-scaled coordinates
  std::vector<double> covariates;
  std::vector<double> basis_vector;          // deepkriging
  std::vector<basis::BasisImage> basis_images;  // sdcnn
};

/// Coords -> dropout/dense(ReLU)/batchnorm stack per the three-hidden-layer
/// baseline, identity output.
nn::NetworkGraph build_baseline_dnn(const ModelSpec& spec, Rng& init_rng);

/// Coords plus the flat basis vector through an input layer and two hidden
/// layers, identity output.
nn::NetworkGraph build_deepkriging(const ModelSpec& spec,
                                   const std::vector<basis::Resolution>& resolutions,
                                   Rng& init_rng);

/// One conv branch per resolution (2x2 filters, ReLU, flatten, three hidden
/// dense layers) plus a coords branch, concatenated into the output layer.
nn::NetworkGraph build_sdcnn(const ModelSpec& spec,
                             const std::vector<basis::Resolution>& resolutions,
                             Rng& init_rng);

nn::NetworkGraph build_model(const ModelSpec& spec,
                             const std::vector<basis::Resolution>& resolutions,
                             Rng& init_rng);

/// Columnar inputs for a list of scaled locations (basis evaluated here).
nn::BatchInputs assemble_inputs(ModelKind kind,
                                const std::vector<basis::Location>& scaled_locations,
                                const std::vector<basis::Resolution>& resolutions,
                                const basis::KernelSpec& kernel,
                                const std::vector<std::vector<double>>& covariates = {});

nn::BatchInputs to_batch(ModelKind kind, const ModelInput& input,
                         const std::vector<basis::Resolution>& resolutions);

/// Deterministic scalar prediction (dropout off, running statistics).
double forward(nn::NetworkGraph& graph, ModelKind kind, const ModelInput& input,
               const std::vector<basis::Resolution>& resolutions);

/// S stochastic forward passes per location with fresh dropout masks;
/// batch normalization stays in inference mode.
score::PredictiveSamples mc_predict(nn::NetworkGraph& graph,
                                    const nn::BatchInputs& inputs,
                                    int64_t n_samples, Rng& rng,
                                    int64_t batch_size = 256);

/// Deterministic forward over a batch (dropout off).
std::vector<double> predict_mean(nn::NetworkGraph& graph,
                                 const nn::BatchInputs& inputs,
                                 int64_t batch_size = 256);

}  // namespace sdcnn::models
