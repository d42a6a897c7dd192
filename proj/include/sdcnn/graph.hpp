#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sdcnn/layers.hpp"

namespace sdcnn::nn {

enum class InputKind {
  Coords,            // [B, 2 + n_covariates]
  CoordsBasisVector, // [B, 2 + n_covariates + total basis size]
  BasisImage,        // [B, rows, cols] of one resolution
};

/// Columnar batch of model inputs. Only the fields a graph's branches name
/// need to be populated.
struct BatchInputs {
  Tensor coords;                    // [B, 2+c]
  Tensor coords_basis;              // [B, 2+c+K]
  std::vector<Tensor> basis_images; // one [B, n_k, m_k] tensor per resolution

  int64_t batch_size() const;
};

struct Branch {
  InputKind input = InputKind::Coords;
  int resolution_index = -1;  // for BasisImage branches
  std::vector<std::unique_ptr<Layer>> layers;
};

struct ParamShape {
  std::string name;
  std::vector<int64_t> shape;
};

/// Branches evaluated independently, their rank-2 outputs concatenated along
/// the feature axis, then the head layers applied. A single branch with an
/// empty head degenerates to a plain sequential network.
class NetworkGraph {
public:
  std::vector<Branch> branches;
  std::vector<std::unique_ptr<Layer>> head;

  /// Forward over a batch; returns predictions [B].
  Tensor forward(const BatchInputs& inputs, ForwardCtx& ctx);

  /// Reverse pass for the last forward batch, given dLoss/dPred of shape [B].
  void backward(const Tensor& grad_pred);

  std::vector<ParamRef> params();
  std::vector<ParamShape> parameter_manifest();

  /// Flat copy of every parameter and state value, and its inverse.
  std::vector<double> snapshot();
  void restore(const std::vector<double>& snap);

  /// Dropout control across all sites (test hooks).
  void freeze_dropout_masks(bool frozen);

private:
  std::vector<int64_t> branch_widths_;
};

}  // namespace sdcnn::nn
