#include "sdcnn/graph.hpp"

#include <algorithm>

namespace sdcnn::nn {

namespace {

const Tensor& branch_input(const BatchInputs& inputs, const Branch& branch) {
  switch (branch.input) {
    case InputKind::Coords:
      return inputs.coords;
    case InputKind::CoordsBasisVector:
      return inputs.coords_basis;
    case InputKind::BasisImage:
      require(branch.resolution_index >= 0 &&
                  branch.resolution_index <
                      static_cast<int>(inputs.basis_images.size()),
              ErrorCode::InvalidArgument,
              "missing basis image input for branch");
      return inputs.basis_images[static_cast<size_t>(branch.resolution_index)];
  }
  fail(ErrorCode::Internal, "unreachable branch input kind");
}

std::string branch_name(const Branch& branch) {
  switch (branch.input) {
    case InputKind::Coords: return "coords";
    case InputKind::CoordsBasisVector: return "input";
    case InputKind::BasisImage:
      return "res" + std::to_string(branch.resolution_index + 1);
  }
  return "?";
}

}  // namespace

int64_t BatchInputs::batch_size() const {
  if (coords.rank() >= 1 && coords.size() > 0) return coords.dim(0);
  if (coords_basis.rank() >= 1 && coords_basis.size() > 0) return coords_basis.dim(0);
  if (!basis_images.empty()) return basis_images.front().dim(0);
  return 0;
}

Tensor NetworkGraph::forward(const BatchInputs& inputs, ForwardCtx& ctx) {
  require(!branches.empty(), ErrorCode::InvalidArgument, "graph has no branches");
  const int64_t batch = inputs.batch_size();
  require(batch > 0, ErrorCode::InvalidArgument, "empty batch");

  branch_widths_.clear();
  std::vector<Tensor> outputs;
  outputs.reserve(branches.size());
  int64_t total_width = 0;
  for (Branch& branch : branches) {
    Tensor h = branch_input(inputs, branch);
    for (auto& layer : branch.layers) h = layer->forward(h, ctx);
    require(h.rank() == 2 && h.dim(0) == batch, ErrorCode::Internal,
            "branch output must be [B, width]");
    branch_widths_.push_back(h.dim(1));
    total_width += h.dim(1);
    outputs.push_back(std::move(h));
  }

  Tensor h = Tensor::zeros({batch, total_width});
  for (int64_t b = 0; b < batch; ++b) {
    int64_t at = 0;
    for (const Tensor& part : outputs) {
      const int64_t w = part.dim(1);
      std::copy(part.values.begin() + b * w, part.values.begin() + (b + 1) * w,
                h.values.begin() + b * total_width + at);
      at += w;
    }
  }

  for (auto& layer : head) h = layer->forward(h, ctx);
  require(h.rank() == 2 && h.dim(1) == 1, ErrorCode::Internal,
          "graph head must end in a single output unit");
  return h.reshaped({batch});
}

void NetworkGraph::backward(const Tensor& grad_pred) {
  require(grad_pred.rank() == 1, ErrorCode::InvalidArgument,
          "graph backward expects a [B] gradient");
  const int64_t batch = grad_pred.size();
  Tensor g = grad_pred.reshaped({batch, 1});
  for (auto it = head.rbegin(); it != head.rend(); ++it) g = (*it)->backward(g);

  int64_t total_width = 0;
  for (int64_t w : branch_widths_) total_width += w;
  require(g.rank() == 2 && g.dim(1) == total_width, ErrorCode::Internal,
          "concat gradient width mismatch");

  int64_t at = 0;
  for (size_t bi = 0; bi < branches.size(); ++bi) {
    const int64_t w = branch_widths_[bi];
    Tensor gb = Tensor::zeros({batch, w});
    for (int64_t b = 0; b < batch; ++b) {
      std::copy(g.values.begin() + b * total_width + at,
                g.values.begin() + b * total_width + at + w,
                gb.values.begin() + b * w);
    }
    at += w;
    for (auto it = branches[bi].layers.rbegin(); it != branches[bi].layers.rend();
         ++it) {
      gb = (*it)->backward(gb);
    }
  }
}

std::vector<ParamRef> NetworkGraph::params() {
  std::vector<ParamRef> out;
  for (Branch& branch : branches) {
    const std::string name = "branch_" + branch_name(branch);
    for (size_t i = 0; i < branch.layers.size(); ++i) {
      branch.layers[i]->collect_params(
          name + "/" + std::to_string(i) + "." + branch.layers[i]->kind(), out);
    }
  }
  for (size_t i = 0; i < head.size(); ++i) {
    head[i]->collect_params("head/" + std::to_string(i) + "." + head[i]->kind(),
                            out);
  }
  return out;
}

std::vector<ParamShape> NetworkGraph::parameter_manifest() {
  std::vector<ParamShape> out;
  for (const ParamRef& p : params()) out.push_back({p.name, p.value->shape});
  return out;
}

std::vector<double> NetworkGraph::snapshot() {
  std::vector<double> snap;
  for (const ParamRef& p : params()) {
    snap.insert(snap.end(), p.value->values.begin(), p.value->values.end());
  }
  return snap;
}

void NetworkGraph::restore(const std::vector<double>& snap) {
  size_t at = 0;
  for (const ParamRef& p : params()) {
    require(at + p.value->values.size() <= snap.size(), ErrorCode::InvalidArgument,
            "snapshot size mismatch");
    std::copy(snap.begin() + static_cast<int64_t>(at),
              snap.begin() + static_cast<int64_t>(at + p.value->values.size()),
              p.value->values.begin());
    at += p.value->values.size();
  }
  require(at == snap.size(), ErrorCode::InvalidArgument, "snapshot size mismatch");
}

void NetworkGraph::freeze_dropout_masks(bool frozen) {
  auto visit = [&](std::vector<std::unique_ptr<Layer>>& layers) {
    for (auto& layer : layers) {
      if (auto* d = dynamic_cast<DropoutLayer*>(layer.get())) d->freeze_mask(frozen);
    }
  };
  for (Branch& branch : branches) visit(branch.layers);
  visit(head);
}

}  // namespace sdcnn::nn
