#include "sdcnn/tensor.hpp"

#include <string>

namespace sdcnn {

int64_t shape_product(const std::vector<int64_t>& shape) {
  int64_t p = 1;
  for (int64_t d : shape) {
    require(d > 0, ErrorCode::InvalidArgument, "tensor dimensions must be positive");
    p *= d;
  }
  return p;
}

Tensor Tensor::zeros(std::vector<int64_t> shape) {
  Tensor t;
  int64_t n = shape_product(shape);
  t.shape = std::move(shape);
  t.values.assign(static_cast<size_t>(n), 0.0);
  return t;
}

Tensor Tensor::of(std::vector<int64_t> shape, DoubleVec values) {
  int64_t n = shape_product(shape);
  require(n == static_cast<int64_t>(values.size()), ErrorCode::InvalidArgument,
          "tensor shape does not match value count");
  Tensor t;
  t.shape = std::move(shape);
  t.values = std::move(values);
  return t;
}

Tensor Tensor::reshaped(std::vector<int64_t> new_shape) const {
  require(shape_product(new_shape) == size(), ErrorCode::InvalidArgument,
          "reshape changes element count");
  Tensor t;
  t.shape = std::move(new_shape);
  t.values = values;
  return t;
}

bool Tensor::all_finite() const noexcept {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor flatten(const Tensor& t) {
  return t.reshaped({t.size()});
}

Tensor concat(const std::vector<Tensor>& parts) {
  int64_t total = 0;
  for (const Tensor& p : parts) {
    require(p.rank() == 1, ErrorCode::InvalidArgument, "concat expects rank-1 tensors");
    total += p.size();
  }
  Tensor out = Tensor::zeros({total > 0 ? total : 1});
  if (total == 0) fail(ErrorCode::InvalidArgument, "concat of empty input");
  int64_t at = 0;
  for (const Tensor& p : parts) {
    std::copy(p.values.begin(), p.values.end(), out.values.begin() + at);
    at += p.size();
  }
  return out;
}

double pairwise_sum(const double* x, int64_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (int64_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  int64_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

}  // namespace sdcnn
