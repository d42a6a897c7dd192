#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <new>
#include <vector>

#include "sdcnn/error.hpp"

namespace sdcnn {

/// Allocator with a fixed 64-byte alignment. Vectorized kernels pick their
/// code path from the buffer address; a constant alignment keeps repeated
/// evaluations on identical inputs bit-identical.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlignment));
  }
  void deallocate(T* p, size_t) noexcept { ::operator delete(p, kAlignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
  template <typename U>
  bool operator!=(const AlignedAllocator<U>&) const noexcept {
    return false;
  }
};

using DoubleVec = std::vector<double, AlignedAllocator<double>>;

inline bool operator==(const DoubleVec& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}
inline bool operator==(const std::vector<double>& a, const DoubleVec& b) {
  return b == a;
}
inline bool operator!=(const DoubleVec& a, const std::vector<double>& b) {
  return !(a == b);
}
inline bool operator!=(const std::vector<double>& a, const DoubleVec& b) {
  return !(b == a);
}

/// Dense row-major array of 64-bit floats with a dynamic shape.
/// This is the only value type the network layers exchange.
struct Tensor {
  std::vector<int64_t> shape;
  DoubleVec values;

  Tensor() = default;

  static Tensor zeros(std::vector<int64_t> shape);
  static Tensor of(std::vector<int64_t> shape, DoubleVec values);

  int64_t size() const noexcept { return static_cast<int64_t>(values.size()); }
  int rank() const noexcept { return static_cast<int>(shape.size()); }
  int64_t dim(int i) const { return shape.at(static_cast<size_t>(i)); }

  double* data() noexcept { return values.data(); }
  const double* data() const noexcept { return values.data(); }

  /// Same storage, new shape (sizes must agree).
  Tensor reshaped(std::vector<int64_t> new_shape) const;

  bool all_finite() const noexcept;
};

int64_t shape_product(const std::vector<int64_t>& shape);

/// Row-major flattening to a rank-1 tensor.
Tensor flatten(const Tensor& t);

/// Concatenation of rank-1 tensors, order preserved.
Tensor concat(const std::vector<Tensor>& parts);

/// Numerically stable sum: recursive pairwise split, independent of
/// accumulation hardware and safe for the tolerances the score oracles use.
double pairwise_sum(const double* x, int64_t n);
inline double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(x.data(), static_cast<int64_t>(x.size()));
}
inline double pairwise_sum(const DoubleVec& x) {
  return pairwise_sum(x.data(), static_cast<int64_t>(x.size()));
}

}  // namespace sdcnn
