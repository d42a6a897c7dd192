#include "sdcnn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdcnn/rng.hpp"

namespace sdcnn::data {

AxisScale AxisScale::fit(const std::vector<double>& values) {
  require(!values.empty(), ErrorCode::InvalidArgument, "cannot fit scale on no data");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  require(*hi > *lo, ErrorCode::InvalidArgument,
          "constant axis: min-max scaling is undefined");
  return AxisScale{*lo, *hi};
}

std::vector<int64_t> Dataset::observed_indices() const {
  std::vector<int64_t> out;
  for (int64_t i = 0; i < size(); ++i) {
    if (std::isfinite(responses[static_cast<size_t>(i)])) out.push_back(i);
  }
  return out;
}

void Dataset::fit_scale() {
  std::vector<double> x1(locations.size()), x2(locations.size());
  for (size_t i = 0; i < locations.size(); ++i) {
    x1[i] = locations[i].x1;
    x2[i] = locations[i].x2;
  }
  scale_x1 = AxisScale::fit(x1);
  scale_x2 = AxisScale::fit(x2);
}

std::vector<basis::Location> GridSpec::points() const {
  require(n_x1 >= 2 && n_x2 >= 2, ErrorCode::InvalidArgument,
          "grid needs at least 2 points per axis");
  require(x1_min < x1_max && x2_min < x2_max, ErrorCode::InvalidArgument,
          "grid bounds are degenerate");
  std::vector<basis::Location> pts;
  pts.reserve(static_cast<size_t>(size()));
  const double d1 = (x1_max - x1_min) / static_cast<double>(n_x1 - 1);
  const double d2 = (x2_max - x2_min) / static_cast<double>(n_x2 - 1);
  for (int64_t j = 0; j < n_x2; ++j) {
    for (int64_t i = 0; i < n_x1; ++i) {
      pts.push_back(basis::Location{x1_min + static_cast<double>(i) * d1,
                                    x2_min + static_cast<double>(j) * d2});
    }
  }
  return pts;
}

double eggholder(double x1, double x2) {
  const double a = x2 + x1 / 2.0 + 47.0;
  const double b = x1 - (x2 + 47.0);
  return -(x2 + 47.0) * std::sin(std::sqrt(std::abs(a))) -
         x1 * std::sin(std::sqrt(std::abs(b)));
}

Dataset generate_eggholder_dataset(const GridSpec& grid) {
  Dataset out;
  out.locations = grid.points();
  out.responses.reserve(out.locations.size());
  for (const auto& loc : out.locations) {
    out.responses.push_back(eggholder(loc.x1, loc.x2));
  }
  out.fit_scale();
  return out;
}

std::vector<int64_t> FoldSplit::test_indices(int fold) const {
  std::vector<int64_t> out;
  for (size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(static_cast<int64_t>(i));
  }
  return out;
}

std::vector<int64_t> FoldSplit::train_indices(int fold) const {
  std::vector<int64_t> out;
  for (size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(static_cast<int64_t>(i));
  }
  return out;
}

FoldSplit kfold_split(int64_t n, int k, uint64_t seed) {
  require(k >= 2, ErrorCode::InvalidArgument, "k must be >= 2");
  require(n >= k, ErrorCode::InvalidArgument, "need at least k observations");
  std::vector<int64_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "kfold"));
  rng.shuffle(order);

  FoldSplit split;
  split.k = k;
  split.seed = seed;
  split.assignments.assign(static_cast<size_t>(n), -1);
  // contiguous chunks; the first n % k folds take one extra element
  const int64_t base = n / k;
  const int64_t extra = n % k;
  int64_t at = 0;
  for (int fold = 0; fold < k; ++fold) {
    const int64_t take = base + (fold < extra ? 1 : 0);
    for (int64_t i = 0; i < take; ++i) {
      split.assignments[static_cast<size_t>(order[static_cast<size_t>(at + i)])] = fold;
    }
    at += take;
  }
  return split;
}

HoldoutSplit rectangle_holdout(const Dataset& dataset, const RectangleHoldout& rect) {
  require(rect.x1_lo < rect.x1_hi && rect.x2_lo < rect.x2_hi,
          ErrorCode::InvalidArgument, "holdout rectangle is degenerate");
  HoldoutSplit split;
  for (int64_t i : dataset.observed_indices()) {
    const auto& loc = dataset.locations[static_cast<size_t>(i)];
    const bool inside = loc.x1 > rect.x1_lo && loc.x1 < rect.x1_hi &&
                        loc.x2 > rect.x2_lo && loc.x2 < rect.x2_hi;
    (inside ? split.test_indices : split.train_indices).push_back(i);
  }
  require(!split.test_indices.empty(), ErrorCode::InvalidArgument,
          "holdout rectangle contains no observations");
  require(!split.train_indices.empty(), ErrorCode::InvalidArgument,
          "holdout rectangle leaves no training observations");
  return split;
}

}  // namespace sdcnn::data
