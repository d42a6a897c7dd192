#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdcnn/basis.hpp"

namespace sdcnn::data {

/// Affine min-max state for one axis; fitted on training data and reused
/// verbatim at prediction time.
struct AxisScale {
  double min = 0.0;
  double max = 1.0;

  static AxisScale fit(const std::vector<double>& values);
  double scale(double v) const { return (v - min) / (max - min); }
  double unscale(double u) const { return min + u * (max - min); }
};

/// Locations in raw coordinates plus responses; NaN responses mark
/// prediction-only rows.
struct Dataset {
  std::vector<basis::Location> locations;
  std::vector<double> responses;
  std::optional<AxisScale> scale_x1, scale_x2;  // full-data state, if fitted

  int64_t size() const { return static_cast<int64_t>(locations.size()); }
  std::vector<int64_t> observed_indices() const;
  void fit_scale();
};

struct GridSpec {
  int64_t n_x1 = 0, n_x2 = 0;
  double x1_min = 0.0, x1_max = 1.0;
  double x2_min = 0.0, x2_max = 1.0;

  int64_t size() const { return n_x1 * n_x2; }
  std::vector<basis::Location> points() const;  // row-major over (x2, x1)
};

/// The two-dimensional Eggholder surface, evaluated exactly as printed.
double eggholder(double x1, double x2);

/// Noise-free Eggholder responses over a uniform grid; the full-data min-max
/// state is fitted on the grid itself.
Dataset generate_eggholder_dataset(const GridSpec& grid);

struct FoldSplit {
  std::vector<int> assignments;  // fold id per observation index
  int k = 5;
  uint64_t seed = 0;

  std::vector<int64_t> test_indices(int fold) const;
  std::vector<int64_t> train_indices(int fold) const;
};

/// Seeded shuffle then contiguous chunks; sizes differ by at most one.
FoldSplit kfold_split(int64_t n, int k, uint64_t seed);

struct RectangleHoldout {
  double x1_lo = 0.0, x1_hi = 0.0;
  double x2_lo = 0.0, x2_hi = 0.0;
};

/// Test = observed points strictly inside the rectangle (raw coordinates),
/// train = remaining observed points. Either side empty is an error.
struct HoldoutSplit {
  std::vector<int64_t> train_indices;
  std::vector<int64_t> test_indices;
};
HoldoutSplit rectangle_holdout(const Dataset& dataset, const RectangleHoldout& rect);

}  // namespace sdcnn::data
