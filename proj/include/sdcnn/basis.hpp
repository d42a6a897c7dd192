#pragma once

#include <cstdint>
#include <vector>

#include "sdcnn/tensor.hpp"

namespace sdcnn::basis {

struct Location {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct Knot {
  Location center;
  int row_index = 0;
  int col_index = 0;
};

/// One grid of knots sharing a common scale. Rows run along x2, columns
/// along x1; knots are stored row-major.
struct Resolution {
  int level = 1;
  int rows = 0;
  int cols = 0;
  std::vector<Knot> knots;
  double sigma = 0.0;

  int64_t knot_count() const noexcept {
    return static_cast<int64_t>(rows) * cols;
  }
};

enum class KernelKind { Gaussian, Wendland };

struct BasisConfig {
  double x1_min = 0.0, x1_max = 1.0;
  double x2_min = 0.0, x2_max = 1.0;
  int num_resolutions = 3;
  int base_knots_per_axis = 3;
  int growth_factor = 2;
  double margin_fraction = 0.1;
  double scale_multiplier = 1.5;
  KernelKind kernel = KernelKind::Gaussian;
  // The printed Gaussian uses an unsquared Euclidean norm in the exponent;
  // this switches to the conventional squared form.
  bool squared_exponent = false;
  int64_t knot_budget = 4096;
};

struct BasisImage {
  int resolution_level = 0;
  Tensor values;  // rows x cols, entries in [0, 1]
};

struct KernelSpec {
  KernelKind kind = KernelKind::Gaussian;
  bool squared_exponent = false;
};

/// Lay out uniform knot grids over the margin-expanded bounding box.
/// Resolution k has base*growth^(k-1) knots per axis and
/// sigma_k = scale_multiplier * (knot spacing along the shorter axis).
std::vector<Resolution> build_resolutions(const BasisConfig& config);

/// exp(-||s-c||_2 / (2 sigma^2)) as printed; the squared variant divides
/// the squared norm instead.
double gaussian_rbf(const Location& s, const Location& c, double sigma,
                    bool squared_exponent = false);

/// Compactly supported polynomial bump: (1-r)^6 (35 r^2 + 18 r + 3) / 3 on
/// [0, 1], zero beyond.
double wendland_rbf(double r);

double kernel_value(const KernelSpec& kernel, const Location& s,
                    const Location& c, double sigma);

BasisImage evaluate_basis_image(const Location& s, const Resolution& res,
                                const KernelSpec& kernel);

/// Row-major flattened images concatenated coarsest-first; not rescaled.
std::vector<double> evaluate_basis_vector(const Location& s,
                                          const std::vector<Resolution>& resolutions,
                                          const KernelSpec& kernel);

int64_t total_basis_size(const std::vector<Resolution>& resolutions);

}  // namespace sdcnn::basis
