#include "sdcnn/basis.hpp"

#include <cmath>
#include <string>

namespace sdcnn::basis {

std::vector<Resolution> build_resolutions(const BasisConfig& config) {
  require(config.x1_min < config.x1_max && config.x2_min < config.x2_max,
          ErrorCode::InvalidArgument, "basis bounding box is degenerate");
  require(config.num_resolutions >= 1, ErrorCode::InvalidArgument,
          "num_resolutions must be >= 1");
  require(config.base_knots_per_axis >= 2, ErrorCode::InvalidArgument,
          "base_knots_per_axis must be >= 2");
  require(config.growth_factor >= 2, ErrorCode::InvalidArgument,
          "growth_factor must be >= 2");
  require(config.margin_fraction >= 0.0, ErrorCode::InvalidArgument,
          "margin_fraction must be nonnegative");
  require(config.scale_multiplier > 0.0, ErrorCode::InvalidArgument,
          "scale_multiplier must be positive");

  const double w1 = config.x1_max - config.x1_min;
  const double w2 = config.x2_max - config.x2_min;
  const double lo1 = config.x1_min - config.margin_fraction * w1;
  const double hi1 = config.x1_max + config.margin_fraction * w1;
  const double lo2 = config.x2_min - config.margin_fraction * w2;
  const double hi2 = config.x2_max + config.margin_fraction * w2;

  // Budget check on the finest level before building anything.
  int64_t finest_axis = config.base_knots_per_axis;
  for (int k = 1; k < config.num_resolutions; ++k) finest_axis *= config.growth_factor;
  require(finest_axis * finest_axis <= config.knot_budget, ErrorCode::InvalidArgument,
          "finest resolution (" + std::to_string(finest_axis * finest_axis) +
              " knots) exceeds the knot budget of " +
              std::to_string(config.knot_budget));

  std::vector<Resolution> out;
  out.reserve(static_cast<size_t>(config.num_resolutions));
  int64_t per_axis = config.base_knots_per_axis;
  for (int level = 1; level <= config.num_resolutions; ++level) {
    Resolution res;
    res.level = level;
    res.rows = static_cast<int>(per_axis);
    res.cols = static_cast<int>(per_axis);
    const double d1 = (hi1 - lo1) / static_cast<double>(per_axis - 1);
    const double d2 = (hi2 - lo2) / static_cast<double>(per_axis - 1);
    res.sigma = config.scale_multiplier * std::min(d1, d2);
    res.knots.reserve(static_cast<size_t>(per_axis * per_axis));
    for (int r = 0; r < res.rows; ++r) {
      for (int c = 0; c < res.cols; ++c) {
        Knot knot;
        knot.center = Location{lo1 + c * d1, lo2 + r * d2};
        knot.row_index = r;
        knot.col_index = c;
        res.knots.push_back(knot);
      }
    }
    out.push_back(std::move(res));
    per_axis *= config.growth_factor;
  }
  return out;
}

double gaussian_rbf(const Location& s, const Location& c, double sigma,
                    bool squared_exponent) {
  require(sigma > 0.0, ErrorCode::InvalidArgument, "sigma must be positive");
  const double dx = s.x1 - c.x1;
  const double dy = s.x2 - c.x2;
  const double sq = dx * dx + dy * dy;
  const double num = squared_exponent ? sq : std::sqrt(sq);
  return std::exp(-num / (2.0 * sigma * sigma));
}

double wendland_rbf(double r) {
  require(r >= 0.0, ErrorCode::InvalidArgument, "distance must be nonnegative");
  if (r > 1.0) return 0.0;
  const double u = 1.0 - r;
  const double u2 = u * u;
  const double u6 = u2 * u2 * u2;
  return u6 * (35.0 * r * r + 18.0 * r + 3.0) / 3.0;
}

double kernel_value(const KernelSpec& kernel, const Location& s,
                    const Location& c, double sigma) {
  if (kernel.kind == KernelKind::Gaussian) {
    return gaussian_rbf(s, c, sigma, kernel.squared_exponent);
  }
  const double dx = s.x1 - c.x1;
  const double dy = s.x2 - c.x2;
  return wendland_rbf(std::sqrt(dx * dx + dy * dy) / sigma);
}

BasisImage evaluate_basis_image(const Location& s, const Resolution& res,
                                const KernelSpec& kernel) {
  require(res.rows >= 2 && res.cols >= 2, ErrorCode::InvalidArgument,
          "resolution grid must be at least 2x2");
  require(static_cast<int64_t>(res.knots.size()) == res.knot_count(),
          ErrorCode::InvalidArgument, "resolution knot list is incomplete");
  BasisImage image;
  image.resolution_level = res.level;
  image.values = Tensor::zeros({res.rows, res.cols});
  for (int64_t i = 0; i < res.knot_count(); ++i) {
    const Knot& knot = res.knots[static_cast<size_t>(i)];
    image.values.values[static_cast<size_t>(i)] =
        kernel_value(kernel, s, knot.center, res.sigma);
  }
  return image;
}

std::vector<double> evaluate_basis_vector(const Location& s,
                                          const std::vector<Resolution>& resolutions,
                                          const KernelSpec& kernel) {
  require(!resolutions.empty(), ErrorCode::InvalidArgument,
          "at least one resolution required");
  std::vector<double> out;
  out.reserve(static_cast<size_t>(total_basis_size(resolutions)));
  for (const Resolution& res : resolutions) {
    BasisImage image = evaluate_basis_image(s, res, kernel);
    out.insert(out.end(), image.values.values.begin(), image.values.values.end());
  }
  return out;
}

int64_t total_basis_size(const std::vector<Resolution>& resolutions) {
  int64_t n = 0;
  for (const Resolution& res : resolutions) n += res.knot_count();
  return n;
}

}  // namespace sdcnn::basis
