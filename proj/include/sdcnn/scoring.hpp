#pragma once

#include <cstdint>
#include <vector>

#include "sdcnn/error.hpp"

namespace sdcnn::score {

/// N locations by S Monte-Carlo predictions, row-major.
struct PredictiveSamples {
  int64_t n_locations = 0;
  int64_t n_samples = 0;
  std::vector<double> values;        // n_locations * n_samples
  std::vector<int64_t> location_ids; // length n_locations

  const double* row(int64_t i) const { return values.data() + i * n_samples; }
  double* row(int64_t i) { return values.data() + i * n_samples; }
  double row_mean(int64_t i) const;
  double row_sd(int64_t i) const;  // sample standard deviation (n-1)
};

struct PerLocationScore {
  int64_t location_id = 0;
  double observed = 0.0;
  double pred_mean = 0.0;
  double pred_sd = 0.0;
  double crps = 0.0;
  double interval_score = 0.0;
  bool covered = false;
};

struct ScoreReport {
  double mse = 0.0;
  double crps_mean = 0.0;
  double icr = 0.0;
  double interval_score_mean = 0.0;
  double alpha = 0.05;
  std::vector<PerLocationScore> per_location;
};

double mse(const std::vector<double>& pred_mean, const std::vector<double>& obs);

/// Empirical CRPS in the orientation where larger is better:
/// 0.5 E|X-X'| - E|X-x| under the empirical measure. O(S log S).
double crps_empirical(const std::vector<double>& samples, double obs);

/// Linear-interpolation ("type 7") quantile: position (S-1)q on the sorted
/// samples.
double empirical_quantile(const std::vector<double>& samples, double q);

/// Fraction of observations strictly inside their central (1-alpha) interval.
double icr(const PredictiveSamples& samples, const std::vector<double>& obs,
           double alpha);

/// (U-L) plus miss penalties. The default penalty coefficient is alpha/2;
/// `standard_coefficient` substitutes the conventional 2/alpha.
double interval_score(const std::vector<double>& samples, double obs,
                      double alpha, bool standard_coefficient = false);

/// The same score on explicit interval bounds.
double interval_score_bounds(double lower, double upper, double obs, double alpha,
                             bool standard_coefficient = false);

ScoreReport score_report(const PredictiveSamples& samples,
                         const std::vector<double>& obs, double alpha,
                         bool standard_interval_score = false);

}  // namespace sdcnn::score
