#include "sdcnn/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "sdcnn/tensor.hpp"

namespace sdcnn::score {

double PredictiveSamples::row_mean(int64_t i) const {
  return pairwise_sum(row(i), n_samples) / static_cast<double>(n_samples);
}

double PredictiveSamples::row_sd(int64_t i) const {
  if (n_samples < 2) return 0.0;
  const double mean = row_mean(i);
  std::vector<double> sq(static_cast<size_t>(n_samples));
  const double* r = row(i);
  for (int64_t s = 0; s < n_samples; ++s) {
    const double d = r[s] - mean;
    sq[static_cast<size_t>(s)] = d * d;
  }
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(n_samples - 1));
}

double mse(const std::vector<double>& pred_mean, const std::vector<double>& obs) {
  require(pred_mean.size() == obs.size(), ErrorCode::InvalidArgument,
          "mse length mismatch");
  require(!obs.empty(), ErrorCode::InvalidArgument, "mse on empty input");
  std::vector<double> sq(obs.size());
  for (size_t i = 0; i < obs.size(); ++i) {
    const double d = obs[i] - pred_mean[i];
    sq[i] = d * d;
  }
  return pairwise_sum(sq) / static_cast<double>(obs.size());
}

double crps_empirical(const std::vector<double>& samples, double obs) {
  const int64_t s = static_cast<int64_t>(samples.size());
  require(s >= 1, ErrorCode::InvalidArgument, "crps on empty sample set");

  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());

  // E|X - X'| via the sorted identity: sum over ordered pairs of gaps.
  std::vector<double> weighted(sorted.size());
  for (int64_t j = 0; j < s; ++j) {
    weighted[static_cast<size_t>(j)] =
        sorted[static_cast<size_t>(j)] * static_cast<double>(2 * j - s + 1);
  }
  const double mean_abs_pair =
      2.0 * pairwise_sum(weighted) / (static_cast<double>(s) * static_cast<double>(s));

  std::vector<double> dev(sorted.size());
  for (int64_t j = 0; j < s; ++j) {
    dev[static_cast<size_t>(j)] = std::abs(sorted[static_cast<size_t>(j)] - obs);
  }
  const double mean_abs_dev = pairwise_sum(dev) / static_cast<double>(s);

  return 0.5 * mean_abs_pair - mean_abs_dev;
}

double empirical_quantile(const std::vector<double>& samples, double q) {
  require(!samples.empty(), ErrorCode::InvalidArgument, "quantile of empty sample set");
  require(q >= 0.0 && q <= 1.0, ErrorCode::InvalidArgument,
          "quantile level must lie in [0, 1]");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const int64_t s = static_cast<int64_t>(sorted.size());
  const double pos = q * static_cast<double>(s - 1);
  const int64_t lo = static_cast<int64_t>(std::floor(pos));
  if (lo >= s - 1) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[static_cast<size_t>(lo)] +
         frac * (sorted[static_cast<size_t>(lo + 1)] - sorted[static_cast<size_t>(lo)]);
}

double icr(const PredictiveSamples& samples, const std::vector<double>& obs,
           double alpha) {
  require(samples.n_locations == static_cast<int64_t>(obs.size()),
          ErrorCode::InvalidArgument, "icr shape mismatch");
  require(samples.n_locations >= 1, ErrorCode::InvalidArgument, "icr on empty input");
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument,
          "alpha must lie in (0, 1)");
  int64_t covered = 0;
  std::vector<double> row(static_cast<size_t>(samples.n_samples));
  for (int64_t i = 0; i < samples.n_locations; ++i) {
    std::copy(samples.row(i), samples.row(i) + samples.n_samples, row.begin());
    const double lower = empirical_quantile(row, alpha / 2.0);
    const double upper = empirical_quantile(row, 1.0 - alpha / 2.0);
    // interval is open, as printed
    if (obs[static_cast<size_t>(i)] > lower && obs[static_cast<size_t>(i)] < upper) {
      ++covered;
    }
  }
  return static_cast<double>(covered) / static_cast<double>(samples.n_locations);
}

double interval_score_bounds(double lower, double upper, double obs, double alpha,
                             bool standard_coefficient) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument,
          "alpha must lie in (0, 1)");
  const double coeff = standard_coefficient ? 2.0 / alpha : alpha / 2.0;
  double score = upper - lower;
  if (obs < lower) score += coeff * (lower - obs);
  if (obs > upper) score += coeff * (obs - upper);
  return score;
}

double interval_score(const std::vector<double>& samples, double obs, double alpha,
                      bool standard_coefficient) {
  return interval_score_bounds(empirical_quantile(samples, alpha / 2.0),
                               empirical_quantile(samples, 1.0 - alpha / 2.0), obs,
                               alpha, standard_coefficient);
}

ScoreReport score_report(const PredictiveSamples& samples,
                         const std::vector<double>& obs, double alpha,
                         bool standard_interval_score) {
  require(samples.n_locations == static_cast<int64_t>(obs.size()),
          ErrorCode::InvalidArgument, "score_report shape mismatch");
  require(samples.n_locations >= 1, ErrorCode::InvalidArgument,
          "score_report on empty input");

  ScoreReport report;
  report.alpha = alpha;
  report.per_location.reserve(static_cast<size_t>(samples.n_locations));

  std::vector<double> means(static_cast<size_t>(samples.n_locations));
  std::vector<double> crps_rows(static_cast<size_t>(samples.n_locations));
  std::vector<double> is_rows(static_cast<size_t>(samples.n_locations));
  std::vector<double> row(static_cast<size_t>(samples.n_samples));

  for (int64_t i = 0; i < samples.n_locations; ++i) {
    std::copy(samples.row(i), samples.row(i) + samples.n_samples, row.begin());
    PerLocationScore loc;
    loc.location_id = samples.location_ids.empty()
                          ? i
                          : samples.location_ids[static_cast<size_t>(i)];
    loc.observed = obs[static_cast<size_t>(i)];
    loc.pred_mean = samples.row_mean(i);
    loc.pred_sd = samples.row_sd(i);
    loc.crps = crps_empirical(row, loc.observed);
    loc.interval_score =
        interval_score(row, loc.observed, alpha, standard_interval_score);
    const double lower = empirical_quantile(row, alpha / 2.0);
    const double upper = empirical_quantile(row, 1.0 - alpha / 2.0);
    loc.covered = loc.observed > lower && loc.observed < upper;

    means[static_cast<size_t>(i)] = loc.pred_mean;
    crps_rows[static_cast<size_t>(i)] = loc.crps;
    is_rows[static_cast<size_t>(i)] = loc.interval_score;
    report.per_location.push_back(loc);
  }

  report.mse = mse(means, obs);
  report.crps_mean =
      pairwise_sum(crps_rows) / static_cast<double>(samples.n_locations);
  report.interval_score_mean =
      pairwise_sum(is_rows) / static_cast<double>(samples.n_locations);
  report.icr = icr(samples, obs, alpha);
  return report;
}

}  // namespace sdcnn::score
