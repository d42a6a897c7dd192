#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sdcnn/rng.hpp"
#include "sdcnn/scoring.hpp"

using namespace sdcnn;
using namespace sdcnn::score;

TEST_CASE("mse basics") {
  CHECK(mse({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK(mse({1.0, 1.0}, {0.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-15));
  // permuting paired entries leaves the value unchanged
  CHECK(mse({1.0, 5.0, -2.0}, {2.0, 4.0, 0.0}) ==
        doctest::Approx(mse({5.0, -2.0, 1.0}, {4.0, 0.0, 2.0})).epsilon(1e-15));
  CHECK_THROWS_AS(mse({1.0}, {1.0, 2.0}), Error);
}

TEST_CASE("crps pinned cases") {
  CHECK(crps_empirical({3.0}, 3.0) == 0.0);
  CHECK(crps_empirical({0.0, 1.0}, 0.0) == doctest::Approx(-0.25).epsilon(1e-15));
  // degenerate point mass
  CHECK(crps_empirical({2.5, 2.5, 2.5}, 4.0) ==
        doctest::Approx(-1.5).epsilon(1e-15));
}

TEST_CASE("fast crps equals the double-sum brute force") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const int64_t s = 1 + rng.index(200);
    std::vector<double> samples(static_cast<size_t>(s));
    for (double& v : samples) v = rng.uniform(-10, 10);
    const double obs = rng.uniform(-12, 12);
    const double fast = crps_empirical(samples, obs);
    const double brute = oracle::crps_bruteforce(samples, obs);
    CHECK(std::abs(fast - brute) < 1e-12);
  }
}

TEST_CASE("crps is nonpositive, zero only at a point mass on the observation") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int64_t s = 2 + rng.index(50);
    std::vector<double> samples(static_cast<size_t>(s));
    for (double& v : samples) v = rng.uniform(-5, 5);
    CHECK(crps_empirical(samples, rng.uniform(-5, 5)) <= 0.0);
  }
  CHECK(crps_empirical({1.0, 1.0, 1.0}, 1.0) == 0.0);
}

TEST_CASE("crps translation and scale behavior") {
  Rng rng(9);
  std::vector<double> samples(40);
  for (double& v : samples) v = rng.uniform(-3, 3);
  const double obs = 0.7;
  const double base = crps_empirical(samples, obs);

  std::vector<double> shifted = samples;
  for (double& v : shifted) v += 11.5;
  CHECK(crps_empirical(shifted, obs + 11.5) == doctest::Approx(base).epsilon(1e-12));

  std::vector<double> scaled = samples;
  for (double& v : scaled) v *= 3.0;
  CHECK(crps_empirical(scaled, obs * 3.0) ==
        doctest::Approx(3.0 * base).epsilon(1e-12));
}

TEST_CASE("empirical quantile: linear interpolation convention") {
  CHECK(empirical_quantile({4.0, 1.0, 3.0, 2.0}, 0.0) == 1.0);
  CHECK(empirical_quantile({4.0, 1.0, 3.0, 2.0}, 1.0) == 4.0);
  CHECK(empirical_quantile({1.0, 2.0, 3.0, 4.0}, 0.5) ==
        doctest::Approx(2.5).epsilon(1e-15));
  CHECK(empirical_quantile({7.0, 7.0, 7.0}, 0.33) == 7.0);
  CHECK_THROWS_AS(empirical_quantile({1.0}, 1.5), Error);
  CHECK_THROWS_AS(empirical_quantile({1.0}, -0.1), Error);
}

namespace {

PredictiveSamples make_samples(const std::vector<std::vector<double>>& rows) {
  PredictiveSamples samples;
  samples.n_locations = static_cast<int64_t>(rows.size());
  samples.n_samples = static_cast<int64_t>(rows.front().size());
  for (const auto& row : rows) {
    samples.values.insert(samples.values.end(), row.begin(), row.end());
  }
  for (int64_t i = 0; i < samples.n_locations; ++i) samples.location_ids.push_back(i);
  return samples;
}

}  // namespace

TEST_CASE("icr counts strict-interior coverage") {
  // obs at the sample median of a spread-out sample: inside for any alpha
  PredictiveSamples samples =
      make_samples({{1, 2, 3, 4, 5, 6, 7, 8, 9}, {1, 2, 3, 4, 5, 6, 7, 8, 9}});
  CHECK(icr(samples, {5.0, 5.0}, 0.05) == 1.0);
  CHECK(icr(samples, {5.0, 5.0}, 0.5) == 1.0);
  // obs above every sample
  CHECK(icr(samples, {20.0, 20.0}, 0.05) == 0.0);
  CHECK_THROWS_AS(icr(samples, {1.0}, 0.05), Error);
}

TEST_CASE("icr is monotone non-increasing in alpha") {
  Rng rng(77);
  PredictiveSamples samples;
  samples.n_locations = 50;
  samples.n_samples = 60;
  std::vector<double> obs;
  for (int64_t i = 0; i < samples.n_locations; ++i) {
    samples.location_ids.push_back(i);
    for (int64_t s = 0; s < samples.n_samples; ++s) {
      samples.values.push_back(rng.uniform(-2, 2));
    }
    obs.push_back(rng.uniform(-2.5, 2.5));
  }
  double prev = 1.0;
  for (double alpha : {0.01, 0.05, 0.1, 0.2, 0.4, 0.6, 0.8}) {
    const double cover = icr(samples, obs, alpha);
    CHECK(cover <= prev + 1e-15);
    prev = cover;
  }
}

TEST_CASE("interval score: printed and standard coefficients") {
  // the pinned (L=0, U=1, x=2, alpha=0.05) case, both coefficient conventions
  CHECK(interval_score_bounds(0.0, 1.0, 2.0, 0.05, false) ==
        doctest::Approx(1.025).epsilon(1e-14));
  CHECK(interval_score_bounds(0.0, 1.0, 2.0, 0.05, true) ==
        doctest::Approx(41.0).epsilon(1e-14));
  // inside the interval: width only
  CHECK(interval_score_bounds(0.0, 1.0, 0.5, 0.05) == 1.0);
  CHECK(interval_score_bounds(0.0, 1.0, -1.0, 0.05) ==
        doctest::Approx(1.025).epsilon(1e-14));

  // the sample-based path uses the type-7 quantiles; 40 zeros and 41 ones put
  // the 0.025/0.975 positions exactly on sample values 0 and 1
  std::vector<double> samples;
  for (int i = 0; i < 40; ++i) samples.push_back(0.0);
  for (int i = 0; i < 41; ++i) samples.push_back(1.0);
  CHECK(empirical_quantile(samples, 0.025) == 0.0);
  CHECK(empirical_quantile(samples, 0.975) == 1.0);
  CHECK(interval_score(samples, 2.0, 0.05, false) ==
        doctest::Approx(1.025).epsilon(1e-14));
  CHECK(interval_score(samples, 2.0, 0.05, true) ==
        doctest::Approx(41.0).epsilon(1e-14));
}

TEST_CASE("interval score dominates the interval width") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> samples(30);
    for (double& v : samples) v = rng.uniform(-4, 4);
    const double obs = rng.uniform(-6, 6);
    const double lower = empirical_quantile(samples, 0.025);
    const double upper = empirical_quantile(samples, 0.975);
    const double is = interval_score(samples, obs, 0.05);
    CHECK(is >= upper - lower - 1e-15);
    if (obs >= lower && obs <= upper) {
      CHECK(is == doctest::Approx(upper - lower).epsilon(1e-12));
    }
  }
}

TEST_CASE("interval score and icr translation/scale behavior") {
  Rng rng(6);
  std::vector<double> samples(50);
  for (double& v : samples) v = rng.uniform(-3, 3);
  const double obs = 3.4;
  const double base = interval_score(samples, obs, 0.05);

  std::vector<double> shifted = samples;
  for (double& v : shifted) v += 2.25;
  CHECK(interval_score(shifted, obs + 2.25, 0.05) ==
        doctest::Approx(base).epsilon(1e-12));
  std::vector<double> scaled = samples;
  for (double& v : scaled) v *= 1.75;
  CHECK(interval_score(scaled, obs * 1.75, 0.05) ==
        doctest::Approx(1.75 * base).epsilon(1e-12));
}

TEST_CASE("score report aggregates the per-op calls") {
  Rng rng(2024);
  PredictiveSamples samples;
  samples.n_locations = 12;
  samples.n_samples = 25;
  std::vector<double> obs;
  for (int64_t i = 0; i < samples.n_locations; ++i) {
    samples.location_ids.push_back(100 + i);
    for (int64_t s = 0; s < samples.n_samples; ++s) {
      samples.values.push_back(rng.uniform(-1, 1) + 0.1 * static_cast<double>(i));
    }
    obs.push_back(0.1 * static_cast<double>(i) + rng.uniform(-0.5, 0.5));
  }

  const ScoreReport report = score_report(samples, obs, 0.05);
  CHECK(report.per_location.size() == 12);

  std::vector<double> means, crps_v, is_v;
  std::vector<double> row(25);
  for (int64_t i = 0; i < 12; ++i) {
    std::copy(samples.row(i), samples.row(i) + 25, row.begin());
    means.push_back(samples.row_mean(i));
    crps_v.push_back(crps_empirical(row, obs[static_cast<size_t>(i)]));
    is_v.push_back(interval_score(row, obs[static_cast<size_t>(i)], 0.05));
  }
  CHECK(report.mse == doctest::Approx(mse(means, obs)).epsilon(1e-14));
  double crps_mean = 0.0, is_mean = 0.0;
  for (double v : crps_v) crps_mean += v;
  for (double v : is_v) is_mean += v;
  CHECK(report.crps_mean == doctest::Approx(crps_mean / 12).epsilon(1e-12));
  CHECK(report.interval_score_mean == doctest::Approx(is_mean / 12).epsilon(1e-12));
  CHECK(report.icr == doctest::Approx(icr(samples, obs, 0.05)).epsilon(1e-15));
  CHECK(report.per_location[0].location_id == 100);
}

TEST_CASE("score report on a near-point-mass at the observation") {
  // tight samples around the truth: mse ~ 0, crps ~ 0, covered
  PredictiveSamples samples = make_samples({{0.999999, 1.0, 1.000001}});
  const ScoreReport report = score_report(samples, {1.0}, 0.05);
  CHECK(report.mse < 1e-10);
  CHECK(std::abs(report.crps_mean) < 1e-5);
  CHECK(report.icr == 1.0);
  CHECK(report.interval_score_mean < 1e-5);

  // an exact point mass has a degenerate (empty) open interval
  PredictiveSamples exact = make_samples({{1.0, 1.0, 1.0}});
  const ScoreReport degenerate = score_report(exact, {1.0}, 0.05);
  CHECK(degenerate.mse == 0.0);
  CHECK(degenerate.crps_mean == 0.0);
  CHECK(degenerate.interval_score_mean == 0.0);
  CHECK(degenerate.icr == 0.0);
}
