#pragma once

#include <string>
#include <vector>

#include "sdcnn/dataset.hpp"
#include "sdcnn/scoring.hpp"

namespace sdcnn::io {

/// Shortest 17-significant-digit rendering; round-trips 64-bit floats exactly.
std::string format_double(double v);

/// Reads a header-led x1,x2,y CSV. "NaN" or empty responses are kept as
/// prediction-only rows. Malformed rows report their line number.
data::Dataset load_dataset_csv(const std::string& path);

void write_dataset_csv(const data::Dataset& dataset, const std::string& path);

struct ScoreRow {
  std::string model;
  std::string fold;  // "0".."k-1" or "pooled"
  double mse = 0.0, crps = 0.0, icr = 0.0, interval_score = 0.0;
};
void write_scores_csv(const std::vector<ScoreRow>& rows, const std::string& path);

struct PerLocationRow {
  std::string model;
  std::string fold;
  int64_t location_id = 0;
  double x1 = 0.0, x2 = 0.0;
  double observed = 0.0, pred_mean = 0.0, pred_sd = 0.0;
  double crps = 0.0, interval_score = 0.0;
  int covered = 0;
};
void write_per_location_csv(const std::vector<PerLocationRow>& rows,
                            const std::string& path);

struct SurfaceRow {
  double x1 = 0.0, x2 = 0.0, mean = 0.0, sd = 0.0;
};
void write_surface_csv(const std::vector<SurfaceRow>& rows, const std::string& path);

/// Wide predictive-sample format: location_id, observed, s000.., one row per
/// location. Observed may be NaN for prediction-only locations.
void write_samples_csv(const score::PredictiveSamples& samples,
                       const std::vector<double>& observed,
                       const std::string& path);
void load_samples_csv(const std::string& path, score::PredictiveSamples& samples,
                      std::vector<double>& observed);

/// basis dump rows: location_id, resolution, row, col, value.
struct BasisDumpRow {
  int64_t location_id = 0;
  int resolution = 0;
  int row = 0, col = 0;
  double value = 0.0;
};
void write_basis_dump_csv(const std::vector<BasisDumpRow>& rows,
                          const std::string& path);

}  // namespace sdcnn::io
