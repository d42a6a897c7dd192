#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdcnn/csv.hpp"
#include "sdcnn/dataset.hpp"
#include "sdcnn/models.hpp"
#include "sdcnn/train.hpp"

namespace sdcnn::bench {

struct DataSource {
  enum class Kind { Eggholder, Csv } kind = Kind::Eggholder;
  data::GridSpec grid;  // eggholder
  std::string csv_path; // csv
};

/// Full declarative description of a run; parsed from the JSON config file.
struct ExperimentConfig {
  DataSource data;
  std::vector<models::ModelKind> model_kinds;
  models::ModelSpec model;  // widths/rates shared across kinds
  basis::BasisConfig basis; // bounding box is overwritten per training fit
  nn::TrainConfig train;
  bool standardize_response = true;
  int cv_folds = 5;
  data::RectangleHoldout holdout_rect{-100.0, 100.0, -100.0, 100.0};
  int64_t n_mc_samples = 100;
  double alpha = 0.05;
  bool standard_interval_score = false;
  bool point_prediction_sample_mean = true;  // false: dropout-off forward
  uint64_t seed = 2024;
  std::string out_dir = "out";
  std::optional<data::GridSpec> surface_grid;
  bool save_models = false;
  int n_threads = 0;  // 0: hardware concurrency capped at the cell count
};

ExperimentConfig parse_config_json(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

/// A trained model plus everything prediction needs: the basis built on the
/// training bounding box, the training min-max state and the response
/// transform.
struct ModelBundle {
  models::ModelKind kind;
  models::ModelSpec spec;
  basis::KernelSpec kernel;
  std::vector<basis::Resolution> resolutions;  // scaled-coordinate space
  data::AxisScale scale_x1, scale_x2;
  double response_mu = 0.0, response_sigma = 1.0;
  nn::NetworkGraph graph;
  nn::TrainResult train_result;

  /// Predictive samples in raw response units for raw-coordinate locations.
  score::PredictiveSamples predict(const std::vector<basis::Location>& locations,
                                   int64_t n_samples, uint64_t seed);
  std::vector<double> predict_mean(const std::vector<basis::Location>& locations);
};

/// Train one model kind on a set of observed rows (training pipeline:
/// fit scaling, build bases over the scaled box, standardize responses,
/// train with early stopping).
ModelBundle train_on(const ExperimentConfig& config, models::ModelKind kind,
                     const data::Dataset& dataset,
                     const std::vector<int64_t>& train_rows, uint64_t cell_seed);

/// Train a model kind on all observed rows of the config's data source.
ModelBundle train_full(const ExperimentConfig& config, models::ModelKind kind);

struct CellOutcome {
  models::ModelKind kind;
  int fold = 0;
  bool ok = false;
  std::string diagnostic;
  score::ScoreReport report;
  std::vector<int64_t> test_rows;
  score::PredictiveSamples samples;  // raw response units
};

struct RunResult {
  std::vector<io::ScoreRow> score_rows;
  std::vector<io::PerLocationRow> per_location_rows;
  std::vector<std::string> diagnostics;
  bool all_ok = true;
};

/// K-fold cross-validation over every configured model kind. Writes
/// scores.csv, per_location_scores.csv and optional surfaces/models under
/// config.out_dir.
RunResult run_cv(const ExperimentConfig& config);

/// Missing-rectangle experiment: train outside, score strictly inside.
RunResult run_holdout(const ExperimentConfig& config);

/// Basis images for every location of the dataset, written as CSV.
void basis_dump(const ExperimentConfig& config, const data::Dataset& dataset,
                const std::string& out_path);

}  // namespace sdcnn::bench
