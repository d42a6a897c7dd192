#include "sdcnn/sdcnn_c.h"

#include <cmath>
#include <cstring>
#include <string>

#include "sdcnn/experiment.hpp"
#include "sdcnn/serialize.hpp"

using namespace sdcnn;

struct sdcnn_dataset {
  data::Dataset value;
};

struct sdcnn_experiment {
  bench::ExperimentConfig value;
};

struct sdcnn_model {
  bench::ModelBundle value;
};

struct sdcnn_samples {
  score::PredictiveSamples value;
};

namespace {

thread_local std::string g_last_error;

int code_of(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InvalidArgument: return SDCNN_E_ARGUMENT;
    case ErrorCode::Io: return SDCNN_E_IO;
    case ErrorCode::Parse: return SDCNN_E_PARSE;
    case ErrorCode::Numeric: return SDCNN_E_NUMERIC;
    case ErrorCode::Internal: return SDCNN_E_INTERNAL;
  }
  return SDCNN_E_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SDCNN_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return code_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SDCNN_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SDCNN_E_INTERNAL;
  }
}

int require_arg(bool ok, const char* message) {
  if (ok) return SDCNN_OK;
  g_last_error = message;
  return SDCNN_E_ARGUMENT;
}

}  // namespace

extern "C" {

const char* sdcnn_version(void) { return "1.0.0"; }

const char* sdcnn_last_error(void) { return g_last_error.c_str(); }

/* ---- datasets -------------------------------------------------------- */

int sdcnn_dataset_eggholder(int64_t n_x1, int64_t n_x2, double x1_min,
                            double x1_max, double x2_min, double x2_max,
                            sdcnn_dataset** out) {
  if (int rc = require_arg(out != nullptr, "null output handle")) return rc;
  return guarded([&] {
    data::GridSpec grid{n_x1, n_x2, x1_min, x1_max, x2_min, x2_max};
    *out = new sdcnn_dataset{data::generate_eggholder_dataset(grid)};
  });
}

int sdcnn_dataset_load_csv(const char* path, sdcnn_dataset** out) {
  if (int rc = require_arg(path && out, "null argument")) return rc;
  return guarded([&] { *out = new sdcnn_dataset{io::load_dataset_csv(path)}; });
}

int sdcnn_dataset_write_csv(const sdcnn_dataset* dataset, const char* path) {
  if (int rc = require_arg(dataset && path, "null argument")) return rc;
  return guarded([&] { io::write_dataset_csv(dataset->value, path); });
}

int sdcnn_dataset_size(const sdcnn_dataset* dataset, int64_t* out_n) {
  if (int rc = require_arg(dataset && out_n, "null argument")) return rc;
  *out_n = dataset->value.size();
  return SDCNN_OK;
}

int sdcnn_dataset_row(const sdcnn_dataset* dataset, int64_t index, double* out_x1,
                      double* out_x2, double* out_y) {
  if (int rc = require_arg(dataset && out_x1 && out_x2 && out_y, "null argument")) {
    return rc;
  }
  if (int rc = require_arg(index >= 0 && index < dataset->value.size(),
                           "row index out of range")) {
    return rc;
  }
  const auto i = static_cast<size_t>(index);
  *out_x1 = dataset->value.locations[i].x1;
  *out_x2 = dataset->value.locations[i].x2;
  *out_y = dataset->value.responses[i];
  return SDCNN_OK;
}

void sdcnn_dataset_free(sdcnn_dataset* dataset) { delete dataset; }

/* ---- experiment configuration ---------------------------------------- */

int sdcnn_experiment_load(const char* path, sdcnn_experiment** out) {
  if (int rc = require_arg(path && out, "null argument")) return rc;
  return guarded([&] {
    *out = new sdcnn_experiment{bench::load_config_file(path)};
  });
}

int sdcnn_experiment_parse(const char* json_text, sdcnn_experiment** out) {
  if (int rc = require_arg(json_text && out, "null argument")) return rc;
  return guarded([&] {
    *out = new sdcnn_experiment{bench::parse_config_json(json_text)};
  });
}

int sdcnn_experiment_set_seed(sdcnn_experiment* experiment, uint64_t seed) {
  if (int rc = require_arg(experiment != nullptr, "null experiment")) return rc;
  experiment->value.seed = seed;
  return SDCNN_OK;
}

int sdcnn_experiment_set_out_dir(sdcnn_experiment* experiment, const char* dir) {
  if (int rc = require_arg(experiment && dir, "null argument")) return rc;
  experiment->value.out_dir = dir;
  return SDCNN_OK;
}

void sdcnn_experiment_free(sdcnn_experiment* experiment) { delete experiment; }

/* ---- experiment runs --------------------------------------------------- */

namespace {

int finish_run(const bench::RunResult& result) {
  if (result.all_ok) return SDCNN_OK;
  std::string message = "run completed with failed cells:";
  for (const std::string& d : result.diagnostics) message += "\n  " + d;
  g_last_error = message;
  return SDCNN_E_NUMERIC;
}

}  // namespace

int sdcnn_run_cv(const sdcnn_experiment* experiment) {
  if (int rc = require_arg(experiment != nullptr, "null experiment")) return rc;
  int status = SDCNN_OK;
  const int rc = guarded([&] { status = finish_run(bench::run_cv(experiment->value)); });
  return rc != SDCNN_OK ? rc : status;
}

int sdcnn_run_holdout(const sdcnn_experiment* experiment) {
  if (int rc = require_arg(experiment != nullptr, "null experiment")) return rc;
  int status = SDCNN_OK;
  const int rc =
      guarded([&] { status = finish_run(bench::run_holdout(experiment->value)); });
  return rc != SDCNN_OK ? rc : status;
}

int sdcnn_basis_dump(const sdcnn_experiment* experiment, const sdcnn_dataset* dataset,
                     const char* out_path) {
  if (int rc = require_arg(experiment && out_path, "null argument")) return rc;
  return guarded([&] {
    if (dataset != nullptr) {
      bench::basis_dump(experiment->value, dataset->value, out_path);
      return;
    }
    data::Dataset own = experiment->value.data.kind == bench::DataSource::Kind::Csv
                            ? io::load_dataset_csv(experiment->value.data.csv_path)
                            : data::generate_eggholder_dataset(
                                  experiment->value.data.grid);
    bench::basis_dump(experiment->value, own, out_path);
  });
}

/* ---- models ------------------------------------------------------------ */

int sdcnn_train(const sdcnn_experiment* experiment, const char* model_kind,
                sdcnn_model** out) {
  if (int rc = require_arg(experiment && model_kind && out, "null argument")) {
    return rc;
  }
  return guarded([&] {
    const models::ModelKind kind = models::model_kind_from_name(model_kind);
    *out = new sdcnn_model{bench::train_full(experiment->value, kind)};
  });
}

int sdcnn_model_save(sdcnn_model* model, const char* path) {
  if (int rc = require_arg(model && path, "null argument")) return rc;
  return guarded([&] { bench::save_model(model->value, path); });
}

int sdcnn_model_load(const char* path, sdcnn_model** out) {
  if (int rc = require_arg(path && out, "null argument")) return rc;
  return guarded([&] { *out = new sdcnn_model{bench::load_model(path)}; });
}

int sdcnn_model_kind(const sdcnn_model* model, char* buffer, size_t size) {
  if (int rc = require_arg(model && buffer && size > 0, "null argument")) return rc;
  const char* name = models::model_kind_name(model->value.kind);
  if (std::strlen(name) + 1 > size) {
    g_last_error = "buffer too small";
    return SDCNN_E_ARGUMENT;
  }
  std::strcpy(buffer, name);
  return SDCNN_OK;
}

void sdcnn_model_free(sdcnn_model* model) { delete model; }

int sdcnn_predict(sdcnn_model* model, const double* x1, const double* x2, int64_t n,
                  int64_t n_samples, uint64_t seed, sdcnn_samples** out) {
  if (int rc = require_arg(model && x1 && x2 && out, "null argument")) return rc;
  if (int rc = require_arg(n >= 1, "need at least one location")) return rc;
  return guarded([&] {
    std::vector<basis::Location> locs(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      locs[static_cast<size_t>(i)] = basis::Location{x1[i], x2[i]};
    }
    *out = new sdcnn_samples{model->value.predict(locs, n_samples, seed)};
  });
}

namespace {

void write_surface_for(bench::ModelBundle& bundle,
                       const std::vector<basis::Location>& locs, int64_t n_samples,
                       uint64_t seed, const char* out_path) {
  score::PredictiveSamples samples = bundle.predict(locs, n_samples, seed);
  std::vector<io::SurfaceRow> rows;
  rows.reserve(locs.size());
  for (int64_t i = 0; i < samples.n_locations; ++i) {
    rows.push_back({locs[static_cast<size_t>(i)].x1, locs[static_cast<size_t>(i)].x2,
                    samples.row_mean(i), samples.row_sd(i)});
  }
  io::write_surface_csv(rows, out_path);
}

}  // namespace

int sdcnn_predict_grid_csv(sdcnn_model* model, int64_t n_x1, int64_t n_x2,
                           int64_t n_samples, uint64_t seed, const char* out_path) {
  if (int rc = require_arg(model && out_path, "null argument")) return rc;
  return guarded([&] {
    data::GridSpec grid{n_x1, n_x2, model->value.scale_x1.min,
                        model->value.scale_x1.max, model->value.scale_x2.min,
                        model->value.scale_x2.max};
    write_surface_for(model->value, grid.points(), n_samples, seed, out_path);
  });
}

int sdcnn_predict_csv(sdcnn_model* model, const char* locations_csv,
                      int64_t n_samples, uint64_t seed, const char* out_path,
                      const char* samples_out_path) {
  if (int rc = require_arg(model && locations_csv && out_path, "null argument")) {
    return rc;
  }
  return guarded([&] {
    const data::Dataset dataset = io::load_dataset_csv(locations_csv);
    write_surface_for(model->value, dataset.locations, n_samples, seed, out_path);
    if (samples_out_path != nullptr) {
      score::PredictiveSamples samples =
          model->value.predict(dataset.locations, n_samples, seed);
      io::write_samples_csv(samples, dataset.responses, samples_out_path);
    }
  });
}

/* ---- predictive samples ------------------------------------------------ */

int sdcnn_samples_shape(const sdcnn_samples* samples, int64_t* out_n, int64_t* out_s) {
  if (int rc = require_arg(samples && out_n && out_s, "null argument")) return rc;
  *out_n = samples->value.n_locations;
  *out_s = samples->value.n_samples;
  return SDCNN_OK;
}

int sdcnn_samples_row(const sdcnn_samples* samples, int64_t index, double* out,
                      size_t capacity) {
  if (int rc = require_arg(samples && out, "null argument")) return rc;
  if (int rc = require_arg(index >= 0 && index < samples->value.n_locations,
                           "row index out of range")) {
    return rc;
  }
  if (int rc = require_arg(
          capacity >= static_cast<size_t>(samples->value.n_samples),
          "buffer too small")) {
    return rc;
  }
  std::memcpy(out, samples->value.row(index),
              static_cast<size_t>(samples->value.n_samples) * sizeof(double));
  return SDCNN_OK;
}

int sdcnn_samples_stats(const sdcnn_samples* samples, double* out_mean,
                        double* out_sd, size_t capacity) {
  if (int rc = require_arg(samples && out_mean && out_sd, "null argument")) return rc;
  if (int rc = require_arg(
          capacity >= static_cast<size_t>(samples->value.n_locations),
          "buffer too small")) {
    return rc;
  }
  for (int64_t i = 0; i < samples->value.n_locations; ++i) {
    out_mean[i] = samples->value.row_mean(i);
    out_sd[i] = samples->value.row_sd(i);
  }
  return SDCNN_OK;
}

void sdcnn_samples_free(sdcnn_samples* samples) { delete samples; }

/* ---- scoring ------------------------------------------------------------ */

int sdcnn_score_csv(const char* samples_csv, double alpha,
                    int standard_interval_score, const char* model_name,
                    const char* out_path) {
  if (int rc = require_arg(samples_csv && out_path, "null argument")) return rc;
  return guarded([&] {
    score::PredictiveSamples samples;
    std::vector<double> observed;
    io::load_samples_csv(samples_csv, samples, observed);
    for (double v : observed) {
      require(std::isfinite(v), ErrorCode::InvalidArgument,
              "scoring requires observed values for every row");
    }
    const score::ScoreReport report =
        score::score_report(samples, observed, alpha, standard_interval_score != 0);
    std::vector<io::ScoreRow> rows;
    rows.push_back({model_name != nullptr ? model_name : "model", "pooled",
                    report.mse, report.crps_mean, report.icr,
                    report.interval_score_mean});
    io::write_scores_csv(rows, out_path);
  });
}

} /* extern "C" */
