/* C API for the spatial prediction toolkit. All functions return SDCNN_OK on
 * success or a nonzero error code; sdcnn_last_error() describes the most
 * recent failure on the calling thread. Every *_new/*_load output handle is
 * owned by the caller and released with the matching *_free. */

#ifndef SDCNN_C_H
#define SDCNN_C_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum sdcnn_status {
  SDCNN_OK = 0,
  SDCNN_E_ARGUMENT = 1,
  SDCNN_E_IO = 2,
  SDCNN_E_PARSE = 3,
  SDCNN_E_NUMERIC = 4,
  SDCNN_E_INTERNAL = 5,
};

typedef struct sdcnn_dataset sdcnn_dataset;
typedef struct sdcnn_experiment sdcnn_experiment;
typedef struct sdcnn_model sdcnn_model;
typedef struct sdcnn_samples sdcnn_samples;

const char* sdcnn_version(void);

/* Message for the last failing call on this thread; empty string if none. */
const char* sdcnn_last_error(void);

/* ---- datasets -------------------------------------------------------- */

int sdcnn_dataset_eggholder(int64_t n_x1, int64_t n_x2, double x1_min,
                            double x1_max, double x2_min, double x2_max,
                            sdcnn_dataset** out);
int sdcnn_dataset_load_csv(const char* path, sdcnn_dataset** out);
int sdcnn_dataset_write_csv(const sdcnn_dataset* dataset, const char* path);
int sdcnn_dataset_size(const sdcnn_dataset* dataset, int64_t* out_n);
int sdcnn_dataset_row(const sdcnn_dataset* dataset, int64_t index,
                      double* out_x1, double* out_x2, double* out_y);
void sdcnn_dataset_free(sdcnn_dataset* dataset);

/* ---- experiment configuration ---------------------------------------- */

int sdcnn_experiment_load(const char* path, sdcnn_experiment** out);
int sdcnn_experiment_parse(const char* json_text, sdcnn_experiment** out);
int sdcnn_experiment_set_seed(sdcnn_experiment* experiment, uint64_t seed);
int sdcnn_experiment_set_out_dir(sdcnn_experiment* experiment, const char* dir);
void sdcnn_experiment_free(sdcnn_experiment* experiment);

/* ---- experiment runs (outputs written under the config's out_dir) ----- */

int sdcnn_run_cv(const sdcnn_experiment* experiment);
int sdcnn_run_holdout(const sdcnn_experiment* experiment);

/* Basis images for every location of `dataset` (or, when NULL, of the
 * experiment's own data source), dumped as CSV. */
int sdcnn_basis_dump(const sdcnn_experiment* experiment,
                     const sdcnn_dataset* dataset, const char* out_path);

/* ---- models ----------------------------------------------------------- */

/* Trains `model_kind` ("baseline_dnn" | "deepkriging" | "sdcnn") on all
 * observed rows of the experiment's data source. */
int sdcnn_train(const sdcnn_experiment* experiment, const char* model_kind,
                sdcnn_model** out);
int sdcnn_model_save(sdcnn_model* model, const char* path);
int sdcnn_model_load(const char* path, sdcnn_model** out);
int sdcnn_model_kind(const sdcnn_model* model, char* buffer, size_t size);
void sdcnn_model_free(sdcnn_model* model);

/* Monte-Carlo predictive samples for raw-coordinate locations. */
int sdcnn_predict(sdcnn_model* model, const double* x1, const double* x2,
                  int64_t n, int64_t n_samples, uint64_t seed,
                  sdcnn_samples** out);

/* Mean/sd surface for a grid over the model's training bounds, written as
 * CSV (x1, x2, mean, sd). */
int sdcnn_predict_grid_csv(sdcnn_model* model, int64_t n_x1, int64_t n_x2,
                           int64_t n_samples, uint64_t seed, const char* out_path);

/* Mean/sd surface for the locations of a CSV file (columns x1, x2[, y]);
 * optional full sample dump compatible with sdcnn_score_csv. */
int sdcnn_predict_csv(sdcnn_model* model, const char* locations_csv,
                      int64_t n_samples, uint64_t seed, const char* out_path,
                      const char* samples_out_path /* nullable */);

/* ---- predictive samples ----------------------------------------------- */

int sdcnn_samples_shape(const sdcnn_samples* samples, int64_t* out_n,
                        int64_t* out_s);
int sdcnn_samples_row(const sdcnn_samples* samples, int64_t index, double* out,
                      size_t capacity);
int sdcnn_samples_stats(const sdcnn_samples* samples, double* out_mean,
                        double* out_sd, size_t capacity);
void sdcnn_samples_free(sdcnn_samples* samples);

/* ---- scoring ---------------------------------------------------------- */

/* Scores a wide samples CSV (location_id, observed, s...) and writes a
 * scores.csv-style table. `standard_interval_score` nonzero switches the
 * interval-score penalty coefficient from alpha/2 to 2/alpha. */
int sdcnn_score_csv(const char* samples_csv, double alpha,
                    int standard_interval_score, const char* model_name,
                    const char* out_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SDCNN_C_H */
