// Command-line front end. Everything goes through the C API in sdcnn_c.h.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "sdcnn/sdcnn_c.h"

namespace {

int report(int rc, const char* what) {
  if (rc != SDCNN_OK) {
    std::fprintf(stderr, "error: %s: %s\n", what, sdcnn_last_error());
  }
  return rc;
}

struct ExperimentGuard {
  sdcnn_experiment* handle = nullptr;
  ~ExperimentGuard() { sdcnn_experiment_free(handle); }
};

int open_experiment(const std::string& config_path, bool has_seed, uint64_t seed,
                    const std::string& out_dir, ExperimentGuard& guard) {
  if (int rc = report(sdcnn_experiment_load(config_path.c_str(), &guard.handle),
                      "loading config")) {
    return rc;
  }
  if (has_seed) sdcnn_experiment_set_seed(guard.handle, seed);
  if (!out_dir.empty()) sdcnn_experiment_set_out_dir(guard.handle, out_dir.c_str());
  return SDCNN_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial prediction toolkit: multi-resolution basis images, "
               "convolutional and dense spatial models, Monte-Carlo dropout "
               "uncertainty and proper scoring"};
  app.require_subcommand(1);

  // ---- eggholder-gen ----
  auto* gen = app.add_subcommand("eggholder-gen",
                                 "Generate an Eggholder benchmark dataset CSV");
  int64_t gen_nx = 60, gen_ny = 60;
  std::vector<double> gen_bounds{-500.0, 500.0, -500.0, 500.0};
  std::string gen_out = "eggholder.csv";
  gen->add_option("--nx", gen_nx, "grid points along x1");
  gen->add_option("--ny", gen_ny, "grid points along x2");
  gen->add_option("--bounds", gen_bounds, "x1_min x1_max x2_min x2_max")
      ->expected(4);
  gen->add_option("--out", gen_out, "output CSV path");

  // ---- basis dump ----
  auto* basis_cmd = app.add_subcommand("basis", "Basis-function utilities");
  basis_cmd->require_subcommand(1);
  auto* dump = basis_cmd->add_subcommand(
      "dump", "Write basis images for a location list as CSV");
  std::string dump_config, dump_locations, dump_out = "basis.csv";
  dump->add_option("--config", dump_config, "experiment config JSON")->required();
  dump->add_option("--locations", dump_locations,
                   "locations CSV (default: the config's data source)");
  dump->add_option("--out", dump_out, "output CSV path");

  // ---- train ----
  auto* train_cmd =
      app.add_subcommand("train", "Train one model on the config's full data");
  std::string train_config, train_model_kind = "sdcnn", train_out = "model.bin";
  uint64_t train_seed = 0;
  bool train_has_seed = false;
  train_cmd->add_option("--config", train_config, "experiment config JSON")
      ->required();
  train_cmd->add_option("--model", train_model_kind,
                        "baseline_dnn | deepkriging | sdcnn");
  train_cmd->add_option("--out", train_out, "model file path");
  train_cmd->add_option("--seed", train_seed, "override the config seed")
      ->each([&](const std::string&) { train_has_seed = true; });

  // ---- predict ----
  auto* predict_cmd =
      app.add_subcommand("predict", "Predict a surface from a trained model");
  std::string predict_model, predict_locations, predict_out = "surface.csv";
  std::string predict_samples_out;
  std::vector<int64_t> predict_grid;
  int64_t predict_samples = 100;
  uint64_t predict_seed = 7;
  predict_cmd->add_option("--model", predict_model, "model file")->required();
  predict_cmd->add_option("--locations", predict_locations,
                          "locations CSV (x1,x2[,y])");
  predict_cmd
      ->add_option("--grid", predict_grid,
                   "n_x1 n_x2 grid over the model's training bounds")
      ->expected(2);
  predict_cmd->add_option("--samples", predict_samples, "MC samples per location");
  predict_cmd->add_option("--seed", predict_seed, "prediction RNG seed");
  predict_cmd->add_option("--out", predict_out, "surface CSV (x1,x2,mean,sd)");
  predict_cmd->add_option("--samples-out", predict_samples_out,
                          "optional full predictive-sample CSV");

  // ---- cv / holdout ----
  std::string cv_config, cv_out_dir;
  uint64_t cv_seed = 0;
  bool cv_has_seed = false;
  auto* cv_cmd = app.add_subcommand("cv", "K-fold cross-validation run");
  cv_cmd->add_option("--config", cv_config, "experiment config JSON")->required();
  cv_cmd->add_option("--seed", cv_seed, "override the config seed")
      ->each([&](const std::string&) { cv_has_seed = true; });
  cv_cmd->add_option("--out-dir", cv_out_dir, "override the config out_dir");

  std::string ho_config, ho_out_dir;
  uint64_t ho_seed = 0;
  bool ho_has_seed = false;
  auto* ho_cmd = app.add_subcommand("holdout", "Missing-rectangle run");
  ho_cmd->add_option("--config", ho_config, "experiment config JSON")->required();
  ho_cmd->add_option("--seed", ho_seed, "override the config seed")
      ->each([&](const std::string&) { ho_has_seed = true; });
  ho_cmd->add_option("--out-dir", ho_out_dir, "override the config out_dir");

  // ---- score ----
  auto* score_cmd =
      app.add_subcommand("score", "Score a predictive-sample CSV against its "
                                  "observed column");
  std::string score_samples, score_out = "scores.csv", score_model_name = "model";
  double score_alpha = 0.05;
  bool score_standard_is = false;
  score_cmd->add_option("--samples", score_samples, "samples CSV")->required();
  score_cmd->add_option("--alpha", score_alpha, "credible level alpha");
  score_cmd->add_flag("--standard-interval-score", score_standard_is,
                      "use the 2/alpha interval-score penalty");
  score_cmd->add_option("--model-name", score_model_name, "label for the output row");
  score_cmd->add_option("--out", score_out, "output scores CSV");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    sdcnn_dataset* dataset = nullptr;
    if (int rc = report(sdcnn_dataset_eggholder(gen_nx, gen_ny, gen_bounds[0],
                                                gen_bounds[1], gen_bounds[2],
                                                gen_bounds[3], &dataset),
                        "generating dataset")) {
      return rc;
    }
    const int rc =
        report(sdcnn_dataset_write_csv(dataset, gen_out.c_str()), "writing CSV");
    sdcnn_dataset_free(dataset);
    if (rc == SDCNN_OK) std::printf("wrote %s\n", gen_out.c_str());
    return rc;
  }

  if (dump->parsed()) {
    ExperimentGuard experiment;
    if (int rc = open_experiment(dump_config, false, 0, "", experiment)) return rc;
    sdcnn_dataset* dataset = nullptr;
    if (!dump_locations.empty()) {
      if (int rc = report(sdcnn_dataset_load_csv(dump_locations.c_str(), &dataset),
                          "loading locations")) {
        return rc;
      }
    }
    const int rc = report(
        sdcnn_basis_dump(experiment.handle, dataset, dump_out.c_str()), "basis dump");
    sdcnn_dataset_free(dataset);
    if (rc == SDCNN_OK) std::printf("wrote %s\n", dump_out.c_str());
    return rc;
  }

  if (train_cmd->parsed()) {
    ExperimentGuard experiment;
    if (int rc = open_experiment(train_config, train_has_seed, train_seed, "",
                                 experiment)) {
      return rc;
    }
    sdcnn_model* model = nullptr;
    if (int rc = report(
            sdcnn_train(experiment.handle, train_model_kind.c_str(), &model),
            "training")) {
      return rc;
    }
    const int rc = report(sdcnn_model_save(model, train_out.c_str()), "saving model");
    sdcnn_model_free(model);
    if (rc == SDCNN_OK) std::printf("wrote %s\n", train_out.c_str());
    return rc;
  }

  if (predict_cmd->parsed()) {
    if (predict_locations.empty() == predict_grid.empty()) {
      std::fprintf(stderr, "error: pass exactly one of --locations or --grid\n");
      return SDCNN_E_ARGUMENT;
    }
    sdcnn_model* model = nullptr;
    if (int rc = report(sdcnn_model_load(predict_model.c_str(), &model),
                        "loading model")) {
      return rc;
    }
    int rc;
    if (!predict_grid.empty()) {
      rc = report(sdcnn_predict_grid_csv(model, predict_grid[0], predict_grid[1],
                                         predict_samples, predict_seed,
                                         predict_out.c_str()),
                  "predicting");
    } else {
      rc = report(sdcnn_predict_csv(model, predict_locations.c_str(), predict_samples,
                                    predict_seed, predict_out.c_str(),
                                    predict_samples_out.empty()
                                        ? nullptr
                                        : predict_samples_out.c_str()),
                  "predicting");
    }
    sdcnn_model_free(model);
    if (rc == SDCNN_OK) std::printf("wrote %s\n", predict_out.c_str());
    return rc;
  }

  if (cv_cmd->parsed()) {
    ExperimentGuard experiment;
    if (int rc = open_experiment(cv_config, cv_has_seed, cv_seed, cv_out_dir,
                                 experiment)) {
      return rc;
    }
    return report(sdcnn_run_cv(experiment.handle), "cv run");
  }

  if (ho_cmd->parsed()) {
    ExperimentGuard experiment;
    if (int rc = open_experiment(ho_config, ho_has_seed, ho_seed, ho_out_dir,
                                 experiment)) {
      return rc;
    }
    return report(sdcnn_run_holdout(experiment.handle), "holdout run");
  }

  if (score_cmd->parsed()) {
    const int rc = report(
        sdcnn_score_csv(score_samples.c_str(), score_alpha, score_standard_is ? 1 : 0,
                        score_model_name.c_str(), score_out.c_str()),
        "scoring");
    if (rc == SDCNN_OK) std::printf("wrote %s\n", score_out.c_str());
    return rc;
  }

  return 0;
}
