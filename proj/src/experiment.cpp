#include "sdcnn/experiment.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "sdcnn/serialize.hpp"

namespace sdcnn::bench {

using nlohmann::json;

namespace {

data::GridSpec parse_grid(const json& j, int64_t default_n, double default_lo,
                          double default_hi) {
  data::GridSpec grid;
  grid.n_x1 = j.value("n_x1", default_n);
  grid.n_x2 = j.value("n_x2", default_n);
  grid.x1_min = j.value("x1_min", default_lo);
  grid.x1_max = j.value("x1_max", default_hi);
  grid.x2_min = j.value("x2_min", default_lo);
  grid.x2_max = j.value("x2_max", default_hi);
  return grid;
}

basis::KernelKind parse_kernel(const std::string& name) {
  if (name == "gaussian") return basis::KernelKind::Gaussian;
  if (name == "wendland") return basis::KernelKind::Wendland;
  fail(ErrorCode::Parse, "unknown kernel: " + name);
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    fail(ErrorCode::Parse, std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  try {
    if (j.contains("data")) {
      const json& d = j["data"];
      const std::string source = d.value("source", "eggholder");
      if (source == "eggholder") {
        cfg.data.kind = DataSource::Kind::Eggholder;
        cfg.data.grid = parse_grid(d.value("grid", json::object()), 60, -500.0, 500.0);
      } else if (source == "csv") {
        cfg.data.kind = DataSource::Kind::Csv;
        cfg.data.csv_path = d.at("path").get<std::string>();
      } else {
        fail(ErrorCode::Parse, "unknown data source: " + source);
      }
    } else {
      cfg.data.grid = parse_grid(json::object(), 60, -500.0, 500.0);
    }

    cfg.model_kinds.clear();
    for (const auto& name : j.value("models", std::vector<std::string>{
                                                  "sdcnn", "deepkriging",
                                                  "baseline_dnn"})) {
      cfg.model_kinds.push_back(models::model_kind_from_name(name));
    }
    require(!cfg.model_kinds.empty(), ErrorCode::Parse, "no models configured");

    if (j.contains("model")) {
      const json& m = j["model"];
      cfg.model.hidden_width = m.value("hidden_width", int64_t{100});
      cfg.model.n_filters = m.value("n_filters", 128);
      cfg.model.dropout_rate = m.value("dropout_rate", 0.1);
    }

    if (j.contains("basis")) {
      const json& b = j["basis"];
      cfg.basis.num_resolutions = b.value("num_resolutions", 3);
      cfg.basis.base_knots_per_axis = b.value("base_knots_per_axis", 3);
      cfg.basis.growth_factor = b.value("growth_factor", 2);
      cfg.basis.margin_fraction = b.value("margin_fraction", 0.1);
      cfg.basis.scale_multiplier = b.value("scale_multiplier", 1.5);
      cfg.basis.kernel = parse_kernel(b.value("kernel", std::string("gaussian")));
      cfg.basis.squared_exponent = b.value("squared_exponent", false);
      cfg.basis.knot_budget = b.value("knot_budget", int64_t{4096});
    }

    if (j.contains("train")) {
      const json& t = j["train"];
      cfg.train.batch_size = t.value("batch_size", int64_t{256});
      cfg.train.max_epochs = t.value("max_epochs", int64_t{100});
      cfg.train.validation_fraction = t.value("validation_fraction", 0.2);
      cfg.train.patience = t.value("patience", int64_t{20});
      cfg.train.adam.learning_rate = t.value("learning_rate", 1e-3);
      cfg.train.lr_final_fraction = t.value("lr_final_fraction", 1.0);
      cfg.standardize_response = t.value("standardize_response", true);
    } else {
      cfg.train.batch_size = 256;
    }

    if (j.contains("cv")) cfg.cv_folds = j["cv"].value("folds", 5);
    if (j.contains("holdout")) {
      const auto rect = j["holdout"].value("rect", std::vector<double>{-100.0, 100.0,
                                                                       -100.0, 100.0});
      require(rect.size() == 4, ErrorCode::Parse,
              "holdout.rect must be [x1_lo, x1_hi, x2_lo, x2_hi]");
      cfg.holdout_rect = {rect[0], rect[1], rect[2], rect[3]};
    }

    cfg.n_mc_samples = j.value("n_mc_samples", int64_t{100});
    cfg.alpha = j.value("alpha", 0.05);
    cfg.standard_interval_score = j.value("standard_interval_score", false);
    const std::string point = j.value("point_prediction", std::string("sample_mean"));
    if (point == "sample_mean") {
      cfg.point_prediction_sample_mean = true;
    } else if (point == "dropout_off") {
      cfg.point_prediction_sample_mean = false;
    } else {
      fail(ErrorCode::Parse, "point_prediction must be sample_mean or dropout_off");
    }
    cfg.seed = j.value("seed", uint64_t{2024});
    cfg.out_dir = j.value("out_dir", std::string("out"));
    cfg.save_models = j.value("save_models", false);
    cfg.n_threads = j.value("threads", 0);
    if (j.contains("surface")) {
      // bounds default to the data bounding box, resolved at run time
      cfg.surface_grid = parse_grid(j["surface"], 60, std::nan(""), std::nan(""));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("bad config value: ") + e.what());
  }

  require(cfg.alpha > 0.0 && cfg.alpha < 1.0, ErrorCode::Parse,
          "alpha must lie in (0, 1)");
  require(cfg.n_mc_samples >= 1, ErrorCode::Parse, "n_mc_samples must be >= 1");
  require(cfg.cv_folds >= 2, ErrorCode::Parse, "cv.folds must be >= 2");
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

namespace {

data::Dataset load_source(const ExperimentConfig& config) {
  if (config.data.kind == DataSource::Kind::Eggholder) {
    return data::generate_eggholder_dataset(config.data.grid);
  }
  data::Dataset dataset = io::load_dataset_csv(config.data.csv_path);
  dataset.fit_scale();
  return dataset;
}

std::vector<basis::Location> scale_locations(const data::AxisScale& sx,
                                             const data::AxisScale& sy,
                                             const std::vector<basis::Location>& raw) {
  std::vector<basis::Location> out;
  out.reserve(raw.size());
  for (const auto& loc : raw) {
    out.push_back(basis::Location{sx.scale(loc.x1), sy.scale(loc.x2)});
  }
  return out;
}

}  // namespace

ModelBundle train_on(const ExperimentConfig& config, models::ModelKind kind,
                     const data::Dataset& dataset,
                     const std::vector<int64_t>& train_rows, uint64_t cell_seed) {
  require(!train_rows.empty(), ErrorCode::InvalidArgument, "no training rows");

  ModelBundle bundle;
  bundle.kind = kind;
  bundle.spec = config.model;
  bundle.spec.kind = kind;
  bundle.kernel = {config.basis.kernel, config.basis.squared_exponent};

  std::vector<basis::Location> raw;
  std::vector<double> y;
  raw.reserve(train_rows.size());
  y.reserve(train_rows.size());
  std::vector<double> x1s, x2s;
  for (int64_t r : train_rows) {
    const auto& loc = dataset.locations[static_cast<size_t>(r)];
    raw.push_back(loc);
    x1s.push_back(loc.x1);
    x2s.push_back(loc.x2);
    const double v = dataset.responses[static_cast<size_t>(r)];
    require(std::isfinite(v), ErrorCode::InvalidArgument,
            "training row has no response");
    y.push_back(v);
  }

  // Scaling state and basis layout come from the training rows only.
  bundle.scale_x1 = data::AxisScale::fit(x1s);
  bundle.scale_x2 = data::AxisScale::fit(x2s);
  const std::vector<basis::Location> scaled =
      scale_locations(bundle.scale_x1, bundle.scale_x2, raw);

  if (kind != models::ModelKind::BaselineDnn) {
    basis::BasisConfig bc = config.basis;
    bc.x1_min = 0.0;
    bc.x1_max = 1.0;
    bc.x2_min = 0.0;
    bc.x2_max = 1.0;
    bundle.resolutions = basis::build_resolutions(bc);
  }

  if (config.standardize_response) {
    const double n = static_cast<double>(y.size());
    double mu = 0.0;
    for (double v : y) mu += v;
    mu /= n;
    double ss = 0.0;
    for (double v : y) ss += (v - mu) * (v - mu);
    const double sigma = y.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    bundle.response_mu = mu;
    bundle.response_sigma = sigma > 0.0 ? sigma : 1.0;
  }
  std::vector<double> targets;
  targets.reserve(y.size());
  for (double v : y) {
    targets.push_back((v - bundle.response_mu) / bundle.response_sigma);
  }

  nn::BatchInputs inputs =
      models::assemble_inputs(kind, scaled, bundle.resolutions, bundle.kernel);

  Rng init_rng(derive_seed(cell_seed, "init"));
  bundle.graph = models::build_model(bundle.spec, bundle.resolutions, init_rng);

  Rng train_rng(derive_seed(cell_seed, "train"));
  bundle.train_result =
      nn::train(bundle.graph, inputs, targets, config.train, train_rng);
  return bundle;
}

ModelBundle train_full(const ExperimentConfig& config, models::ModelKind kind) {
  const data::Dataset dataset = load_source(config);
  const std::vector<int64_t> rows = dataset.observed_indices();
  require(!rows.empty(), ErrorCode::InvalidArgument, "data source has no responses");
  return train_on(config, kind, dataset, rows,
                  derive_seed(config.seed, std::string("full_") +
                                               models::model_kind_name(kind)));
}

score::PredictiveSamples ModelBundle::predict(
    const std::vector<basis::Location>& locations, int64_t n_samples,
    uint64_t seed) {
  const std::vector<basis::Location> scaled =
      scale_locations(scale_x1, scale_x2, locations);
  nn::BatchInputs inputs =
      models::assemble_inputs(kind, scaled, resolutions, kernel);
  Rng rng(seed);
  score::PredictiveSamples samples =
      models::mc_predict(graph, inputs, n_samples, rng);
  for (double& v : samples.values) v = response_mu + response_sigma * v;
  return samples;
}

std::vector<double> ModelBundle::predict_mean(
    const std::vector<basis::Location>& locations) {
  const std::vector<basis::Location> scaled =
      scale_locations(scale_x1, scale_x2, locations);
  nn::BatchInputs inputs =
      models::assemble_inputs(kind, scaled, resolutions, kernel);
  std::vector<double> out = models::predict_mean(graph, inputs);
  for (double& v : out) v = response_mu + response_sigma * v;
  return out;
}

namespace {

struct Cell {
  models::ModelKind kind;
  int model_index = 0;
  int fold = 0;  // -1 for the holdout cell
  std::vector<int64_t> train_rows, test_rows;
  bool keep_bundle = false;
};

struct CellResult {
  bool ok = false;
  std::string diagnostic;
  score::ScoreReport report;
  score::PredictiveSamples samples;
  std::vector<int64_t> test_rows;
  std::unique_ptr<ModelBundle> bundle;
};

CellResult run_cell(const ExperimentConfig& config, const data::Dataset& dataset,
                    const Cell& cell) {
  CellResult result;
  result.test_rows = cell.test_rows;
  try {
    const uint64_t cell_seed =
        derive_seed(config.seed, static_cast<uint64_t>(cell.model_index),
                    static_cast<uint64_t>(cell.fold + 1));
    auto bundle = std::make_unique<ModelBundle>(
        train_on(config, cell.kind, dataset, cell.train_rows, cell_seed));

    std::vector<basis::Location> test_locs;
    std::vector<double> obs;
    for (int64_t r : cell.test_rows) {
      test_locs.push_back(dataset.locations[static_cast<size_t>(r)]);
      obs.push_back(dataset.responses[static_cast<size_t>(r)]);
    }
    result.samples = bundle->predict(test_locs, config.n_mc_samples,
                                     derive_seed(cell_seed, "mc"));
    result.samples.location_ids = cell.test_rows;

    result.report = score::score_report(result.samples, obs, config.alpha,
                                        config.standard_interval_score);
    if (!config.point_prediction_sample_mean) {
      std::vector<double> means = bundle->predict_mean(test_locs);
      result.report.mse = score::mse(means, obs);
      for (size_t i = 0; i < means.size(); ++i) {
        result.report.per_location[i].pred_mean = means[i];
      }
    }
    if (cell.keep_bundle) result.bundle = std::move(bundle);
    result.ok = true;
  } catch (const std::exception& e) {
    result.diagnostic = e.what();
  }
  return result;
}

std::string fold_label(int fold) {
  return fold < 0 ? "holdout" : std::to_string(fold);
}

void append_rows(RunResult& out, const ExperimentConfig& config,
                 const data::Dataset& dataset, const std::string& model,
                 const std::string& fold, const score::ScoreReport& report) {
  out.score_rows.push_back({model, fold, report.mse, report.crps_mean, report.icr,
                            report.interval_score_mean});
  for (const auto& loc : report.per_location) {
    io::PerLocationRow row;
    row.model = model;
    row.fold = fold;
    row.location_id = loc.location_id;
    row.x1 = dataset.locations[static_cast<size_t>(loc.location_id)].x1;
    row.x2 = dataset.locations[static_cast<size_t>(loc.location_id)].x2;
    row.observed = loc.observed;
    row.pred_mean = loc.pred_mean;
    row.pred_sd = loc.pred_sd;
    row.crps = loc.crps;
    row.interval_score = loc.interval_score;
    row.covered = loc.covered ? 1 : 0;
    out.per_location_rows.push_back(row);
  }
  (void)config;
}

void export_surface(const ExperimentConfig& config, const data::Dataset& dataset,
                    ModelBundle& bundle, const std::string& path) {
  data::GridSpec grid = *config.surface_grid;
  if (!std::isfinite(grid.x1_min)) {
    // default to the data bounding box
    std::vector<double> x1s, x2s;
    for (const auto& loc : dataset.locations) {
      x1s.push_back(loc.x1);
      x2s.push_back(loc.x2);
    }
    const auto sx1 = data::AxisScale::fit(x1s);
    const auto sx2 = data::AxisScale::fit(x2s);
    grid.x1_min = sx1.min;
    grid.x1_max = sx1.max;
    grid.x2_min = sx2.min;
    grid.x2_max = sx2.max;
  }
  const std::vector<basis::Location> pts = grid.points();
  score::PredictiveSamples samples = bundle.predict(
      pts, config.n_mc_samples, derive_seed(config.seed, "surface"));
  std::vector<io::SurfaceRow> rows;
  rows.reserve(pts.size());
  for (int64_t i = 0; i < samples.n_locations; ++i) {
    rows.push_back({pts[static_cast<size_t>(i)].x1, pts[static_cast<size_t>(i)].x2,
                    samples.row_mean(i), samples.row_sd(i)});
  }
  io::write_surface_csv(rows, path);
}

RunResult run_cells(const ExperimentConfig& config, const data::Dataset& dataset,
                    const std::vector<Cell>& cells) {
  std::vector<CellResult> results(cells.size());

  int n_threads = config.n_threads > 0
                      ? config.n_threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(cells.size())));

  // Each cell owns a seeded substream, so results do not depend on scheduling.
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      results[i] = run_cell(config, dataset, cells[i]);
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::filesystem::create_directories(config.out_dir);

  RunResult out;
  // Ordered merge: cells are already in (model, fold) order.
  for (size_t mi = 0; mi < config.model_kinds.size(); ++mi) {
    const std::string model = models::model_kind_name(config.model_kinds[mi]);

    // Pooled samples across this model's completed folds.
    std::vector<const CellResult*> model_cells;
    for (size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].model_index != static_cast<int>(mi)) continue;
      const CellResult& r = results[i];
      if (!r.ok) {
        out.all_ok = false;
        out.diagnostics.push_back(model + " fold " + fold_label(cells[i].fold) +
                                  ": " + r.diagnostic);
        continue;
      }
      append_rows(out, config, dataset, model, fold_label(cells[i].fold), r.report);
      model_cells.push_back(&r);
    }

    const bool pool_folds = cells.size() > config.model_kinds.size();
    if (pool_folds && !model_cells.empty()) {
      score::PredictiveSamples pooled;
      std::vector<double> pooled_obs;
      pooled.n_samples = config.n_mc_samples;
      for (const CellResult* r : model_cells) {
        pooled.values.insert(pooled.values.end(), r->samples.values.begin(),
                             r->samples.values.end());
        pooled.location_ids.insert(pooled.location_ids.end(),
                                   r->samples.location_ids.begin(),
                                   r->samples.location_ids.end());
        for (int64_t t : r->test_rows) {
          pooled_obs.push_back(dataset.responses[static_cast<size_t>(t)]);
        }
      }
      pooled.n_locations = static_cast<int64_t>(pooled.location_ids.size());
      score::ScoreReport pooled_report = score::score_report(
          pooled, pooled_obs, config.alpha, config.standard_interval_score);
      out.score_rows.push_back({model, "pooled", pooled_report.mse,
                                pooled_report.crps_mean, pooled_report.icr,
                                pooled_report.interval_score_mean});
    }
  }

  // Surfaces and saved models from the cells that kept their bundle.
  for (size_t i = 0; i < cells.size(); ++i) {
    if (!results[i].ok || !results[i].bundle) continue;
    const std::string model = models::model_kind_name(cells[i].kind);
    if (config.surface_grid.has_value()) {
      try {
        export_surface(config, dataset, *results[i].bundle,
                       config.out_dir + "/surface_" + model + ".csv");
      } catch (const std::exception& e) {
        out.all_ok = false;
        out.diagnostics.push_back(model + " surface: " + e.what());
      }
    }
    if (config.save_models) {
      save_model(*results[i].bundle, config.out_dir + "/model_" + model + "_fold" +
                                         fold_label(cells[i].fold) + ".bin");
    }
  }

  io::write_scores_csv(out.score_rows, config.out_dir + "/scores.csv");
  io::write_per_location_csv(out.per_location_rows,
                             config.out_dir + "/per_location_scores.csv");
  return out;
}

}  // namespace

RunResult run_cv(const ExperimentConfig& config) {
  const data::Dataset dataset = load_source(config);
  const std::vector<int64_t> observed = dataset.observed_indices();
  require(static_cast<int64_t>(observed.size()) >= config.cv_folds,
          ErrorCode::InvalidArgument, "not enough observations for k folds");

  const data::FoldSplit split = data::kfold_split(
      static_cast<int64_t>(observed.size()), config.cv_folds, config.seed);

  std::vector<Cell> cells;
  for (size_t mi = 0; mi < config.model_kinds.size(); ++mi) {
    for (int fold = 0; fold < config.cv_folds; ++fold) {
      Cell cell;
      cell.kind = config.model_kinds[mi];
      cell.model_index = static_cast<int>(mi);
      cell.fold = fold;
      for (int64_t i : split.train_indices(fold)) {
        cell.train_rows.push_back(observed[static_cast<size_t>(i)]);
      }
      for (int64_t i : split.test_indices(fold)) {
        cell.test_rows.push_back(observed[static_cast<size_t>(i)]);
      }
      cell.keep_bundle =
          config.save_models || (fold == 0 && config.surface_grid.has_value());
      cells.push_back(std::move(cell));
    }
  }
  return run_cells(config, dataset, cells);
}

RunResult run_holdout(const ExperimentConfig& config) {
  const data::Dataset dataset = load_source(config);
  const data::HoldoutSplit split =
      data::rectangle_holdout(dataset, config.holdout_rect);

  std::vector<Cell> cells;
  for (size_t mi = 0; mi < config.model_kinds.size(); ++mi) {
    Cell cell;
    cell.kind = config.model_kinds[mi];
    cell.model_index = static_cast<int>(mi);
    cell.fold = -1;
    cell.train_rows = split.train_indices;
    cell.test_rows = split.test_indices;
    cell.keep_bundle = config.save_models || config.surface_grid.has_value();
    cells.push_back(std::move(cell));
  }
  return run_cells(config, dataset, cells);
}

void basis_dump(const ExperimentConfig& config, const data::Dataset& dataset,
                const std::string& out_path) {
  require(dataset.size() > 0, ErrorCode::InvalidArgument, "no locations to dump");
  std::vector<double> x1s, x2s;
  for (const auto& loc : dataset.locations) {
    x1s.push_back(loc.x1);
    x2s.push_back(loc.x2);
  }
  const auto sx1 = data::AxisScale::fit(x1s);
  const auto sx2 = data::AxisScale::fit(x2s);

  basis::BasisConfig bc = config.basis;
  bc.x1_min = 0.0;
  bc.x1_max = 1.0;
  bc.x2_min = 0.0;
  bc.x2_max = 1.0;
  const std::vector<basis::Resolution> resolutions = basis::build_resolutions(bc);
  const basis::KernelSpec kernel{config.basis.kernel, config.basis.squared_exponent};

  std::vector<io::BasisDumpRow> rows;
  for (int64_t i = 0; i < dataset.size(); ++i) {
    const basis::Location scaled{
        sx1.scale(dataset.locations[static_cast<size_t>(i)].x1),
        sx2.scale(dataset.locations[static_cast<size_t>(i)].x2)};
    for (const auto& res : resolutions) {
      const basis::BasisImage image = basis::evaluate_basis_image(scaled, res, kernel);
      for (int r = 0; r < res.rows; ++r) {
        for (int c = 0; c < res.cols; ++c) {
          rows.push_back({i, res.level, r, c,
                          image.values.values[static_cast<size_t>(r * res.cols + c)]});
        }
      }
    }
  }
  io::write_basis_dump_csv(rows, out_path);
}

}  // namespace sdcnn::bench
