// Acceptance suite. Runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion; the exit code is the number of
// failures. The Eggholder desk runs dominate the runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sdcnn/experiment.hpp"

using namespace sdcnn;

namespace {

int g_failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string out_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("sdcnn_acceptance_" + name);
  std::filesystem::remove_all(p);
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void fill_uniform(Tensor& t, Rng& rng, double lo, double hi) {
  for (double& v : t.values) v = rng.uniform(lo, hi);
}

// ---- criterion: gradient oracle -------------------------------------------

double fd_on_architecture(models::ModelKind kind, int64_t n_checks) {
  basis::BasisConfig basis_config;  // paper defaults: 3x3, 6x6, 12x12
  auto resolutions = basis::build_resolutions(basis_config);
  models::ModelSpec spec;  // paper defaults: N_h=100, n_F=128, p=0.1
  spec.kind = kind;
  Rng init(derive_seed(501, static_cast<uint64_t>(kind)));
  nn::NetworkGraph graph = models::build_model(spec, resolutions, init);
  Rng jitter(derive_seed(801, static_cast<uint64_t>(kind)));
  oracle::jitter_parameters(graph, jitter, 0.02);

  Rng data(73);
  std::vector<basis::Location> locs;
  for (int i = 0; i < 4; ++i) locs.push_back({data.uniform(0, 1), data.uniform(0, 1)});
  nn::BatchInputs inputs = models::assemble_inputs(kind, locs, resolutions, {});

  Rng mask(derive_seed(601, static_cast<uint64_t>(kind)));
  Rng pick(derive_seed(701, static_cast<uint64_t>(kind)));
  Tensor targets = oracle::self_targets(graph, inputs, nn::Mode::Train, mask, pick);
  return oracle::fd_gradient_check(graph, inputs, targets, nn::Mode::Train, mask,
                                   pick, n_checks)
      .max_rel_err;
}

double fd_on_layer_zoo() {
  // conv + flatten + dense(relu/sigmoid/identity) + batchnorm + dropout,
  // all in one small two-branch graph
  Rng init(19);
  nn::NetworkGraph graph;
  nn::Branch image_branch;
  image_branch.input = nn::InputKind::BasisImage;
  image_branch.resolution_index = 0;
  auto conv = std::make_unique<nn::Conv2dLayer>(4);
  fill_uniform(conv->filters, init, -0.8, 0.8);
  fill_uniform(conv->bias, init, -0.1, 0.1);
  image_branch.layers.push_back(std::move(conv));
  image_branch.layers.push_back(std::make_unique<nn::FlattenLayer>());
  auto d1 = std::make_unique<nn::DenseLayer>(4 * 4 * 4, 7, nn::Activation::ReLU);
  fill_uniform(d1->weights, init, -0.5, 0.5);
  image_branch.layers.push_back(std::move(d1));
  image_branch.layers.push_back(std::make_unique<nn::BatchNormLayer>(7));
  graph.branches.push_back(std::move(image_branch));

  nn::Branch coords_branch;
  coords_branch.input = nn::InputKind::Coords;
  coords_branch.layers.push_back(std::make_unique<nn::DropoutLayer>(0.2));
  auto d2 = std::make_unique<nn::DenseLayer>(2, 7, nn::Activation::Sigmoid);
  fill_uniform(d2->weights, init, -0.8, 0.8);
  coords_branch.layers.push_back(std::move(d2));
  graph.branches.push_back(std::move(coords_branch));

  graph.head.push_back(std::make_unique<nn::DropoutLayer>(0.1));
  auto out = std::make_unique<nn::DenseLayer>(14, 1, nn::Activation::Identity);
  fill_uniform(out->weights, init, -0.5, 0.5);
  graph.head.push_back(std::move(out));

  Rng data(55);
  nn::BatchInputs inputs;
  inputs.coords = Tensor::zeros({5, 2});
  fill_uniform(inputs.coords, data, -1.0, 1.0);
  inputs.basis_images.push_back(Tensor::zeros({5, 5, 5}));
  fill_uniform(inputs.basis_images[0], data, 0.0, 1.0);
  Tensor targets = Tensor::zeros({5});
  fill_uniform(targets, data, -1.0, 1.0);

  Rng mask(9), pick(10);
  return oracle::fd_gradient_check(graph, inputs, targets, nn::Mode::Train, mask,
                                   pick, 40)
      .max_rel_err;
}

void criterion_gradient_oracle() {
  const auto start = std::chrono::steady_clock::now();
  double worst = fd_on_layer_zoo();
  worst = std::max(worst, fd_on_architecture(models::ModelKind::BaselineDnn, 25));
  worst = std::max(worst, fd_on_architecture(models::ModelKind::DeepKriging, 25));
  worst = std::max(worst, fd_on_architecture(models::ModelKind::Sdcnn, 25));
  const double secs = elapsed_s(start);
  report(worst < 1e-4 && secs < 60.0, "gradient-oracle",
         "max relative error " + fmt(worst) + " (tolerance 1e-4), " + fmt(secs) +
             "s (budget 60s)");
}

// ---- criterion: convolution oracle ----------------------------------------

void criterion_conv_oracle() {
  Rng rng(20240501);
  int64_t mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int64_t n = 2 + rng.index(11), m = 2 + rng.index(11);
    nn::Conv2dLayer layer(128);
    for (double& v : layer.filters.values) v = rng.uniform(-1, 1);
    for (double& v : layer.bias.values) v = rng.uniform(-1, 1);
    Tensor image = Tensor::zeros({n, m});
    for (double& v : image.values) v = rng.uniform(-2, 2);

    nn::ForwardCtx ctx;
    Tensor got = layer.forward(image, ctx);
    Tensor want = oracle::conv2d_reference(image, layer.filters, layer.bias);
    for (size_t i = 0; i < got.values.size(); ++i) {
      if (got.values[i] != want.values[i]) ++mismatches;
    }
  }
  report(mismatches == 0, "convolution-oracle",
         "50 random cases (n,m <= 12, 128 filters), " + std::to_string(mismatches) +
             " bitwise mismatches");
}

// ---- criterion: CRPS oracle -------------------------------------------------

void criterion_crps_oracle() {
  Rng rng(887);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int64_t s = 1 + rng.index(200);
    std::vector<double> samples(static_cast<size_t>(s));
    for (double& v : samples) v = rng.uniform(-10, 10);
    const double obs = rng.uniform(-12, 12);
    worst = std::max(worst, std::abs(score::crps_empirical(samples, obs) -
                                     oracle::crps_bruteforce(samples, obs)));
  }
  const bool pinned = score::crps_empirical({0.0, 1.0}, 0.0) == -0.25;
  report(worst < 1e-12 && pinned, "crps-oracle",
         "max |fast - double sum| = " + fmt(worst) +
             " (tolerance 1e-12); {0,1}/obs=0 = " +
             fmt(score::crps_empirical({0.0, 1.0}, 0.0)) + " (want -0.25)");
}

// ---- criterion: basis properties --------------------------------------------

void criterion_basis_properties() {
  bool ok = true;
  std::string detail;

  ok &= basis::wendland_rbf(0.0) == 1.0;
  ok &= basis::wendland_rbf(1.0) == 0.0;
  for (double r = 1.0; r <= 3.0; r += 0.125) ok &= basis::wendland_rbf(r) == 0.0;
  double prev = basis::wendland_rbf(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double v = basis::wendland_rbf(1.2 * i / 1000.0);
    if (v > prev) ok = false;
    prev = v;
  }

  Rng rng(31);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const basis::Location s{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const basis::Location c{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const double sigma = rng.uniform(0.2, 2.0);
    const double v = basis::gaussian_rbf(s, c, sigma);
    worst = std::max(worst, std::abs(v - basis::gaussian_rbf(c, s, sigma)));
    const double dx = rng.uniform(-3, 3), dy = rng.uniform(-3, 3);
    const basis::Location s2{s.x1 + dx, s.x2 + dy}, c2{c.x1 + dx, c.x2 + dy};
    worst = std::max(worst, std::abs(v - basis::gaussian_rbf(s2, c2, sigma)));
  }
  ok &= worst < 1e-12;
  report(ok, "basis-properties",
         "wendland endpoints/support/monotonicity ok; gaussian symmetry and "
         "translation drift " +
             fmt(worst) + " (tolerance 1e-12)");
}

// ---- criterion: calibration sanity ------------------------------------------

void criterion_calibration() {
  Rng rng(515151);
  auto normal = [&rng]() {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  score::PredictiveSamples samples;
  samples.n_locations = 1000;
  samples.n_samples = 500;
  samples.values.reserve(500000);
  std::vector<double> obs;
  for (int64_t i = 0; i < 1000; ++i) {
    samples.location_ids.push_back(i);
    for (int64_t s = 0; s < 500; ++s) samples.values.push_back(normal());
    obs.push_back(normal());
  }
  const double cover = score::icr(samples, obs, 0.05);
  report(cover >= 0.92 && cover <= 0.98, "calibration-sanity",
         "ICR(0.05) on iid N(0,1) = " + fmt(cover) + " (band [0.92, 0.98])");
}

// ---- criterion: interval score formula ---------------------------------------

void criterion_interval_score() {
  const double paper = score::interval_score_bounds(0.0, 1.0, 2.0, 0.05, false);
  const double standard = score::interval_score_bounds(0.0, 1.0, 2.0, 0.05, true);
  report(std::abs(paper - 1.025) < 1e-12 && std::abs(standard - 41.0) < 1e-12,
         "interval-score-formula",
         "printed coefficient -> " + fmt(paper) + " (want 1.025), standard -> " +
             fmt(standard) + " (want 41)");
}

// ---- criterion: determinism ---------------------------------------------------

void criterion_determinism() {
  const std::string config_text = R"({
    "data": {"source": "eggholder", "grid": {"n_x1": 15, "n_x2": 15}},
    "models": ["sdcnn", "deepkriging", "baseline_dnn"],
    "model": {"hidden_width": 8, "n_filters": 4},
    "basis": {"num_resolutions": 2},
    "train": {"batch_size": 32, "max_epochs": 5, "patience": 5,
              "learning_rate": 0.01},
    "cv": {"folds": 2},
    "n_mc_samples": 11,
    "seed": 246
  })";
  bench::ExperimentConfig a = bench::parse_config_json(config_text);
  a.out_dir = out_dir("det_a");
  bench::ExperimentConfig b = bench::parse_config_json(config_text);
  b.out_dir = out_dir("det_b");
  bench::run_cv(a);
  bench::run_cv(b);
  const std::string bytes_a = read_file(a.out_dir + "/scores.csv");
  const std::string bytes_b = read_file(b.out_dir + "/scores.csv");
  report(!bytes_a.empty() && bytes_a == bytes_b, "determinism",
         "two cv runs, identical config/seed -> scores.csv " +
             std::string(bytes_a == bytes_b ? "bitwise identical"
                                            : "DIFFER"));
}

// ---- criteria: eggholder desk runs --------------------------------------------

struct DeskOutcome {
  bool ran = false;
  double mse_sdcnn = 0.0;
};

DeskOutcome criterion_eggholder_desk() {
  DeskOutcome outcome;
  const std::string config_path =
      std::string(SDCNN_SOURCE_DIR) + "/config/eggholder_desk.json";
  bench::ExperimentConfig config = bench::load_config_file(config_path);
  config.out_dir = out_dir("desk_cv");

  const auto start = std::chrono::steady_clock::now();
  bench::RunResult result = bench::run_cv(config);
  const double secs = elapsed_s(start);

  double mse_sdcnn = -1, mse_dk = -1, mse_base = -1, icr_sdcnn = -1;
  for (const auto& row : result.score_rows) {
    if (row.fold != "pooled") continue;
    if (row.model == "sdcnn") {
      mse_sdcnn = row.mse;
      icr_sdcnn = row.icr;
    } else if (row.model == "deepkriging") {
      mse_dk = row.mse;
    } else if (row.model == "baseline_dnn") {
      mse_base = row.mse;
    }
  }

  const bool ordering = result.all_ok && mse_sdcnn >= 0 && mse_sdcnn < mse_dk &&
                        mse_dk < mse_base;
  const bool icr_band = icr_sdcnn >= 0.80 && icr_sdcnn <= 1.00;
  const bool in_time = secs < 30.0 * 60.0;
  report(ordering && icr_band && in_time, "eggholder-desk-cv",
         "pooled MSE sdcnn " + fmt(mse_sdcnn) + " < deepkriging " + fmt(mse_dk) +
             " < baseline " + fmt(mse_base) + " is " +
             std::string(ordering ? "true" : "FALSE") + "; sdcnn ICR(0.95) " +
             fmt(icr_sdcnn) + " in [0.80, 1.00] " +
             std::string(icr_band ? "true" : "FALSE") + "; " + fmt(secs / 60.0) +
             " min (budget 30)");
  outcome.ran = ordering && icr_band && in_time;
  outcome.mse_sdcnn = mse_sdcnn;
  return outcome;
}

void criterion_missing_rectangle(const DeskOutcome& desk) {
  const std::string config_path =
      std::string(SDCNN_SOURCE_DIR) + "/config/eggholder_desk.json";
  bench::ExperimentConfig config = bench::load_config_file(config_path);
  config.out_dir = out_dir("desk_holdout");
  config.model_kinds = {models::ModelKind::Sdcnn};

  bench::RunResult result = bench::run_holdout(config);
  double mse_rect = -1;
  for (const auto& row : result.score_rows) {
    if (row.model == "sdcnn" && row.fold == "holdout") mse_rect = row.mse;
  }
  const bool ok = result.all_ok && desk.ran && mse_rect >= 0 &&
                  mse_rect < 5.0 * desk.mse_sdcnn;
  report(ok, "missing-rectangle",
         "sdcnn rectangle MSE " + fmt(mse_rect) + " vs 5 x cv MSE " +
             fmt(5.0 * desk.mse_sdcnn) +
             (desk.ran ? "" : " (desk cv criterion failed, so this fails too)"));
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_gradient_oracle();
  criterion_conv_oracle();
  criterion_crps_oracle();
  criterion_basis_properties();
  criterion_calibration();
  criterion_interval_score();
  criterion_determinism();
  const DeskOutcome desk = criterion_eggholder_desk();
  criterion_missing_rectangle(desk);
  std::printf("%d criteria failed\n", g_failures);
  return g_failures;
}
