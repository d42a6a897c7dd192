#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "sdcnn/csv.hpp"
#include "sdcnn/rng.hpp"
#include "sdcnn/serialize.hpp"

using namespace sdcnn;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sdcnn_test_" + name);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("format_double round-trips 64-bit values") {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-12, 12));
    CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
  }
  CHECK(io::format_double(std::nan("")) == "NaN");
  CHECK(std::strtod(io::format_double(0.1).c_str(), nullptr) == 0.1);
}

TEST_CASE("dataset csv round trip preserves values bitwise") {
  data::Dataset dataset;
  Rng rng(2);
  for (int i = 0; i < 25; ++i) {
    dataset.locations.push_back(
        {rng.uniform(-500, 500), rng.uniform(-500, 500)});
    dataset.responses.push_back(i == 7 ? std::nan("")
                                       : rng.uniform(-1000, 1000));
  }
  const auto path = temp_path("roundtrip.csv");
  io::write_dataset_csv(dataset, path.string());
  data::Dataset loaded = io::load_dataset_csv(path.string());

  REQUIRE(loaded.size() == dataset.size());
  for (int64_t i = 0; i < dataset.size(); ++i) {
    CHECK(loaded.locations[static_cast<size_t>(i)].x1 ==
          dataset.locations[static_cast<size_t>(i)].x1);
    CHECK(loaded.locations[static_cast<size_t>(i)].x2 ==
          dataset.locations[static_cast<size_t>(i)].x2);
    if (std::isnan(dataset.responses[static_cast<size_t>(i)])) {
      CHECK(std::isnan(loaded.responses[static_cast<size_t>(i)]));
    } else {
      CHECK(loaded.responses[static_cast<size_t>(i)] ==
            dataset.responses[static_cast<size_t>(i)]);
    }
  }
  // the NaN row is prediction-only
  CHECK(loaded.observed_indices().size() == 24);
}

TEST_CASE("csv loader error paths") {
  const auto p1 = temp_path("missing_header.csv");
  write_text(p1, "a,b,c\n1,2,3\n");
  CHECK_THROWS_AS(io::load_dataset_csv(p1.string()), Error);

  const auto p2 = temp_path("bad_row.csv");
  write_text(p2, "x1,x2,y\n1,2,3\n4,notanumber,6\n");
  try {
    io::load_dataset_csv(p2.string());
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  const auto p3 = temp_path("empty.csv");
  write_text(p3, "");
  CHECK_THROWS_AS(io::load_dataset_csv(p3.string()), Error);

  const auto p4 = temp_path("three_rows.csv");
  write_text(p4, "x1,x2,y\n0,0,1\n1,0,2\n0,1,NaN\n");
  data::Dataset d = io::load_dataset_csv(p4.string());
  CHECK(d.size() == 3);
  CHECK(d.observed_indices().size() == 2);

  CHECK_THROWS_AS(io::load_dataset_csv("/no/such/file.csv"), Error);
}

TEST_CASE("samples csv round trip") {
  score::PredictiveSamples samples;
  samples.n_locations = 4;
  samples.n_samples = 6;
  Rng rng(5);
  for (int64_t i = 0; i < 4; ++i) {
    samples.location_ids.push_back(10 * i);
    for (int64_t s = 0; s < 6; ++s) samples.values.push_back(rng.uniform(-9, 9));
  }
  std::vector<double> obs{1.0, -2.0, 3.5, 0.0};
  const auto path = temp_path("samples.csv");
  io::write_samples_csv(samples, obs, path.string());

  score::PredictiveSamples loaded;
  std::vector<double> loaded_obs;
  io::load_samples_csv(path.string(), loaded, loaded_obs);
  CHECK(loaded.n_locations == 4);
  CHECK(loaded.n_samples == 6);
  CHECK(loaded.values == samples.values);
  CHECK(loaded_obs == obs);
  CHECK(loaded.location_ids == samples.location_ids);
}

TEST_CASE("model files round trip exactly") {
  bench::ExperimentConfig config;
  config.data.kind = bench::DataSource::Kind::Eggholder;
  config.data.grid = {10, 10, -500, 500, -500, 500};
  config.basis.num_resolutions = 2;
  config.model.hidden_width = 8;
  config.model.n_filters = 4;
  config.train.batch_size = 16;
  config.train.max_epochs = 3;
  config.train.patience = 3;
  config.seed = 77;

  bench::ModelBundle bundle = bench::train_full(config, models::ModelKind::Sdcnn);
  const auto path = temp_path("model.bin");
  bench::save_model(bundle, path.string());
  bench::ModelBundle loaded = bench::load_model(path.string());

  CHECK(loaded.kind == bundle.kind);
  CHECK(loaded.response_mu == bundle.response_mu);
  CHECK(loaded.response_sigma == bundle.response_sigma);
  CHECK(loaded.scale_x1.min == bundle.scale_x1.min);
  CHECK(loaded.graph.snapshot() == bundle.graph.snapshot());

  // deterministic predictions survive the round trip bit for bit
  std::vector<basis::Location> locs{{-400, -400}, {0, 0}, {137, -259}};
  CHECK(loaded.predict_mean(locs) == bundle.predict_mean(locs));
  // and so do seeded MC samples
  auto a = bundle.predict(locs, 7, 123);
  auto b = loaded.predict(locs, 7, 123);
  CHECK(a.values == b.values);

  CHECK_THROWS_AS(bench::load_model("/no/such/model.bin"), Error);
  const auto junk = temp_path("junk.bin");
  write_text(junk, "definitely not a model");
  CHECK_THROWS_AS(bench::load_model(junk.string()), Error);
}
