#include "sdcnn/serialize.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>

namespace sdcnn::bench {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'S', 'D', 'C', 'N', 'N', 'M', 'D', '1'};

const char* kernel_name(basis::KernelKind kind) {
  return kind == basis::KernelKind::Gaussian ? "gaussian" : "wendland";
}

basis::KernelKind kernel_from(const std::string& name) {
  if (name == "gaussian") return basis::KernelKind::Gaussian;
  if (name == "wendland") return basis::KernelKind::Wendland;
  fail(ErrorCode::Parse, "model file names unknown kernel: " + name);
}

}  // namespace

void save_model(ModelBundle& bundle, const std::string& path) {
  json header;
  header["kind"] = models::model_kind_name(bundle.kind);
  header["spec"] = {{"hidden_width", bundle.spec.hidden_width},
                    {"n_filters", bundle.spec.n_filters},
                    {"dropout_rate", bundle.spec.dropout_rate},
                    {"n_covariates", bundle.spec.n_covariates}};
  header["kernel"] = {{"kind", kernel_name(bundle.kernel.kind)},
                      {"squared_exponent", bundle.kernel.squared_exponent}};
  json res = json::array();
  for (const auto& r : bundle.resolutions) {
    // knot centers stored verbatim so predictions round-trip bit for bit
    std::vector<double> kx1, kx2;
    kx1.reserve(r.knots.size());
    kx2.reserve(r.knots.size());
    for (const auto& knot : r.knots) {
      kx1.push_back(knot.center.x1);
      kx2.push_back(knot.center.x2);
    }
    res.push_back({{"level", r.level},
                   {"rows", r.rows},
                   {"cols", r.cols},
                   {"sigma", r.sigma},
                   {"knots_x1", kx1},
                   {"knots_x2", kx2}});
  }
  header["resolutions"] = res;
  header["scale"] = {{"x1_min", bundle.scale_x1.min},
                     {"x1_max", bundle.scale_x1.max},
                     {"x2_min", bundle.scale_x2.min},
                     {"x2_max", bundle.scale_x2.max}};
  header["response"] = {{"mu", bundle.response_mu},
                        {"sigma", bundle.response_sigma}};

  const std::vector<double> snapshot = bundle.graph.snapshot();
  header["param_count"] = snapshot.size();
  json manifest = json::array();
  for (const auto& p : bundle.graph.parameter_manifest()) {
    manifest.push_back({{"name", p.name}, {"shape", p.shape}});
  }
  header["manifest"] = manifest;

  const std::string header_text = header.dump();
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  const uint64_t header_len = header_text.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  out.write(reinterpret_cast<const char*>(snapshot.data()),
            static_cast<std::streamsize>(snapshot.size() * sizeof(double)));
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open: " + path);

  char magic[8];
  in.read(magic, sizeof(magic));
  require(in.good() && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0,
          ErrorCode::Parse, "not a model file: " + path);
  uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  require(in.good() && header_len > 0 && header_len < (1ull << 30), ErrorCode::Parse,
          "corrupt model header: " + path);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  require(in.good(), ErrorCode::Parse, "truncated model header: " + path);

  json header;
  try {
    header = json::parse(header_text);
  } catch (const std::exception& e) {
    fail(ErrorCode::Parse, std::string("corrupt model header: ") + e.what());
  }

  ModelBundle bundle;
  try {
    bundle.kind = models::model_kind_from_name(header.at("kind").get<std::string>());
    bundle.spec.kind = bundle.kind;
    bundle.spec.hidden_width = header.at("spec").at("hidden_width").get<int64_t>();
    bundle.spec.n_filters = header.at("spec").at("n_filters").get<int>();
    bundle.spec.dropout_rate = header.at("spec").at("dropout_rate").get<double>();
    bundle.spec.n_covariates = header.at("spec").at("n_covariates").get<int>();
    bundle.kernel.kind = kernel_from(header.at("kernel").at("kind").get<std::string>());
    bundle.kernel.squared_exponent =
        header.at("kernel").at("squared_exponent").get<bool>();

    for (const auto& r : header.at("resolutions")) {
      basis::Resolution res;
      res.level = r.at("level").get<int>();
      res.rows = r.at("rows").get<int>();
      res.cols = r.at("cols").get<int>();
      res.sigma = r.at("sigma").get<double>();
      const auto kx1 = r.at("knots_x1").get<std::vector<double>>();
      const auto kx2 = r.at("knots_x2").get<std::vector<double>>();
      require(kx1.size() == kx2.size() &&
                  kx1.size() == static_cast<size_t>(res.rows) * res.cols,
              ErrorCode::Parse, "model file knot list is inconsistent");
      for (int row = 0; row < res.rows; ++row) {
        for (int col = 0; col < res.cols; ++col) {
          const size_t i = static_cast<size_t>(row) * res.cols + col;
          basis::Knot knot;
          knot.center = basis::Location{kx1[i], kx2[i]};
          knot.row_index = row;
          knot.col_index = col;
          res.knots.push_back(knot);
        }
      }
      bundle.resolutions.push_back(std::move(res));
    }

    bundle.scale_x1 = {header.at("scale").at("x1_min").get<double>(),
                       header.at("scale").at("x1_max").get<double>()};
    bundle.scale_x2 = {header.at("scale").at("x2_min").get<double>(),
                       header.at("scale").at("x2_max").get<double>()};
    bundle.response_mu = header.at("response").at("mu").get<double>();
    bundle.response_sigma = header.at("response").at("sigma").get<double>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("corrupt model header: ") + e.what());
  }

  Rng init_rng(0);
  bundle.graph = models::build_model(bundle.spec, bundle.resolutions, init_rng);

  const uint64_t param_count = header.at("param_count").get<uint64_t>();
  std::vector<double> snapshot(param_count);
  in.read(reinterpret_cast<char*>(snapshot.data()),
          static_cast<std::streamsize>(param_count * sizeof(double)));
  require(in.good(), ErrorCode::Parse, "truncated parameter block: " + path);
  bundle.graph.restore(snapshot);
  return bundle;
}

}  // namespace sdcnn::bench
