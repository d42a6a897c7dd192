#include "sdcnn/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sdcnn::io {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& field, int64_t line_no, const char* what) {
  const std::string t = trim(field);
  if (t.empty() || t == "NaN" || t == "nan" || t == "NA") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0') {
    fail(ErrorCode::Parse, std::string("malformed ") + what + " at line " +
                               std::to_string(line_no) + ": '" + t + "'");
  }
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot open for writing: " + path);
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

data::Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open: " + path);

  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::Parse,
          "empty file: " + path);
  const std::vector<std::string> header = split_fields(line);
  int ix1 = -1, ix2 = -1, iy = -1;
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "x1") ix1 = static_cast<int>(i);
    if (header[i] == "x2") ix2 = static_cast<int>(i);
    if (header[i] == "y") iy = static_cast<int>(i);
  }
  require(ix1 >= 0 && ix2 >= 0 && iy >= 0, ErrorCode::Parse,
          "header must name columns x1, x2 and y: " + path);

  data::Dataset dataset;
  int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      fail(ErrorCode::Parse, "wrong field count at line " + std::to_string(line_no) +
                                 " of " + path);
    }
    const double x1 = parse_double(fields[static_cast<size_t>(ix1)], line_no, "x1");
    const double x2 = parse_double(fields[static_cast<size_t>(ix2)], line_no, "x2");
    require(std::isfinite(x1) && std::isfinite(x2), ErrorCode::Parse,
            "non-finite coordinates at line " + std::to_string(line_no));
    const double y = parse_double(fields[static_cast<size_t>(iy)], line_no, "y");
    dataset.locations.push_back(basis::Location{x1, x2});
    dataset.responses.push_back(y);
  }
  require(dataset.size() > 0, ErrorCode::Parse, "no data rows in " + path);
  return dataset;
}

void write_dataset_csv(const data::Dataset& dataset, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "x1,x2,y\n";
  for (int64_t i = 0; i < dataset.size(); ++i) {
    out << format_double(dataset.locations[static_cast<size_t>(i)].x1) << ','
        << format_double(dataset.locations[static_cast<size_t>(i)].x2) << ','
        << format_double(dataset.responses[static_cast<size_t>(i)]) << '\n';
  }
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

void write_scores_csv(const std::vector<ScoreRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "model,fold,mse,crps,icr,interval_score\n";
  for (const ScoreRow& r : rows) {
    out << r.model << ',' << r.fold << ',' << format_double(r.mse) << ','
        << format_double(r.crps) << ',' << format_double(r.icr) << ','
        << format_double(r.interval_score) << '\n';
  }
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

void write_per_location_csv(const std::vector<PerLocationRow>& rows,
                            const std::string& path) {
  std::ofstream out = open_out(path);
  out << "model,fold,location_id,x1,x2,observed,pred_mean,pred_sd,crps,"
         "interval_score,covered\n";
  for (const PerLocationRow& r : rows) {
    out << r.model << ',' << r.fold << ',' << r.location_id << ','
        << format_double(r.x1) << ',' << format_double(r.x2) << ','
        << format_double(r.observed) << ',' << format_double(r.pred_mean) << ','
        << format_double(r.pred_sd) << ',' << format_double(r.crps) << ','
        << format_double(r.interval_score) << ',' << r.covered << '\n';
  }
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

void write_surface_csv(const std::vector<SurfaceRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "x1,x2,mean,sd\n";
  for (const SurfaceRow& r : rows) {
    out << format_double(r.x1) << ',' << format_double(r.x2) << ','
        << format_double(r.mean) << ',' << format_double(r.sd) << '\n';
  }
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

void write_samples_csv(const score::PredictiveSamples& samples,
                       const std::vector<double>& observed,
                       const std::string& path) {
  require(static_cast<int64_t>(observed.size()) == samples.n_locations,
          ErrorCode::InvalidArgument, "observed size mismatch");
  std::ofstream out = open_out(path);
  out << "location_id,observed";
  for (int64_t s = 0; s < samples.n_samples; ++s) out << ",s" << s;
  out << '\n';
  for (int64_t i = 0; i < samples.n_locations; ++i) {
    out << samples.location_ids[static_cast<size_t>(i)] << ','
        << format_double(observed[static_cast<size_t>(i)]);
    const double* row = samples.row(i);
    for (int64_t s = 0; s < samples.n_samples; ++s) out << ',' << format_double(row[s]);
    out << '\n';
  }
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

void load_samples_csv(const std::string& path, score::PredictiveSamples& samples,
                      std::vector<double>& observed) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open: " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::Parse,
          "empty file: " + path);
  const std::vector<std::string> header = split_fields(line);
  require(header.size() >= 3 && header[0] == "location_id" && header[1] == "observed",
          ErrorCode::Parse, "expected header location_id,observed,s...: " + path);
  const int64_t n_samples = static_cast<int64_t>(header.size()) - 2;

  samples = score::PredictiveSamples{};
  samples.n_samples = n_samples;
  observed.clear();
  int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (static_cast<int64_t>(fields.size()) != n_samples + 2) {
      fail(ErrorCode::Parse,
           "wrong field count at line " + std::to_string(line_no) + " of " + path);
    }
    samples.location_ids.push_back(
        static_cast<int64_t>(parse_double(fields[0], line_no, "location_id")));
    observed.push_back(parse_double(fields[1], line_no, "observed"));
    for (int64_t s = 0; s < n_samples; ++s) {
      samples.values.push_back(
          parse_double(fields[static_cast<size_t>(s + 2)], line_no, "sample"));
    }
  }
  samples.n_locations = static_cast<int64_t>(samples.location_ids.size());
  require(samples.n_locations > 0, ErrorCode::Parse, "no data rows in " + path);
}

void write_basis_dump_csv(const std::vector<BasisDumpRow>& rows,
                          const std::string& path) {
  std::ofstream out = open_out(path);
  out << "location_id,resolution,row,col,value\n";
  for (const BasisDumpRow& r : rows) {
    out << r.location_id << ',' << r.resolution << ',' << r.row << ',' << r.col
        << ',' << format_double(r.value) << '\n';
  }
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

}  // namespace sdcnn::io
