#include "varheat/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "varheat/variations.hpp"

namespace varheat::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_string_kind(PathKind k) { return varheat::to_string(k); }

void write_path_csv(std::ostream& os, const Path& path) {
  path.validate();
  os << "# varheat-path v1\n";
  os << "# meta: " << varheat::to_string(path.meta) << "\n";
  os << "# grid_n: " << path.grid_n << "\n";
  os << "# spatial_point: " << format_double(path.spatial_point) << "\n";
  os << "# param: " << format_double(path.param) << "\n";
  os << "# theta: " << format_double(path.theta) << "\n";
  os << "# sigma: " << path.sigma_label << "\n";
  os << "# seed: " << path.seed << "\n";
  os << "i,t_i,value\n";
  for (int i = 0; i <= path.grid_n; ++i)
    os << i << ',' << format_double(path.t(i)) << ',' << format_double(path.values[i]) << '\n';
}

namespace {

std::string header_value(const std::string& line, const std::string& key) {
  const std::string prefix = "# " + key + ": ";
  if (line.rfind(prefix, 0) != 0)
    throw std::invalid_argument("path csv: expected header line '" + prefix + "...', got '" +
                                line + "'");
  return line.substr(prefix.size());
}

}  // namespace

Path read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# varheat-path", 0) != 0)
    throw std::invalid_argument("path csv: missing signature line");
  Path p;
  std::getline(is, line);
  p.meta = path_kind_from_string(header_value(line, "meta"));
  std::getline(is, line);
  p.grid_n = std::stoi(header_value(line, "grid_n"));
  std::getline(is, line);
  p.spatial_point = std::stod(header_value(line, "spatial_point"));
  std::getline(is, line);
  p.param = std::stod(header_value(line, "param"));
  std::getline(is, line);
  p.theta = std::stod(header_value(line, "theta"));
  std::getline(is, line);
  p.sigma_label = header_value(line, "sigma");
  std::getline(is, line);
  p.seed = std::stoull(header_value(line, "seed"));
  std::getline(is, line);  // column header
  p.values.assign(p.grid_n + 1, 0.0);
  int count = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::invalid_argument("path csv: malformed data row '" + line + "'");
    const int i = std::stoi(line.substr(0, c1));
    if (i < 0 || i > p.grid_n) throw std::invalid_argument("path csv: row index out of range");
    p.values[i] = std::stod(line.substr(c2 + 1));
    ++count;
  }
  if (count != p.grid_n + 1)
    throw std::invalid_argument("path csv: expected " + std::to_string(p.grid_n + 1) +
                                " rows, found " + std::to_string(count));
  p.validate();
  return p;
}

void write_path_csv_file(const std::filesystem::path& file, const Path& path) {
  std::ofstream os(file);
  if (!os) throw std::invalid_argument("cannot open for writing: " + file.string());
  write_path_csv(os, path);
}

Path read_path_csv_file(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw std::invalid_argument("cannot open for reading: " + file.string());
  return read_path_csv(is);
}

std::string variation_csv_header() { return "kind,n,param,p,statistic"; }

std::string variation_csv_row(const variations::VariationResult& v) {
  const char* kind = v.kind == variations::VariationResult::Kind::quad_renorm ? "quad_renorm"
                     : v.kind == variations::VariationResult::Kind::power_p   ? "power_p"
                                                                              : "fbm_norm";
  std::ostringstream os;
  os << kind << ',' << v.grid_n << ',' << format_double(v.param) << ',' << format_double(v.p)
     << ',' << format_double(v.statistic);
  return os.str();
}

std::string estimate_to_json(const estimators::EstimateResult& e) {
  json j;
  j["target"] = e.target == estimators::EstimateResult::Target::alpha ? "alpha" : "theta";
  j["method"] = e.method == estimators::EstimateResult::Method::log_ratio ? "log_ratio"
                : e.method == estimators::EstimateResult::Method::quad    ? "quad"
                                                                          : "power";
  j["estimate"] = e.estimate;
  j["n"] = e.grid_n;
  if (e.a_n) j["a_n"] = *e.a_n;
  if (e.statistic) j["statistic"] = *e.statistic;
  j["riemann_sum"] = e.riemann_sum;
  j["constants"] = json::object();
  if (e.c0) j["constants"]["c0"] = *e.c0;
  if (e.b0) j["constants"]["b0"] = *e.b0;
  return j.dump(2);
}

void write_mc_report_csv(std::ostream& os, const experiments::McReport& rep) {
  os << "n,error,se,replicates\n";
  for (std::size_t i = 0; i < rep.n_values.size(); ++i)
    os << rep.n_values[i] << ',' << format_double(rep.errors[i]) << ','
       << format_double(rep.standard_errors[i]) << ',' << rep.replicates << '\n';
}

std::string mc_report_summary_json(const experiments::McReport& rep) {
  json j;
  j["name"] = rep.rate.name;
  j["slope"] = rep.fitted_slope;
  j["ci"] = {rep.slope_ci[0], rep.slope_ci[1]};
  j["theory"] = rep.rate.theoretical_exponent;
  j["source"] = rep.rate.source;
  j["verdict"] = rep.verdict;
  j["decreasing_trend"] = rep.decreasing_trend;
  j["replicates"] = rep.replicates;
  j["seed"] = rep.seed;
  j["n_values"] = rep.n_values;
  j["errors"] = rep.errors;
  j["standard_errors"] = rep.standard_errors;
  return j.dump(2);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_manifest(const std::filesystem::path& file, const Manifest& m) {
  json j;
  j["command"] = m.command;
  j["args"] = m.args;
  j["seed"] = m.seed;
  j["spec_hash"] = m.spec_hash;
  j["started_at"] = m.started_at;
  j["duration_s"] = m.duration_s;
  j["outputs"] = m.outputs;
  std::ofstream os(file);
  if (!os) throw std::invalid_argument("cannot open for writing: " + file.string());
  os << j.dump(2) << '\n';
}

Manifest read_manifest(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw std::invalid_argument("cannot open for reading: " + file.string());
  json j;
  is >> j;
  Manifest m;
  m.command = j.at("command").get<std::string>();
  m.args = j.at("args").get<std::vector<std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.spec_hash = j.at("spec_hash").get<std::string>();
  m.started_at = j.at("started_at").get<std::string>();
  m.duration_s = j.at("duration_s").get<double>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  return m;
}

void write_field_binary(const std::filesystem::path& stem, const std::vector<double>& field,
                        int n_space, double dx, double dt, double alpha, double theta,
                        std::uint64_t seed, double snapshot_time) {
  const auto bin = stem.string() + ".bin";
  std::ofstream os(bin, std::ios::binary);
  if (!os) throw std::invalid_argument("cannot open for writing: " + bin);
  os.write(reinterpret_cast<const char*>(field.data()),
           static_cast<std::streamsize>(field.size() * sizeof(double)));
  json j;
  j["rows"] = 1;
  j["cols"] = n_space;
  j["dx"] = dx;
  j["dt"] = dt;
  j["alpha"] = alpha;
  j["theta"] = theta;
  j["seed"] = seed;
  j["time"] = snapshot_time;
  j["dtype"] = "float64";
  j["order"] = "row-major";
  std::ofstream sc(stem.string() + ".json");
  sc << j.dump(2) << '\n';
}

}  // namespace varheat::io
