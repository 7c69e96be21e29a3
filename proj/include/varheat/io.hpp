#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "varheat/estimators.hpp"
#include "varheat/experiments.hpp"
#include "varheat/path.hpp"
#include "varheat/variations.hpp"

namespace varheat::io {

// full round-trip precision decimal formatting (%.17g)
std::string format_double(double v);

// Path CSV: 8 '#' header lines carrying the meta fields, then "i,t_i,value".
void write_path_csv(std::ostream& os, const Path& path);
Path read_path_csv(std::istream& is);
void write_path_csv_file(const std::filesystem::path& file, const Path& path);
Path read_path_csv_file(const std::filesystem::path& file);

// VariationResult row: kind,n,param,p,statistic
std::string variation_csv_header();
std::string variation_csv_row(const variations::VariationResult& v);

// {target, method, estimate, n, a_n?, statistic?, riemann_sum, constants{c0?, b0?}}
std::string estimate_to_json(const estimators::EstimateResult& e);

// rate report: CSV of one row per N plus a JSON summary
void write_mc_report_csv(std::ostream& os, const experiments::McReport& rep);
std::string mc_report_summary_json(const experiments::McReport& rep);

// stable 64-bit FNV-1a over a canonical string; the manifest's spec hash
std::uint64_t fnv1a(const std::string& text);

struct Manifest {
  std::string command;
  std::vector<std::string> args;
  std::uint64_t seed = 0;
  std::string spec_hash;    // hex of fnv1a over the effective config
  std::string started_at;   // ISO-8601 UTC
  double duration_s = 0.0;
  std::vector<std::string> outputs;  // file names relative to the run directory
};

void write_manifest(const std::filesystem::path& file, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& file);

// row-major binary field dump plus JSON sidecar with the grid geometry
void write_field_binary(const std::filesystem::path& stem, const std::vector<double>& field,
                        int n_space, double dx, double dt, double alpha, double theta,
                        std::uint64_t seed, double snapshot_time);

}  // namespace varheat::io
