#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "varheat/estimators.hpp"
#include "varheat/experiments.hpp"
#include "varheat/gaussian.hpp"
#include "varheat/io.hpp"
#include "varheat/kernel.hpp"
#include "varheat/spde.hpp"
#include "varheat/variations.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace varheat;

namespace {

struct RunContext {
  fs::path out_dir = "varheat-run";
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::vector<std::string> argv_copy;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  std::vector<std::string> outputs;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out_dir / name;
  }
};

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void finish_run(RunContext& ctx, const std::string& command, const json& effective_config) {
  io::Manifest m;
  m.command = command;
  m.args = ctx.argv_copy;
  m.seed = ctx.seed;
  char hex[24];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(io::fnv1a(effective_config.dump())));
  m.spec_hash = hex;
  m.started_at = iso_now();
  m.duration_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
  m.outputs = ctx.outputs;
  io::write_manifest(ctx.out_dir / "manifest.json", m);
}

Path make_path(const std::string& process, int n, double alpha, double hurst, double theta,
               const SigmaSpec& sigma, std::uint64_t seed, std::uint64_t replicate, int cap,
               int n_space, double half_length) {
  if (process == "fbm") return gaussian::sample_fbm(hurst, n, seed, replicate);
  if (process == "u0") {
    kernel::KernelParams kp;
    kp.alpha = alpha;
    return gaussian::sample_u0_path(kp, n, seed, replicate, cap);
  }
  if (process == "spde") {
    spde::SimConfig cfg;
    cfg.alpha = alpha;
    cfg.theta = theta;
    cfg.sigma = sigma;
    cfg.observe_n = n;
    cfg.seed = seed;
    cfg.n_space = n_space;
    cfg.half_length = half_length;
    return spde::solve_parametrized(cfg, replicate).path;
  }
  throw CLI::ValidationError("--process must be fbm, u0 or spde");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"varheat: fractional stochastic heat equation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  RunContext ctx;
  for (int i = 0; i < argc; ++i) ctx.argv_copy.emplace_back(argv[i]);
  app.add_option("--seed", ctx.seed, "base seed")->capture_default_str();
  app.add_option("--out", ctx.out_dir, "output directory")->capture_default_str();
  app.add_option("--format", ctx.format, "artifact format: csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // shared numeric options
  double alpha = 2.0, theta = 1.0, hurst = 0.25, t_val = 1.0, abs_tol = 1e-9;
  int n = 1024, reps = 100, cap = 8192, n_space = 0;
  double half_length = 0.0;
  std::uint64_t replicate = 0;
  std::string sigma_text = "constant:1";
  std::string process = "u0";

  auto* kc = app.add_subcommand("kernel-check", "Green kernel identity report");
  kc->add_option("--alpha", alpha)->required();
  kc->add_option("--t", t_val)->capture_default_str();
  kc->add_option("--abs-tol", abs_tol)->capture_default_str();

  auto* sample = app.add_subcommand("sample", "draw one path and write it as CSV");
  sample->add_option("--process", process, "fbm | u0 | spde")->required();
  sample->add_option("--n", n)->required();
  sample->add_option("--alpha", alpha)->capture_default_str();
  sample->add_option("--hurst", hurst)->capture_default_str();
  sample->add_option("--theta", theta)->capture_default_str();
  sample->add_option("--sigma", sigma_text)->capture_default_str();
  sample->add_option("--replicate", replicate)->capture_default_str();
  sample->add_option("--factorization-cap", cap)->capture_default_str();
  sample->add_option("--n-space", n_space)->capture_default_str();
  sample->add_option("--half-length", half_length)->capture_default_str();

  std::string var_kind = "quad";
  std::string input_file;
  double p_order = 4.0;
  auto* variation = app.add_subcommand("variation", "variation statistic of a path");
  variation->add_option("--kind", var_kind, "quad | power | fbm")->capture_default_str();
  variation->add_option("--input", input_file, "path CSV produced by `sample`");
  variation->add_option("--p", p_order)->capture_default_str();
  variation->add_option("--alpha", alpha)->capture_default_str();
  variation->add_option("--hurst", hurst)->capture_default_str();
  auto* vsim = variation->add_flag("--simulate", "simulate instead of reading --input");
  variation->add_option("--process", process)->capture_default_str();
  variation->add_option("--n", n)->capture_default_str();
  variation->add_option("--theta", theta)->capture_default_str();
  variation->add_option("--sigma", sigma_text)->capture_default_str();
  variation->add_option("--replicate", replicate)->capture_default_str();
  variation->add_option("--factorization-cap", cap)->capture_default_str();

  std::string est_target = "alpha";
  auto* estimate = app.add_subcommand("estimate", "parameter estimate from one sampled path");
  estimate->add_option("--target", est_target, "alpha | theta1 | theta2")->required();
  estimate->add_option("--process", process)->capture_default_str();
  estimate->add_option("--alpha", alpha)->capture_default_str();
  estimate->add_option("--hurst", hurst)->capture_default_str();
  estimate->add_option("--theta", theta)->capture_default_str();
  estimate->add_option("--sigma", sigma_text)->capture_default_str();
  estimate->add_option("--n", n)->required();
  estimate->add_option("--replicate", replicate)->capture_default_str();
  estimate->add_option("--factorization-cap", cap)->capture_default_str();
  estimate->add_option("--n-space", n_space)->capture_default_str();
  estimate->add_option("--half-length", half_length)->capture_default_str();
  estimate->add_option("--input", input_file, "path CSV; overrides --process");

  std::string rate_target = "fbm_vn";
  std::string n_grid_text = "256,1024,4096";
  std::string norm_text = "l2";
  double c_y = 1.0;
  auto* rate = app.add_subcommand("rate", "Monte Carlo convergence-rate experiment");
  rate->add_option("--target", rate_target, "fbm_vn | perturbed_vn | u0_vn | nonlinear_vn | nonlinear_un")
      ->required();
  rate->add_option("--n-grid", n_grid_text)->capture_default_str();
  rate->add_option("--reps", reps)->capture_default_str();
  rate->add_option("--alpha", alpha)->capture_default_str();
  rate->add_option("--hurst", hurst)->capture_default_str();
  rate->add_option("--theta", theta)->capture_default_str();
  rate->add_option("--sigma", sigma_text)->capture_default_str();
  rate->add_option("--c-y", c_y, "perturbation scale for perturbed_vn")->capture_default_str();
  rate->add_option("--norm", norm_text, "l1 | l2")->capture_default_str();
  rate->add_option("--factorization-cap", cap)->capture_default_str();
  rate->add_option("--n-space", n_space)->capture_default_str();
  rate->add_option("--half-length", half_length)->capture_default_str();

  std::string ladder_text = "0.015625,0.0078125,0.00390625";
  double t_anchor = 0.5;
  auto* prop4 = app.add_subcommand("prop4-check", "coupled-increment bound check");
  prop4->add_option("--alpha", alpha)->required();
  prop4->add_option("--t", t_anchor)->capture_default_str();
  prop4->add_option("--delta-ladder", ladder_text)->capture_default_str();
  prop4->add_option("--reps", reps)->capture_default_str();
  prop4->add_option("--sigma", sigma_text)->capture_default_str();
  prop4->add_option("--n-space", n_space)->capture_default_str();
  prop4->add_option("--half-length", half_length)->capture_default_str();

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << app.help() << "\n" << e.what() << "\n";
    return 2;
  }

  try {
    fs::create_directories(ctx.out_dir);
    const SigmaSpec sigma = SigmaSpec::parse(sigma_text);

    if (kc->parsed()) {
      kernel::KernelParams params;
      params.alpha = alpha;
      params.abs_tol = abs_tol;
      const auto rep = kernel::kernel_property_check(params, t_val);
      json j;
      j["alpha"] = alpha;
      j["t"] = t_val;
      j["normalization_error"] = rep.normalization_error;
      j["symmetry_error"] = rep.symmetry_error;
      j["scaling_error"] = rep.scaling_error;
      j["sandwich_min"] = rep.sandwich_min;
      j["sandwich_max"] = rep.sandwich_max;
      j["all_positive"] = rep.all_positive;
      std::ofstream(ctx.file("kernel_check.json")) << j.dump(2) << '\n';
      std::cout << j.dump(2) << std::endl;
      finish_run(ctx, "kernel-check", j);
      return 0;
    }

    if (sample->parsed()) {
      const Path path = make_path(process, n, alpha, hurst, theta, sigma, ctx.seed, replicate,
                                  cap, n_space, half_length);
      io::write_path_csv_file(ctx.file("path.csv"), path);
      json j{{"process", process}, {"n", n},         {"alpha", alpha},
             {"hurst", hurst},     {"theta", theta}, {"sigma", sigma.label()},
             {"seed", ctx.seed},   {"replicate", replicate}};
      finish_run(ctx, "sample", j);
      return 0;
    }

    if (variation->parsed()) {
      Path path;
      if (!input_file.empty() && !*vsim) {
        path = io::read_path_csv_file(input_file);
      } else if (*vsim) {
        path = make_path(process, n, alpha, hurst, theta, sigma, ctx.seed, replicate, cap,
                         n_space, half_length);
      } else {
        throw CLI::ValidationError("variation needs --input FILE or --simulate");
      }
      variations::VariationResult res;
      if (var_kind == "quad")
        res = variations::quad_variation_renorm(path, alpha);
      else if (var_kind == "power")
        res = variations::power_variation(path, p_order);
      else if (var_kind == "fbm")
        res = variations::fbm_normalized_variation(path, hurst);
      else
        throw CLI::ValidationError("--kind must be quad, power or fbm");
      if (ctx.format == "json") {
        json j{{"kind", var_kind},
               {"n", res.grid_n},
               {"param", res.param},
               {"p", res.p},
               {"statistic", res.statistic}};
        std::ofstream(ctx.file("variation.json")) << j.dump(2) << '\n';
        std::cout << j.dump(2) << std::endl;
      } else {
        std::ofstream os(ctx.file("variation.csv"));
        os << io::variation_csv_header() << '\n' << io::variation_csv_row(res) << '\n';
        std::cout << io::variation_csv_header() << '\n'
                  << io::variation_csv_row(res) << std::endl;
      }
      json cfg{{"kind", var_kind}, {"input", input_file}, {"n", path.grid_n},
               {"alpha", alpha},   {"hurst", hurst},      {"seed", ctx.seed}};
      finish_run(ctx, "variation", cfg);
      return 0;
    }

    if (estimate->parsed()) {
      Path path;
      if (!input_file.empty())
        path = io::read_path_csv_file(input_file);
      else
        path = make_path(process, n, alpha, hurst, theta, sigma, ctx.seed, replicate, cap,
                         n_space, half_length);
      estimators::EstimateResult est;
      if (est_target == "alpha") {
        est = estimators::estimate_alpha(path, sigma);
      } else if (est_target == "theta1") {
        kernel::KernelParams kp;
        kp.alpha = alpha;
        est = estimators::estimate_theta_quadratic(path, alpha, sigma, gaussian::c0_alpha(kp));
      } else if (est_target == "theta2") {
        kernel::KernelParams kp;
        kp.alpha = alpha;
        est = estimators::estimate_theta_power(path, alpha, sigma, gaussian::b0_alpha(kp));
      } else {
        throw CLI::ValidationError("--target must be alpha, theta1 or theta2");
      }
      const std::string out = io::estimate_to_json(est);
      std::ofstream(ctx.file("estimate.json")) << out << '\n';
      std::cout << out << std::endl;
      json cfg{{"target", est_target}, {"process", process}, {"n", n},
               {"alpha", alpha},       {"theta", theta},     {"seed", ctx.seed}};
      finish_run(ctx, "estimate", cfg);
      return 0;
    }

    if (rate->parsed()) {
      std::vector<int> grid;
      std::stringstream ss(n_grid_text);
      for (std::string item; std::getline(ss, item, ',');) grid.push_back(std::stoi(item));
      experiments::ExperimentParams params;
      params.alpha = alpha;
      params.hurst = hurst;
      params.theta = theta;
      params.sigma = sigma;
      params.perturbed = {1.0, hurst, c_y};
      params.norm = norm_text == "l1" ? experiments::ErrorNorm::l1 : experiments::ErrorNorm::l2;
      params.factorization_cap = cap;
      params.n_space = n_space;
      params.half_length = half_length;
      experiments::RateTarget target;
      if (rate_target == "fbm_vn") target = experiments::RateTarget::fbm_vn;
      else if (rate_target == "perturbed_vn") target = experiments::RateTarget::perturbed_vn;
      else if (rate_target == "u0_vn") target = experiments::RateTarget::u0_vn;
      else if (rate_target == "nonlinear_vn") target = experiments::RateTarget::nonlinear_vn;
      else if (rate_target == "nonlinear_un") target = experiments::RateTarget::nonlinear_un;
      else throw CLI::ValidationError("unknown rate --target");
      if ((target == experiments::RateTarget::nonlinear_vn ||
           target == experiments::RateTarget::nonlinear_un) &&
          norm_text != "l1")
        params.norm = experiments::ErrorNorm::l1;
      const auto report = experiments::run_rate_experiment(target, params, grid, reps, ctx.seed);
      {
        std::ofstream os(ctx.file("rate.csv"));
        io::write_mc_report_csv(os, report);
      }
      const std::string summary = io::mc_report_summary_json(report);
      std::ofstream(ctx.file("rate_summary.json")) << summary << '\n';
      std::cout << summary << std::endl;
      json cfg{{"target", rate_target}, {"n_grid", grid},   {"reps", reps},
               {"alpha", alpha},        {"hurst", hurst},   {"norm", norm_text},
               {"sigma", sigma.label()}, {"seed", ctx.seed}};
      finish_run(ctx, "rate", cfg);
      return 0;
    }

    if (prop4->parsed()) {
      std::vector<double> ladder;
      std::stringstream ss(ladder_text);
      for (std::string item; std::getline(ss, item, ',');) ladder.push_back(std::stod(item));
      spde::SimConfig cfg;
      cfg.alpha = alpha;
      cfg.sigma = sigma;
      cfg.observe_n = 256;
      cfg.seed = ctx.seed;
      cfg.n_space = n_space;
      cfg.half_length = half_length;
      const double exponent = 4.0 * (alpha - 1.0) / (2.0 * alpha + 1.0);
      std::vector<double> mean_sq(ladder.size(), 0.0);
      for (int r = 0; r < reps; ++r) {
        const auto samples = spde::coupled_increment_ladder(cfg, t_anchor, ladder, r);
        for (std::size_t q = 0; q < samples.size(); ++q) {
          const double d = samples[q].real_increment - samples[q].surrogate;
          mean_sq[q] += d * d / reps;
        }
      }
      json j;
      j["alpha"] = alpha;
      j["t"] = t_anchor;
      j["exponent"] = exponent;
      j["reps"] = reps;
      std::ofstream os(ctx.file("prop4.csv"));
      os << "delta,mean_sq_error,ratio\n";
      json rows = json::array();
      for (std::size_t q = 0; q < ladder.size(); ++q) {
        const double ratio = mean_sq[q] / std::pow(ladder[q], exponent);
        os << io::format_double(ladder[q]) << ',' << io::format_double(mean_sq[q]) << ','
           << io::format_double(ratio) << '\n';
        rows.push_back({{"delta", ladder[q]}, {"mean_sq", mean_sq[q]}, {"ratio", ratio}});
      }
      j["rows"] = rows;
      std::ofstream(ctx.file("prop4_summary.json")) << j.dump(2) << '\n';
      std::cout << j.dump(2) << std::endl;
      finish_run(ctx, "prop4-check", j);
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return 2;
  } catch (const varheat::degenerate_input& e) {
    std::cerr << "degenerate input: " << e.what() << "\n";
    return 2;
  } catch (const varheat::estimator_undefined& e) {
    std::cerr << "estimator undefined: " << e.what() << "\n";
    return 2;
  } catch (const varheat::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
