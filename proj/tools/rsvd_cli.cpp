// Command-line front end: theory predictions, Monte-Carlo experiments,
// matrix denoising and the shrinker conjecture check.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "rsvd/harness.hpp"
#include "rsvd/matrix_io.hpp"
#include "rsvd/mp_law.hpp"
#include "rsvd/rsvd.hpp"
#include "rsvd/shrinker.hpp"
#include "rsvd/sketch.hpp"
#include "rsvd/theory.hpp"

#ifndef RSVD_VERSION
#define RSVD_VERSION "unversioned"
#endif

namespace {

using nlohmann::ordered_json;
using rsvd::ModelParams;

ordered_json num_or_null(double x) {
  if (std::isnan(x)) return nullptr;
  return x;
}

int cmd_predict(double gamma, double beta, std::optional<double> sigma) {
  const ModelParams p(gamma, beta);
  const auto [lo, hi] = rsvd::mp::bulk_edges(p);
  ordered_json out;
  out["version"] = RSVD_VERSION;
  out["gamma"] = gamma;
  out["beta"] = beta;
  out["classical_route"] = p.classical();
  out["lambda_minus"] = lo;
  out["lambda_plus"] = hi;
  out["sigma_star"] = rsvd::theory::detection_threshold(p);
  if (sigma) {
    const auto pred = rsvd::theory::predict(p, *sigma);
    const double y = std::sqrt(pred.outlier_sq);
    out["sigma"] = pred.sigma;
    out["detectable"] = pred.detectable;
    out["outlier"] = y;
    out["outlier_sq"] = pred.outlier_sq;
    out["overlap_u"] = num_or_null(pred.overlap_u);
    out["overlap_v"] = num_or_null(pred.overlap_v);
    out["overlap_product"] = num_or_null(pred.overlap_u * pred.overlap_v);
    out["overlaps_conjectured"] = pred.conjectured;
    out["shrinker_weight"] = rsvd::shrink::optimal_weight(p, y);
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_simulate(const std::string& config_path, std::optional<std::string> out_path,
                 std::optional<std::string> format_name, std::optional<int> threads) {
  std::ifstream in(config_path);
  if (!in) throw rsvd::io::IoError(config_path, "cannot open config");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: " + std::string(e.what()));
  }
  auto cfg = rsvd::harness::ExperimentConfig::from_json(j);
  if (threads) cfg.threads = *threads;
  const auto records = rsvd::harness::run_experiment(cfg);

  const std::string path = out_path.value_or(cfg.experiment + ".csv");
  const auto format = rsvd::harness::format_from_name(
      format_name.value_or(path.size() > 5 && path.substr(path.size() - 5) == ".json"
                               ? "json"
                               : "csv"));
  rsvd::harness::emit(records, path, format, cfg);
  std::cerr << "wrote " << records.size() << " records to " << path << '\n';
  return 0;
}

int cmd_denoise(const std::string& input, double gamma, double beta,
                std::optional<double> delta, std::optional<int> rank_bound,
                std::optional<double> rho, const std::string& out_prefix,
                const std::string& sketch_name, int q, std::uint64_t seed) {
  const ModelParams p(gamma, beta);
  if (delta && rank_bound)
    throw std::invalid_argument("denoise: give either --delta or --rank-bound, not both");

  const rsvd::Matrix y = rsvd::io::read_matrix(input);
  const rsvd::Index d = std::max<rsvd::Index>(
      1, static_cast<rsvd::Index>(std::llround(beta * static_cast<double>(y.cols()))));
  if (d >= y.rows())
    throw std::invalid_argument("denoise: beta * m must be smaller than n");
  const auto op = rsvd::sketch::SketchOperator::make(
      rsvd::sketch::kind_from_name(sketch_name), d, y.cols(), seed);
  const auto res = rsvd::randomized_svd(y, op, q);

  auto cfg = rank_bound ? rsvd::shrink::DenoiseConfig::with_rank_bound(*rank_bound, rho)
                        : rsvd::shrink::DenoiseConfig::with_delta(delta.value_or(0.1), rho);
  const auto den = rsvd::shrink::denoise(res, p, cfg);

  rsvd::io::write_csv_matrix(out_prefix + ".u.csv", den.u);
  rsvd::io::write_csv_matrix(out_prefix + ".v.csv", den.v);
  ordered_json report;
  report["version"] = RSVD_VERSION;
  report["input"] = input;
  report["n"] = y.rows();
  report["m"] = y.cols();
  report["d"] = d;
  report["gamma"] = gamma;
  report["beta"] = beta;
  report["sketch"] = sketch_name;
  report["q"] = q;
  report["seed"] = seed;
  report["rho_hat"] = den.rho_hat;
  report["rho_was_given"] = rho.has_value();
  report["rank_used"] = den.rank_used;
  report["weights"] = std::vector<double>(den.weights.data(),
                                          den.weights.data() + den.weights.size());
  report["factors"] = {{"u", out_prefix + ".u.csv"}, {"v", out_prefix + ".v.csv"}};
  std::ofstream rep(out_prefix + ".report.json");
  if (!rep) throw rsvd::io::IoError(out_prefix + ".report.json", "cannot open for writing");
  rep << report.dump(2) << '\n';
  std::cout << report.dump(2) << '\n';
  return 0;
}

int cmd_conjecture_check(const std::vector<double>& gamma_grid,
                         const std::vector<double>& beta_grid) {
  rsvd::harness::ExperimentConfig cfg;
  cfg.experiment = "conjecture";
  cfg.gamma_grid = gamma_grid;
  cfg.beta_grid = beta_grid;
  const auto records = rsvd::harness::run_conjecture(cfg);
  ordered_json out = ordered_json::array();
  double worst = 0.0;
  for (const auto& r : records) {
    ordered_json jr;
    for (const auto& [name, value] : r.num) jr[name] = num_or_null(value);
    out.push_back(jr);
    const double gap = r.num[2].second;  // max_gap
    if (!std::isnan(gap)) worst = std::max(worst, gap);
  }
  ordered_json doc;
  doc["version"] = RSVD_VERSION;
  doc["worst_gap"] = worst;
  doc["grid"] = out;
  std::cout << doc.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized SVD on spiked matrices: asymptotic predictions, "
               "Monte-Carlo experiments and optimal shrinkage"};
  app.set_version_flag("--version", RSVD_VERSION);
  app.require_subcommand(1);

  // predict
  auto* predict = app.add_subcommand("predict", "Print deterministic limits as JSON");
  double gamma = 1.0, beta = 0.5;
  std::optional<double> sigma;
  predict->add_option("--gamma", gamma, "aspect ratio m/n")->required();
  predict->add_option("--beta", beta, "undersampling ratio d/m")->required();
  predict->add_option("--sigma", sigma, "spike intensity");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo experiment");
  std::string experiment_cli, config_path;
  std::optional<std::string> out_path, format_name;
  std::optional<int> threads;
  simulate->add_option("--experiment", experiment_cli,
                       "experiment name (must match the config file)");
  simulate->add_option("--config", config_path, "JSON config file")->required();
  simulate->add_option("--out", out_path, "output path");
  simulate->add_option("--format", format_name, "csv or json");
  simulate->add_option("--threads", threads, "worker threads");

  // denoise
  auto* denoise = app.add_subcommand("denoise", "Run the pipeline + shrinker on a matrix");
  std::string input, out_prefix, sketch_name = "gaussian";
  double dn_gamma = 1.0, dn_beta = 0.5;
  std::optional<double> delta, rho;
  std::optional<int> rank_bound;
  int q = 0;
  std::uint64_t seed = 1;
  denoise->add_option("--input", input, "matrix file (csv or binary)")->required();
  denoise->add_option("--gamma", dn_gamma, "aspect ratio m/n")->required();
  denoise->add_option("--beta", dn_beta, "undersampling ratio d/m")->required();
  denoise->add_option("--delta", delta, "rank threshold margin");
  denoise->add_option("--rank-bound", rank_bound, "rank upper bound");
  denoise->add_option("--rho", rho, "known noise scale");
  denoise->add_option("--out", out_prefix, "output prefix")->required();
  denoise->add_option("--sketch", sketch_name, "gaussian|haar|srht|coord");
  denoise->add_option("--q", q, "power iterations");
  denoise->add_option("--seed", seed, "sketch seed");

  // conjecture-check
  auto* conj = app.add_subcommand("conjecture-check",
                                  "Max gap between the shrinker and its closed form");
  std::vector<double> gamma_grid{0.5, 1.0, 2.0};
  std::vector<double> beta_grid{0.1, 0.25, 0.5};
  conj->add_option("--gamma-grid", gamma_grid, "gamma values");
  conj->add_option("--beta-grid", beta_grid, "beta values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*predict) return cmd_predict(gamma, beta, sigma);
    if (*simulate) {
      if (!experiment_cli.empty()) {
        std::ifstream in(config_path);
        if (!in) throw rsvd::io::IoError(config_path, "cannot open config");
        const auto j = nlohmann::json::parse(in, nullptr, false);
        if (!j.is_discarded() && j.contains("experiment") &&
            j.at("experiment").get<std::string>() != experiment_cli)
          throw std::invalid_argument(
              "simulate: --experiment disagrees with the config file");
      }
      return cmd_simulate(config_path, out_path, format_name, threads);
    }
    if (*denoise)
      return cmd_denoise(input, dn_gamma, dn_beta, delta, rank_bound, rho, out_prefix,
                         sketch_name, q, seed);
    if (*conj) return cmd_conjecture_check(gamma_grid, beta_grid);
  } catch (const rsvd::io::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
