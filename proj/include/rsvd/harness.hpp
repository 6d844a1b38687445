#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsvd/common.hpp"
#include "rsvd/model.hpp"

namespace rsvd::harness {

/// Monte-Carlo experiment description. Mirrors the JSON config files consumed
/// by the CLI; unused fields are ignored by the individual runners, missing
/// required fields are reported as validation errors.
struct ExperimentConfig {
  std::string experiment;

  double gamma = 1.0;
  double beta = 0.5;

  std::vector<double> spikes;          ///< absolute spike intensities
  std::optional<double> sigma;         ///< single absolute spike
  std::optional<double> sigma_factor;  ///< single spike, in units of sigma*
  std::vector<double> sigma_factors;   ///< multi-spike, in units of sigma*
  std::vector<double> sigma_grid;      ///< absolute grid (angles/outlier)

  Index n = 2000;
  std::vector<Index> n_grid;

  int trials = 50;
  std::string noise = "gaussian";
  std::vector<std::string> noise_kinds;
  std::string sketch = "gaussian";
  int q = 0;
  std::uint64_t seed = 1;

  int k = 6;             ///< shrinkage rank bound
  double delta = 0.1;    ///< rank-threshold margin
  bool rho_known = false;///< use rho = 1 instead of estimating
  int bins = 60;         ///< bulk histogram bins

  std::vector<double> beta_grid;
  std::vector<double> gamma_grid;

  int threads = 1;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// One output row: ordered text fields then ordered numeric fields. Every
/// record of an experiment carries the same field names in the same order.
struct Record {
  std::vector<std::pair<std::string, std::string>> text;
  std::vector<std::pair<std::string, double>> num;

  Record& add(std::string name, double value) {
    num.emplace_back(std::move(name), value);
    return *this;
  }
  Record& add_text(std::string name, std::string value) {
    text.emplace_back(std::move(name), std::move(value));
    return *this;
  }
};

std::vector<Record> run_bulk_hist(const ExperimentConfig& cfg);
std::vector<Record> run_outlier(const ExperimentConfig& cfg);
std::vector<Record> run_angles(const ExperimentConfig& cfg);
std::vector<Record> run_finite_n(const ExperimentConfig& cfg);
std::vector<Record> run_universality(const ExperimentConfig& cfg);
std::vector<Record> run_shrinkage(const ExperimentConfig& cfg);
std::vector<Record> run_snr_curves(const ExperimentConfig& cfg);
std::vector<Record> run_sketched_pca(const ExperimentConfig& cfg);
std::vector<Record> run_conjecture(const ExperimentConfig& cfg);

/// Dispatch on cfg.experiment.
std::vector<Record> run_experiment(const ExperimentConfig& cfg);

enum class Format { csv, json };
Format format_from_name(std::string_view name);

/// Writes records to path. CSV: one header row naming every field, then one
/// line per record. JSON: {"metadata": {version, config, seed}, "records":
/// [...]}. Output bytes are a pure function of (records, config), so reruns
/// at a fixed seed are byte-identical.
void emit(const std::vector<Record>& records, const std::string& path, Format format,
          const ExperimentConfig& cfg);

/// Round-trip helper for the JSON format (tests).
std::vector<Record> parse_records_json(const std::string& path);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Run `body(trial)` for trial in [0, trials) on `threads` workers. Results
/// must be written into per-trial slots; the trial -> worker assignment never
/// affects output. BLAS is pinned to one thread so that worker count cannot
/// perturb reductions.
void parallel_trials(int trials, int threads, const std::function<void(int)>& body);

/// Experiment dimensions for a requested n: m = round(gamma*n), d =
/// round(beta*m). For SRHT m is rounded up to the next power of two and n is
/// re-derived to preserve gamma.
struct Dims {
  Index n, m, d;
};
Dims experiment_dims(Index n_request, double gamma, double beta,
                     const std::string& sketch_kind);

}  // namespace rsvd::harness
