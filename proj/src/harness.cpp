#include "rsvd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rsvd/linalg.hpp"
#include "rsvd/matrix_io.hpp"
#include "rsvd/mp_law.hpp"
#include "rsvd/rng.hpp"
#include "rsvd/rsvd.hpp"
#include "rsvd/shrinker.hpp"
#include "rsvd/spiked.hpp"
#include "rsvd/theory.hpp"

#ifdef RSVD_HAVE_OPENBLAS
extern "C" void openblas_set_num_threads(int);
#endif

#ifndef RSVD_VERSION
#define RSVD_VERSION "unversioned"
#endif

namespace rsvd::harness {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void pin_blas_once() {
  static std::once_flag flag;
  std::call_once(flag, [] {
#ifdef RSVD_HAVE_OPENBLAS
    // Worker-count independence of the output requires a fixed BLAS
    // reduction order; parallelism comes from trials instead.
    openblas_set_num_threads(1);
#endif
  });
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sem_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) /
                   static_cast<double>(v.size()));
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t trial) {
  return Rng::stream(seed, stream_tag::trial, (point << 20) ^ trial).next_u64();
}

double resolve_sigma(const ExperimentConfig& cfg, const ModelParams& p) {
  const double star = theory::detection_threshold(p);
  if (cfg.sigma_factor) return *cfg.sigma_factor * star;
  if (cfg.sigma) return *cfg.sigma;
  if (cfg.spikes.size() == 1) return cfg.spikes.front();
  throw std::invalid_argument(
      "config: experiment needs a single spike via 'sigma', 'sigma_factor' or a "
      "1-element 'spikes'");
}

struct SpikeTrial {
  double top_sval = 0.0;
  double overlap_u = 0.0;
  double overlap_v = 0.0;
};

SpikeTrial spiked_trial(const Dims& dims, const Vector& spikes,
                        spiked::NoiseKind noise, sketch::SketchKind kind, int q,
                        std::uint64_t seed, std::uint64_t point, std::uint64_t trial) {
  const auto inst = spiked::sample_spiked(dims.n, dims.m, spikes, noise,
                                          trial_seed(seed, point, 2 * trial));
  const auto op = sketch::SketchOperator::make(kind, dims.d, dims.m,
                                               trial_seed(seed, point, 2 * trial + 1));
  const auto res = randomized_svd(inst.y, op, q);
  const auto ov = spiked::measure_overlaps(inst, res, 1);
  return {res.sing_vals(0), ov.u(0, 0), ov.v(0, 0)};
}

double ks_distance(std::vector<double> sorted_sq, const mp::MpParams& law) {
  std::sort(sorted_sq.begin(), sorted_sq.end());
  const auto n = static_cast<double>(sorted_sq.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted_sq.size(); ++i) {
    const double f = mp::cdf(law, sorted_sq[i]);
    ks = std::max(ks, std::abs(f - static_cast<double>(i + 1) / n));
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
  }
  return ks;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument("config: " + message);
}

std::string format_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

Dims experiment_dims(Index n_request, double gamma, double beta,
                     const std::string& sketch_kind) {
  Index m = static_cast<Index>(std::llround(gamma * static_cast<double>(n_request)));
  Index n = n_request;
  if (sketch_kind == "srht") {
    Index pow2 = 1;
    while (pow2 < m) pow2 <<= 1;
    m = pow2;
    n = static_cast<Index>(std::llround(static_cast<double>(m) / gamma));
  }
  const Index d = static_cast<Index>(std::llround(beta * static_cast<double>(m)));
  if (d < 1 || d >= n || m < 2)
    throw std::invalid_argument("config: dimensions too small for (gamma, beta)");
  return {n, m, d};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  require(j.contains("experiment"), "missing 'experiment'");
  cfg.experiment = j.at("experiment").get<std::string>();
  if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
  if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
  if (j.contains("spikes")) cfg.spikes = j.at("spikes").get<std::vector<double>>();
  if (j.contains("sigma")) cfg.sigma = j.at("sigma").get<double>();
  if (j.contains("sigma_factor")) cfg.sigma_factor = j.at("sigma_factor").get<double>();
  if (j.contains("sigma_factors"))
    cfg.sigma_factors = j.at("sigma_factors").get<std::vector<double>>();
  if (j.contains("sigma_grid"))
    cfg.sigma_grid = j.at("sigma_grid").get<std::vector<double>>();
  if (j.contains("n")) cfg.n = j.at("n").get<Index>();
  if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::vector<Index>>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
  if (j.contains("noise")) cfg.noise = j.at("noise").get<std::string>();
  if (j.contains("noise_kinds"))
    cfg.noise_kinds = j.at("noise_kinds").get<std::vector<std::string>>();
  if (j.contains("sketch")) cfg.sketch = j.at("sketch").get<std::string>();
  if (j.contains("q")) cfg.q = j.at("q").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("k")) cfg.k = j.at("k").get<int>();
  if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
  if (j.contains("rho_known")) cfg.rho_known = j.at("rho_known").get<bool>();
  if (j.contains("bins")) cfg.bins = j.at("bins").get<int>();
  if (j.contains("beta_grid"))
    cfg.beta_grid = j.at("beta_grid").get<std::vector<double>>();
  if (j.contains("gamma_grid"))
    cfg.gamma_grid = j.at("gamma_grid").get<std::vector<double>>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  require(cfg.trials >= 1, "'trials' must be >= 1");
  require(cfg.threads >= 1, "'threads' must be >= 1");
  for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
    require(cfg.n_grid[i] > cfg.n_grid[i - 1], "'n_grid' must be strictly increasing");
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  ordered_json j;
  j["experiment"] = experiment;
  j["gamma"] = gamma;
  j["beta"] = beta;
  if (!spikes.empty()) j["spikes"] = spikes;
  if (sigma) j["sigma"] = *sigma;
  if (sigma_factor) j["sigma_factor"] = *sigma_factor;
  if (!sigma_factors.empty()) j["sigma_factors"] = sigma_factors;
  if (!sigma_grid.empty()) j["sigma_grid"] = sigma_grid;
  j["n"] = n;
  if (!n_grid.empty()) j["n_grid"] = n_grid;
  j["trials"] = trials;
  j["noise"] = noise;
  if (!noise_kinds.empty()) j["noise_kinds"] = noise_kinds;
  j["sketch"] = sketch;
  j["q"] = q;
  j["seed"] = seed;
  j["k"] = k;
  j["delta"] = delta;
  j["rho_known"] = rho_known;
  j["bins"] = bins;
  if (!beta_grid.empty()) j["beta_grid"] = beta_grid;
  if (!gamma_grid.empty()) j["gamma_grid"] = gamma_grid;
  j["threads"] = threads;
  return j;
}

void parallel_trials(int trials, int threads, const std::function<void(int)>& body) {
  pin_blas_once();
  if (threads <= 1 || trials <= 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  const int workers = std::min(threads, trials);
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int t = w; t < trials; t += workers) body(t);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("log_log_slope: need two vectors of equal size >= 2");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = mean_of(lx);
  const double my = mean_of(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxy / sxx;
}

std::vector<Record> run_bulk_hist(const ExperimentConfig& cfg) {
  pin_blas_once();
  require(cfg.spikes.size() <= 1, "bulk_hist supports at most one spike");
  const ModelParams p(cfg.gamma, cfg.beta);
  const auto dims = experiment_dims(cfg.n, cfg.gamma, cfg.beta, cfg.sketch);
  const auto kind = sketch::kind_from_name(cfg.sketch);
  const auto noise = spiked::noise_from_name(cfg.noise);

  Vector spikes(0);
  bool has_spike = cfg.sigma || cfg.sigma_factor || cfg.spikes.size() == 1;
  if (has_spike) {
    spikes.resize(1);
    spikes(0) = resolve_sigma(cfg, p);
  }

  const auto inst =
      spiked::sample_spiked(dims.n, dims.m, spikes, noise, trial_seed(cfg.seed, 0, 0));
  const auto op =
      sketch::SketchOperator::make(kind, dims.d, dims.m, trial_seed(cfg.seed, 0, 1));
  const Vector svals = randomized_singular_values(inst.y, op, cfg.q);

  std::vector<double> bulk_sq;
  const Index skip = has_spike ? 1 : 0;
  for (Index i = skip; i < svals.size(); ++i) bulk_sq.push_back(svals(i) * svals(i));

  const auto law = mp::bulk_params(p);
  const double ks = ks_distance(bulk_sq, law);
  const auto [lo_edge, hi_edge] = mp::bulk_edges(p);

  double outlier_sq = std::nan("");
  double outlier_sq_theory = std::nan("");
  if (has_spike) {
    outlier_sq = svals(0) * svals(0);
    const double y = theory::spike_forward(p, spikes(0));
    outlier_sq_theory = y * y;
  }

  const double lo = std::min(lo_edge, *std::min_element(bulk_sq.begin(), bulk_sq.end()));
  const double hi = std::max(hi_edge, *std::max_element(bulk_sq.begin(), bulk_sq.end()));
  const double width = (hi - lo) / cfg.bins;

  std::vector<Index> counts(static_cast<std::size_t>(cfg.bins), 0);
  for (double v : bulk_sq) {
    auto b = static_cast<Index>((v - lo) / width);
    b = std::clamp<Index>(b, 0, cfg.bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }

  std::vector<Record> records;
  for (int b = 0; b < cfg.bins; ++b) {
    Record r;
    r.add("bin_lo", lo + b * width)
        .add("bin_hi", lo + (b + 1) * width)
        .add("count", static_cast<double>(counts[static_cast<std::size_t>(b)]))
        .add("density_theory", mp::density(law, lo + (b + 0.5) * width))
        .add("ks_distance", ks)
        .add("lambda_minus", lo_edge)
        .add("lambda_plus", hi_edge)
        .add("outlier_sq_mc", outlier_sq)
        .add("outlier_sq_theory", outlier_sq_theory)
        .add("n", static_cast<double>(dims.n))
        .add("m", static_cast<double>(dims.m))
        .add("d", static_cast<double>(dims.d));
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<Record> run_outlier(const ExperimentConfig& cfg) {
  require(!cfg.sigma_grid.empty(), "outlier needs 'sigma_grid'");
  const ModelParams p(cfg.gamma, cfg.beta);
  const auto dims = experiment_dims(cfg.n, cfg.gamma, cfg.beta, cfg.sketch);
  const auto kind = sketch::kind_from_name(cfg.sketch);
  const auto noise = spiked::noise_from_name(cfg.noise);

  std::vector<Record> records;
  for (std::size_t pt = 0; pt < cfg.sigma_grid.size(); ++pt) {
    const double sigma = cfg.sigma_grid[pt];
    Vector spikes(1);
    spikes(0) = sigma;
    std::vector<double> top_sq(static_cast<std::size_t>(cfg.trials));
    parallel_trials(cfg.trials, cfg.threads, [&](int t) {
      const auto trial = spiked_trial(dims, spikes, noise, kind, cfg.q, cfg.seed,
                                      pt, static_cast<std::uint64_t>(t));
      top_sq[static_cast<std::size_t>(t)] = trial.top_sval * trial.top_sval;
    });
    const double y = theory::spike_forward(p, sigma);
    std::vector<double> dev(top_sq.size());
    for (std::size_t i = 0; i < top_sq.size(); ++i)
      dev[i] = std::abs(top_sq[i] - y * y);
    Record r;
    r.add("sigma", sigma)
        .add("outlier_sq_mc", mean_of(top_sq))
        .add("outlier_sq_sem", sem_of(top_sq))
        .add("outlier_sq_theory", y * y)
        .add("abs_dev_mean", mean_of(dev))
        .add("trials", cfg.trials)
        .add("n", static_cast<double>(dims.n));
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<Record> run_angles(const ExperimentConfig& cfg) {
  require(!cfg.sigma_grid.empty(), "angles needs 'sigma_grid'");
  const ModelParams p(cfg.gamma, cfg.beta);
  const double star = theory::detection_threshold(p);
  require(cfg.sigma_grid.front() < star && cfg.sigma_grid.back() > star,
          "angles: 'sigma_grid' must cross the detection threshold");
  const auto dims = experiment_dims(cfg.n, cfg.gamma, cfg.beta, cfg.sketch);
  const auto kind = sketch::kind_from_name(cfg.sketch);
  const auto noise = spiked::noise_from_name(cfg.noise);

  std::vector<Record> records;
  for (std::size_t pt = 0; pt < cfg.sigma_grid.size(); ++pt) {
    const double sigma = cfg.sigma_grid[pt];
    Vector spikes(1);
    spikes(0) = sigma;
    std::vector<double> prod(static_cast<std::size_t>(cfg.trials));
    parallel_trials(cfg.trials, cfg.threads, [&](int t) {
      const auto trial = spiked_trial(dims, spikes, noise, kind, cfg.q, cfg.seed,
                                      pt, static_cast<std::uint64_t>(t));
      prod[static_cast<std::size_t>(t)] = std::abs(trial.overlap_u * trial.overlap_v);
    });
    const auto pred = theory::predict(p, sigma);
    Record r;
    r.add("sigma", sigma)
        .add("overlap_product_mc", mean_of(prod))
        .add("overlap_product_sem", sem_of(prod))
        .add("overlap_product_theory", pred.overlap_u * pred.overlap_v)
        .add("theory_conjectured", pred.conjectured ? 1.0 : 0.0)
        .add("sigma_star", star)
        .add("trials", cfg.trials)
        .add("n", static_cast<double>(dims.n));
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

struct DeviationStats {
  double sval_dev_mean, sval_dev_sem;
  double sq_dev_mean, sq_dev_sem;
  double overlap_dev_mean, overlap_dev_sem;
};

DeviationStats deviation_stats(const ExperimentConfig& cfg, const ModelParams& p,
                               double sigma, Index n_request,
                               spiked::NoiseKind noise, std::uint64_t point) {
  const auto dims = experiment_dims(n_request, cfg.gamma, cfg.beta, cfg.sketch);
  const auto kind = sketch::kind_from_name(cfg.sketch);
  const double y = theory::spike_forward(p, sigma);
  const auto pred = theory::predict(p, sigma);
  const double uv = pred.overlap_u * pred.overlap_v;

  std::vector<double> sval_dev(static_cast<std::size_t>(cfg.trials));
  std::vector<double> sq_dev(static_cast<std::size_t>(cfg.trials));
  std::vector<double> ov_dev(static_cast<std::size_t>(cfg.trials));
  Vector spikes(1);
  spikes(0) = sigma;
  parallel_trials(cfg.trials, cfg.threads, [&](int t) {
    const auto trial = spiked_trial(dims, spikes, noise, kind, cfg.q, cfg.seed, point,
                                    static_cast<std::uint64_t>(t));
    const auto i = static_cast<std::size_t>(t);
    sval_dev[i] = std::abs(trial.top_sval - y);
    sq_dev[i] = std::abs(trial.top_sval * trial.top_sval - y * y);
    ov_dev[i] = std::abs(std::abs(trial.overlap_u * trial.overlap_v) - uv);
  });
  return {mean_of(sval_dev), sem_of(sval_dev), mean_of(sq_dev),
          sem_of(sq_dev),    mean_of(ov_dev),  sem_of(ov_dev)};
}

}  // namespace

std::vector<Record> run_finite_n(const ExperimentConfig& cfg) {
  require(cfg.n_grid.size() >= 4, "finite_n needs an 'n_grid' with >= 4 points");
  require(static_cast<double>(cfg.n_grid.back()) >=
              8.0 * static_cast<double>(cfg.n_grid.front()),
          "finite_n: 'n_grid' must span at least a factor of 8");
  const ModelParams p(cfg.gamma, cfg.beta);
  const double sigma = resolve_sigma(cfg, p);
  const auto noise = spiked::noise_from_name(cfg.noise);

  std::vector<double> ns, sval_means, ov_means;
  std::vector<Record> records;
  for (std::size_t pt = 0; pt < cfg.n_grid.size(); ++pt) {
    const auto stats = deviation_stats(cfg, p, sigma, cfg.n_grid[pt], noise, pt);
    ns.push_back(static_cast<double>(cfg.n_grid[pt]));
    sval_means.push_back(stats.sval_dev_mean);
    ov_means.push_back(stats.overlap_dev_mean);
    Record r;
    r.add("n", static_cast<double>(cfg.n_grid[pt]))
        .add("sigma", sigma)
        .add("sval_dev_mean", stats.sval_dev_mean)
        .add("sval_dev_sem", stats.sval_dev_sem)
        .add("sq_dev_mean", stats.sq_dev_mean)
        .add("sq_dev_sem", stats.sq_dev_sem)
        .add("overlap_dev_mean", stats.overlap_dev_mean)
        .add("overlap_dev_sem", stats.overlap_dev_sem)
        .add("trials", cfg.trials);
    records.push_back(std::move(r));
  }
  const double slope_sval = log_log_slope(ns, sval_means);
  const double slope_ov = log_log_slope(ns, ov_means);
  for (auto& r : records) {
    r.add("slope_sval_dev", slope_sval);
    r.add("slope_overlap_dev", slope_ov);
  }
  return records;
}

std::vector<Record> run_universality(const ExperimentConfig& cfg) {
  const ModelParams p(cfg.gamma, cfg.beta);
  const double sigma =
      cfg.sigma || cfg.sigma_factor || cfg.spikes.size() == 1
          ? resolve_sigma(cfg, p)
          : 1.5 * theory::detection_threshold(p);
  std::vector<std::string> kinds = cfg.noise_kinds;
  if (kinds.empty()) kinds = {"gaussian", "rademacher", "student5"};

  std::vector<Record> records;
  for (std::size_t pt = 0; pt < kinds.size(); ++pt) {
    const auto stats = deviation_stats(cfg, p, sigma, cfg.n,
                                       spiked::noise_from_name(kinds[pt]), pt);
    Record r;
    r.add_text("noise", kinds[pt]);
    r.add("n", static_cast<double>(cfg.n))
        .add("sigma", sigma)
        .add("sval_dev_mean", stats.sval_dev_mean)
        .add("sval_dev_sem", stats.sval_dev_sem)
        .add("overlap_dev_mean", stats.overlap_dev_mean)
        .add("overlap_dev_sem", stats.overlap_dev_sem)
        .add("trials", cfg.trials);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<Record> run_shrinkage(const ExperimentConfig& cfg) {
  require(!cfg.n_grid.empty(), "shrinkage needs 'n_grid'");
  const ModelParams p(cfg.gamma, cfg.beta);
  const double star = theory::detection_threshold(p);
  std::vector<double> factors = cfg.sigma_factors;
  if (factors.empty()) factors = {1.4, 1.1, 0.5};
  Vector spikes(static_cast<Index>(factors.size()));
  for (std::size_t i = 0; i < factors.size(); ++i)
    spikes(static_cast<Index>(i)) = factors[i] * star;
  require(cfg.k >= spikes.size(), "shrinkage: k must be >= number of spikes");
  const auto noise = spiked::noise_from_name(cfg.noise);
  const auto kind = sketch::kind_from_name(cfg.sketch);

  const double x_norm_sq = spikes.squaredNorm();
  std::vector<Record> records;
  for (std::size_t pt = 0; pt < cfg.n_grid.size(); ++pt) {
    const auto dims = experiment_dims(cfg.n_grid[pt], cfg.gamma, cfg.beta, cfg.sketch);
    require(cfg.k <= dims.d, "shrinkage: k exceeds the sketch dimension");
    std::vector<double> excess(static_cast<std::size_t>(cfg.trials));
    std::vector<double> eps_shrink_v(static_cast<std::size_t>(cfg.trials));
    std::vector<double> eps_oracle_v(static_cast<std::size_t>(cfg.trials));
    parallel_trials(cfg.trials, cfg.threads, [&](int t) {
      const auto inst = spiked::sample_spiked(
          dims.n, dims.m, spikes, noise,
          trial_seed(cfg.seed, pt, 2 * static_cast<std::uint64_t>(t)));
      const auto op = sketch::SketchOperator::make(
          kind, dims.d, dims.m,
          trial_seed(cfg.seed, pt, 2 * static_cast<std::uint64_t>(t) + 1));
      const auto res = randomized_svd(inst.y, op, cfg.q);
      const Vector w_star = shrink::oracle_weights(inst, res, cfg.k);
      auto dcfg = shrink::DenoiseConfig::with_rank_bound(
          cfg.k, cfg.rho_known ? std::optional<double>(1.0) : std::nullopt);
      const auto den = shrink::denoise(res, p, dcfg);
      // Orthonormal dyads make both losses quadratic in the weights.
      const double eps_oracle = x_norm_sq - w_star.squaredNorm();
      const double eps_shrink =
          x_norm_sq - 2.0 * den.weights.dot(w_star) + den.weights.squaredNorm();
      const auto i = static_cast<std::size_t>(t);
      eps_oracle_v[i] = eps_oracle;
      eps_shrink_v[i] = eps_shrink;
      excess[i] = (eps_shrink - eps_oracle) / eps_oracle;
    });
    Record r;
    r.add("n", static_cast<double>(dims.n))
        .add("d", static_cast<double>(dims.d))
        .add("excess_error_mean", mean_of(excess))
        .add("excess_error_sem", sem_of(excess))
        .add("eps_shrink_mean", mean_of(eps_shrink_v))
        .add("eps_oracle_mean", mean_of(eps_oracle_v))
        .add("k", cfg.k)
        .add("trials", cfg.trials);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<Record> run_snr_curves(const ExperimentConfig& cfg) {
  require(!cfg.beta_grid.empty(), "snr_curves needs 'beta_grid'");
  const double target_sq = std::sqrt(0.5);  // squared-overlap convention for u/v
  std::vector<double> betas, stars, snr_prod, snr_u, snr_v, spca_thr, spca_snr;
  std::vector<Record> records;
  for (double beta : cfg.beta_grid) {
    const ModelParams p(cfg.gamma, beta);
    const double star = theory::detection_threshold(p);
    const double sp = theory::snr_for_overlap(p, 0.5, theory::OverlapKind::product);
    const double su = theory::snr_for_overlap(p, target_sq, theory::OverlapKind::u);
    const double sv = theory::snr_for_overlap(p, target_sq, theory::OverlapKind::v);
    const double thr_spca = std::pow(beta * cfg.gamma, -0.25);
    const double snr_spca = theory::sketched_pca_snr_half(p);
    betas.push_back(beta);
    stars.push_back(star);
    snr_prod.push_back(sp);
    snr_u.push_back(su);
    snr_v.push_back(sv);
    spca_thr.push_back(thr_spca);
    spca_snr.push_back(snr_spca);
    Record r;
    r.add("beta", beta)
        .add("sigma_star", star)
        .add("sigma_star_small_beta", theory::small_beta_threshold(p))
        .add("snr_product_05", sp)
        .add("snr_u_sq_05", su)
        .add("snr_v_sq_05", sv)
        .add("spca_threshold", thr_spca)
        .add("spca_snr_sq_05", snr_spca);
    records.push_back(std::move(r));
  }
  const double slope_star = log_log_slope(betas, stars);
  const double slope_prod = log_log_slope(betas, snr_prod);
  const double slope_u = log_log_slope(betas, snr_u);
  const double slope_v = log_log_slope(betas, snr_v);
  const double slope_spca_thr = log_log_slope(betas, spca_thr);
  for (auto& r : records) {
    r.add("slope_sigma_star", slope_star);
    r.add("slope_snr_product", slope_prod);
    r.add("slope_snr_u", slope_u);
    r.add("slope_snr_v", slope_v);
    r.add("slope_spca_threshold", slope_spca_thr);
  }
  return records;
}

std::vector<Record> run_sketched_pca(const ExperimentConfig& cfg) {
  const ModelParams p(cfg.gamma, cfg.beta);
  const double sigma = resolve_sigma(cfg, p);
  const auto dims = experiment_dims(cfg.n, cfg.gamma, cfg.beta, cfg.sketch);
  const auto kind = sketch::kind_from_name(cfg.sketch);
  const auto noise = spiked::noise_from_name(cfg.noise);
  Vector spikes(1);
  spikes(0) = sigma;

  std::vector<double> rsvd_v(static_cast<std::size_t>(cfg.trials));
  std::vector<double> spca_v(static_cast<std::size_t>(cfg.trials));
  std::vector<double> spca_out_sq(static_cast<std::size_t>(cfg.trials));
  parallel_trials(cfg.trials, cfg.threads, [&](int t) {
    const auto tu = static_cast<std::uint64_t>(t);
    const auto inst = spiked::sample_spiked(dims.n, dims.m, spikes, noise,
                                            trial_seed(cfg.seed, 0, 3 * tu));
    const auto op =
        sketch::SketchOperator::make(kind, dims.d, dims.m, trial_seed(cfg.seed, 0, 3 * tu + 1));
    const auto res = randomized_svd(inst.y, op, cfg.q);
    const auto ov = spiked::measure_overlaps(inst, res, 1);

    // Sketched PCA projects the rows once: Y_spca = Omega' Y with Omega' Haar.
    const auto op_rows = sketch::SketchOperator::make(
        sketch::SketchKind::haar_projection, dims.d, dims.n,
        trial_seed(cfg.seed, 0, 3 * tu + 2));
    const Matrix y_spca = op_rows.apply_right(inst.y.transpose()).transpose();
    const auto svd = linalg::thin_svd(y_spca);
    const auto i = static_cast<std::size_t>(t);
    rsvd_v[i] = std::abs(ov.v(0, 0));
    spca_v[i] = std::abs(inst.v_factors.col(0).dot(svd.v.col(0)));
    spca_out_sq[i] = svd.s(0) * svd.s(0);
  });

  const auto pred_rsvd = theory::predict(p, sigma);
  const auto pred_spca = theory::sketched_pca_prediction(p, sigma);
  Record r;
  r.add("sigma", sigma)
      .add("n", static_cast<double>(dims.n))
      .add("rsvd_v_mc", mean_of(rsvd_v))
      .add("rsvd_v_sem", sem_of(rsvd_v))
      .add("rsvd_v_theory", pred_rsvd.overlap_v)
      .add("spca_v_mc", mean_of(spca_v))
      .add("spca_v_sem", sem_of(spca_v))
      .add("spca_v_theory", pred_spca.overlap_v)
      .add("spca_outlier_sq_mc", mean_of(spca_out_sq))
      .add("spca_outlier_sq_theory", pred_spca.outlier_sq)
      .add("spca_threshold", std::pow(cfg.beta * cfg.gamma, -0.25))
      .add("trials", cfg.trials);
  return {r};
}

std::vector<Record> run_conjecture(const ExperimentConfig& cfg) {
  std::vector<double> gammas = cfg.gamma_grid.empty()
                                   ? std::vector<double>{cfg.gamma}
                                   : cfg.gamma_grid;
  std::vector<double> betas =
      cfg.beta_grid.empty() ? std::vector<double>{cfg.beta} : cfg.beta_grid;
  std::vector<Record> records;
  for (double g : gammas) {
    for (double b : betas) {
      Record r;
      r.add("gamma", g).add("beta", b);
      if (b >= 1.0 || g * b >= 1.0) {
        // No reduction happens here; the conjecture is the beta = 1 theorem.
        r.add("max_gap", std::nan("")).add("skipped_no_reduction", 1.0);
      } else {
        const ModelParams p(g, b);
        const double edge = std::sqrt(mp::bulk_edges(p).second);
        std::vector<double> grid(200);
        const double lo = edge * 1.001;
        const double hi = std::max(10.0, 3.0 * edge);
        for (std::size_t i = 0; i < grid.size(); ++i)
          grid[i] = lo + (hi - lo) * static_cast<double>(i) /
                             static_cast<double>(grid.size() - 1);
        r.add("max_gap", shrink::conjecture_gap(p, grid))
            .add("skipped_no_reduction", 0.0);
      }
      records.push_back(std::move(r));
    }
  }
  return records;
}

std::vector<Record> run_experiment(const ExperimentConfig& cfg) {
  pin_blas_once();
  if (cfg.experiment == "bulk_hist") return run_bulk_hist(cfg);
  if (cfg.experiment == "outlier") return run_outlier(cfg);
  if (cfg.experiment == "angles") return run_angles(cfg);
  if (cfg.experiment == "finite_n") return run_finite_n(cfg);
  if (cfg.experiment == "universality") return run_universality(cfg);
  if (cfg.experiment == "shrinkage") return run_shrinkage(cfg);
  if (cfg.experiment == "snr_curves") return run_snr_curves(cfg);
  if (cfg.experiment == "sketched_pca") return run_sketched_pca(cfg);
  if (cfg.experiment == "conjecture") return run_conjecture(cfg);
  throw std::invalid_argument("config: unknown experiment '" + cfg.experiment + "'");
}

Format format_from_name(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw std::invalid_argument("unknown output format '" + std::string(name) + "'");
}

namespace {

void check_uniform_schema(const std::vector<Record>& records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    bool ok = records[i].text.size() == records[0].text.size() &&
              records[i].num.size() == records[0].num.size();
    if (ok) {
      for (std::size_t k = 0; k < records[i].text.size(); ++k)
        ok = ok && records[i].text[k].first == records[0].text[k].first;
      for (std::size_t k = 0; k < records[i].num.size(); ++k)
        ok = ok && records[i].num[k].first == records[0].num[k].first;
    }
    if (!ok) throw std::logic_error("emit: records do not share one schema");
  }
}

}  // namespace

void emit(const std::vector<Record>& records, const std::string& path, Format format,
          const ExperimentConfig& cfg) {
  if (records.empty()) throw std::invalid_argument("emit: no records");
  check_uniform_schema(records);
  std::ofstream out(path);
  if (!out) throw io::IoError(path, "cannot open for writing");
  if (format == Format::csv) {
    bool first = true;
    for (const auto& [name, _] : records[0].text) {
      if (!first) out << ',';
      out << name;
      first = false;
    }
    for (const auto& [name, _] : records[0].num) {
      if (!first) out << ',';
      out << name;
      first = false;
    }
    out << '\n';
    for (const auto& r : records) {
      first = true;
      for (const auto& [_, value] : r.text) {
        if (!first) out << ',';
        out << value;
        first = false;
      }
      for (const auto& [_, value] : r.num) {
        if (!first) out << ',';
        out << format_num(value);
        first = false;
      }
      out << '\n';
    }
  } else {
    ordered_json doc;
    doc["metadata"] = {{"version", RSVD_VERSION},
                       {"config", cfg.to_json()},
                       {"seed", cfg.seed}};
    doc["records"] = ordered_json::array();
    for (const auto& r : records) {
      ordered_json jr;
      for (const auto& [name, value] : r.text) jr[name] = value;
      for (const auto& [name, value] : r.num) {
        if (std::isnan(value))
          jr[name] = nullptr;
        else
          jr[name] = value;
      }
      doc["records"].push_back(std::move(jr));
    }
    out << doc.dump(2) << '\n';
  }
  if (!out) throw io::IoError(path, "write failed");
}

std::vector<Record> parse_records_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io::IoError(path, "cannot open for reading");
  json doc = json::parse(in);
  std::vector<Record> records;
  for (const auto& jr : doc.at("records")) {
    Record r;
    for (const auto& [name, value] : jr.items()) {
      if (value.is_string())
        r.add_text(name, value.get<std::string>());
      else if (value.is_null())
        r.add(name, std::nan(""));
      else
        r.add(name, value.get<double>());
    }
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace rsvd::harness
