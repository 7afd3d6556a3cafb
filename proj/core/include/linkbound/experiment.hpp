#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "linkbound/samplers.hpp"
#include "linkbound/simulate.hpp"

namespace linkbound {

struct ExperimentConfig {
  SamplerConfig sampler{.iterations = 2000};
  /// Exact-sampler draws per replicate.
  std::size_t exact_draws = 2000;
  std::size_t workers = 1;
  /// When false every `seconds` entry is 0 so output is byte-reproducible.
  bool record_timing = true;
};

struct ExperimentRow {
  double value = 0.0;
  double fano_raw = 0.0;
  double fano_clamped = 0.0;
  double kl_mean = 0.0;
  double bound = 0.0;  // per-record gamma or kappa, replicate mean
  double err_exact = 0.0;
  double se_exact = 0.0;
  double err_gibbs = 0.0;
  double se_gibbs = 0.0;
  double seconds = 0.0;
  std::string failure;  // empty on success

  bool failed() const { return !failure.empty(); }
};

struct ExperimentResult {
  std::string name;
  std::string sweep_param;
  std::vector<ExperimentRow> rows;
};

/// Every grid point x replicate: generate data, compute the per-record bound
/// and its Fano error floor, run the exact and Gibbs samplers. Replicate seeds
/// are s = derive_seed(root, {point, replicate}); the dataset, exact sampler,
/// Gibbs initial state and Gibbs chain use derive_seed(s, {0}), {1}, {2}, {3}.
/// Rows come back in grid order.
ExperimentResult run_experiment(const SweepSpec& spec, const ExperimentConfig& config);

/// The dataset run_experiment generates for one grid point and replicate.
Dataset replicate_dataset(const SweepSpec& spec, std::size_t point, std::size_t replicate);

/// Columns: sweep_param, value, fano_raw, fano_clamped, kl_mean,
/// bound_gamma_or_kappa, err_exact, se_exact, err_gibbs, se_gibbs, seconds.
void write_csv(const ExperimentResult& result, std::ostream& out);
std::string result_to_json(const ExperimentResult& result);
ExperimentResult result_from_json(const std::string& text);
ExperimentResult result_from_csv(const std::string& text, const std::string& name = {});
/// Three series (bound, exact, gibbs) for one figure panel.
std::string plotdata_json(const ExperimentResult& result);

void emit_csv(const ExperimentResult& result, const std::filesystem::path& path);
void emit_json(const ExperimentResult& result, const std::filesystem::path& path);
void emit_plotdata(const ExperimentResult& result, const std::filesystem::path& path);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Rows where fano_clamped > err_exact + 3 se_exact, as messages.
std::vector<std::string> fano_violations(const ExperimentResult& result);

}  // namespace linkbound
