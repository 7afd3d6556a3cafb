#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "linkbound/model.hpp"
#include "linkbound/types.hpp"

namespace linkbound {

enum class SamplerMode {
  /// theta and beta held at the model's values.
  fixed_params,
  /// beta ~ Beta and, for Model 1, theta ~ Dirichlet updated every sweep.
  hierarchical,
};

struct SamplerConfig {
  std::size_t iterations = 10000;
  double burn_in = 0.1;
  SamplerMode mode = SamplerMode::fixed_params;
  bool hold_latents_fixed = true;
  std::uint64_t seed = 0;

  std::size_t burn_in_count() const;
  void validate() const;
};

struct ChainState {
  LinkageStructure linkage;
  DistortionMask distortion;
  std::vector<std::vector<double>> theta;
  std::vector<double> beta;
  std::size_t iteration = 0;
  std::uint64_t seed = 0;
};

/// Pr(Lambda_ij = j' | X_ij, Y, params) under the uniform prior with z
/// marginalized out. Throws when every entity is impossible.
std::vector<double> exact_posterior(const Model& model, const LatentEntityTable& latents,
                                    std::span<const Value> record);

/// Posterior for every record, row r = record r.
std::vector<std::vector<double>> exact_posteriors(const Model& model, const RecordTable& records,
                                                  const LatentEntityTable& latents);

using LinkageObserver = std::function<void(std::size_t draw, const LinkageStructure&)>;

/// `draws` independent draws of the whole linkage structure from the exact
/// per-record posteriors.
void exact_sample_linkage(const Model& model, const RecordTable& records,
                          const LatentEntityTable& latents, std::size_t draws, std::uint64_t seed,
                          const LinkageObserver& observer);
std::vector<LinkageStructure> exact_sample_linkage(const Model& model, const RecordTable& records,
                                                   const LatentEntityTable& latents,
                                                   std::size_t draws, std::uint64_t seed);

/// Starting state: each Lambda_ij uniform over entities with positive
/// likelihood, z = I(X != Y[Lambda]); theta and beta at the model values in
/// fixed mode and at their prior means in hierarchical mode.
ChainState initial_state(const Model& model, const RecordTable& records,
                         const LatentEntityTable& latents, SamplerMode mode, std::uint64_t seed);

using ChainObserver = std::function<void(const ChainState&)>;

/// Systematic-scan Gibbs sampler with Y held fixed. Each sweep updates every
/// z, then every Lambda, then (hierarchical only) beta and theta. The observer
/// sees the state after each of the config.iterations sweeps.
void gibbs_run(const Model& model, const RecordTable& records, const LatentEntityTable& latents,
               ChainState state, const SamplerConfig& config, const ChainObserver& observer);
std::vector<ChainState> gibbs_run(const Model& model, const RecordTable& records,
                                  const LatentEntityTable& latents, ChainState init,
                                  const SamplerConfig& config);

struct ErrorEstimate {
  double rate = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Mean of I(sample != truth) over samples after burn_in and over records.
/// The standard error is from batch means of the per-sample error fractions
/// (binomial over cells when fewer than four samples remain).
ErrorEstimate error_rate(std::span<const LinkageStructure> samples, const LinkageStructure& truth,
                         std::size_t burn_in);

/// Streaming form of error_rate.
class ErrorAccumulator {
 public:
  explicit ErrorAccumulator(const LinkageStructure& truth) : truth_(&truth) {}
  void add(const LinkageStructure& sample);
  ErrorEstimate estimate() const;

 private:
  const LinkageStructure* truth_;
  std::vector<double> fractions_;
};

/// Per-record match frequencies Pr(sample_r == truth_r) plus the pooled error.
struct ChainSummary {
  std::vector<double> match_frequency;
  ErrorEstimate error;
  std::uint64_t seed = 0;
  SamplerConfig config;
};

ChainSummary summarize(std::span<const LinkageStructure> samples, const LinkageStructure& truth,
                       const SamplerConfig& config, std::size_t burn_in);

}  // namespace linkbound
