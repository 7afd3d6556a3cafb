#include "linkbound/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "linkbound/rng.hpp"

namespace linkbound {

std::size_t SamplerConfig::burn_in_count() const {
  return static_cast<std::size_t>(std::floor(burn_in * static_cast<double>(iterations)));
}

void SamplerConfig::validate() const {
  if (iterations < 1) throw Error("sampler needs at least one iteration");
  if (!(burn_in >= 0.0 && burn_in < 1.0)) throw Error("burn-in fraction must lie in [0, 1)");
  if (!hold_latents_fixed) throw Error("sampling the latent entity table is not supported");
}

namespace {

void check_shapes(const Model& model, const RecordTable& records, const LatentEntityTable& latents) {
  if (records.field_count() != model.field_count() || latents.fields() != model.field_count())
    throw Error("records, latents and model disagree on the field count");
  if (latents.rows() == 0) throw Error("at least one latent entity is required");
}

std::vector<double> posterior_from_log(std::vector<double> log_weights, std::size_t record) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (top == kLogZero) throw Error("degenerate posterior at record " + std::to_string(record));
  double total = 0.0;
  for (double& w : log_weights) {
    w = w == kLogZero ? 0.0 : std::exp(w - top);
    total += w;
  }
  for (double& w : log_weights) w /= total;
  return log_weights;
}

double sample_beta(double a, double b, Rng& rng) {
  const double x = std::gamma_distribution<double>(a, 1.0)(rng);
  const double y = std::gamma_distribution<double>(b, 1.0)(rng);
  return x / (x + y);
}

/// Candidate filtering and weighting for the Lambda full conditional. Y is
/// fixed, so the per-field value -> entities index is built once.
class GibbsKernel {
 public:
  GibbsKernel(const Model& model, const RecordTable& records, const LatentEntityTable& latents,
              SamplerMode mode)
      : model_(model), records_(records), latents_(latents), mode_(mode) {
    const std::size_t p = model.field_count();
    index_.resize(p);
    for (std::size_t f = 0; f < p; ++f) {
      index_[f].resize(model.schema()[f].cardinality);
      for (EntityIndex j = 0; j < latents.rows(); ++j) index_[f][latents(j, f)].push_back(j);
    }
  }

  void sweep(ChainState& state, Rng& rng) {
    update_distortion(state, rng);
    update_linkage(state, rng);
    if (mode_ == SamplerMode::hierarchical) update_parameters(state, rng);
    ++state.iteration;
  }

 private:
  double distort(const ChainState& state, std::size_t f, Value x, Value y) const {
    if (model_.schema().is_string(f)) return model_.distortion_probability(f, x, y);
    return state.theta[f][x];
  }

  void update_distortion(ChainState& state, Rng& rng) const {
    for (std::size_t r = 0; r < records_.record_count(); ++r) {
      const auto entity = latents_.row(state.linkage[r]);
      for (std::size_t f = 0; f < model_.field_count(); ++f) {
        const Value x = records_(r, f);
        const double beta = state.beta[f];
        const double w1 = beta * distort(state, f, x, entity[f]);
        const double w0 = x == entity[f] ? 1.0 - beta : 0.0;
        if (!(w0 + w1 > 0.0))
          throw Error("degenerate distortion full conditional at record " + std::to_string(r));
        state.distortion(r, f) = uniform01(rng) * (w0 + w1) < w1 ? 1 : 0;
      }
    }
  }

  void update_linkage(ChainState& state, Rng& rng) {
    const std::size_t p = model_.field_count();
    const auto n = static_cast<EntityIndex>(latents_.rows());
    for (std::size_t r = 0; r < records_.record_count(); ++r) {
      const auto x = records_.record(r);
      exact_fields_.clear();
      distorted_strings_.clear();
      for (std::size_t f = 0; f < p; ++f) {
        if (state.distortion(r, f) == 0) {
          exact_fields_.push_back(f);
        } else if (model_.schema().is_string(f)) {
          distorted_strings_.push_back(f);
        }
      }

      if (exact_fields_.empty()) {
        if (distorted_strings_.empty()) {
          state.linkage[r] = std::uniform_int_distribution<EntityIndex>(0, n - 1)(rng);
        } else if (distorted_strings_.size() == 1) {
          state.linkage[r] = sample_by_value(state, distorted_strings_.front(), x, rng, r);
        } else {
          candidates_.resize(n);
          std::iota(candidates_.begin(), candidates_.end(), EntityIndex{0});
          state.linkage[r] = sample_weighted_candidates(state, x, rng, r);
        }
        continue;
      }

      // Entities must agree with X on every undistorted field.
      std::size_t pivot = exact_fields_.front();
      for (auto f : exact_fields_)
        if (index_[f][x[f]].size() < index_[pivot][x[pivot]].size()) pivot = f;
      candidates_.clear();
      for (EntityIndex j : index_[pivot][x[pivot]]) {
        bool match = true;
        for (auto f : exact_fields_) {
          if (latents_(j, f) != x[f]) {
            match = false;
            break;
          }
        }
        if (match) candidates_.push_back(j);
      }
      if (candidates_.empty())
        throw Error("degenerate linkage full conditional at record " + std::to_string(r));
      if (distorted_strings_.empty()) {
        const auto k = std::uniform_int_distribution<std::size_t>(0, candidates_.size() - 1)(rng);
        state.linkage[r] = candidates_[k];
      } else {
        state.linkage[r] = sample_weighted_candidates(state, x, rng, r);
      }
    }
  }

  EntityIndex sample_weighted_candidates(const ChainState& state, std::span<const Value> x, Rng& rng,
                                         std::size_t record) {
    weights_.resize(candidates_.size());
    double total = 0.0;
    for (std::size_t k = 0; k < candidates_.size(); ++k) {
      double w = 1.0;
      for (auto f : distorted_strings_) w *= distort(state, f, x[f], latents_(candidates_[k], f));
      weights_[k] = w;
      total += w;
    }
    if (!(total > 0.0))
      throw Error("degenerate linkage full conditional at record " + std::to_string(record));
    return candidates_[sample_weighted(weights_, total, rng)];
  }

  /// One distorted string field and no exact fields: the weight depends only on
  /// the entity's value in that field.
  EntityIndex sample_by_value(const ChainState& state, std::size_t f, std::span<const Value> x,
                              Rng& rng, std::size_t record) {
    const auto& groups = index_[f];
    weights_.resize(groups.size());
    double total = 0.0;
    for (Value v = 0; v < groups.size(); ++v) {
      weights_[v] = groups[v].empty()
                        ? 0.0
                        : static_cast<double>(groups[v].size()) * distort(state, f, x[f], v);
      total += weights_[v];
    }
    if (!(total > 0.0))
      throw Error("degenerate linkage full conditional at record " + std::to_string(record));
    const auto& members = groups[sample_weighted(weights_, total, rng)];
    return members[std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng)];
  }

  void update_parameters(ChainState& state, Rng& rng) const {
    const auto& params = model_.params();
    const std::size_t r_count = records_.record_count();
    for (std::size_t f = 0; f < model_.field_count(); ++f) {
      double distorted = 0.0;
      for (std::size_t r = 0; r < r_count; ++r) distorted += state.distortion(r, f);
      const double a = params.a.empty() ? 1.0 : params.a[f];
      const double b = params.b.empty() ? 1.0 : params.b[f];
      state.beta[f] = sample_beta(a + distorted, b + static_cast<double>(r_count) - distorted, rng);

      if (model_.kind() != ModelKind::categorical) continue;
      const std::size_t m_count = model_.schema()[f].cardinality;
      std::vector<double> shape(m_count, 1.0);
      if (!params.mu.empty() && !params.mu[f].empty()) shape = params.mu[f];
      for (std::size_t r = 0; r < r_count; ++r)
        if (state.distortion(r, f) == 1) shape[records_(r, f)] += 1.0;
      for (std::size_t j = 0; j < latents_.rows(); ++j) shape[latents_(j, f)] += 1.0;
      double total = 0.0;
      for (std::size_t m = 0; m < m_count; ++m) {
        state.theta[f][m] = std::max(std::gamma_distribution<double>(shape[m], 1.0)(rng), 1e-300);
        total += state.theta[f][m];
      }
      for (double& t : state.theta[f]) t /= total;
    }
  }

  const Model& model_;
  const RecordTable& records_;
  const LatentEntityTable& latents_;
  SamplerMode mode_;
  std::vector<std::vector<std::vector<EntityIndex>>> index_;
  std::vector<std::size_t> exact_fields_;
  std::vector<std::size_t> distorted_strings_;
  std::vector<EntityIndex> candidates_;
  std::vector<double> weights_;
};

}  // namespace

std::vector<double> exact_posterior(const Model& model, const LatentEntityTable& latents,
                                    std::span<const Value> record) {
  if (latents.rows() == 0) throw Error("at least one latent entity is required");
  std::vector<double> log_weights(latents.rows());
  for (std::size_t j = 0; j < latents.rows(); ++j)
    log_weights[j] = model.record_log_likelihood(record, latents.row(j));
  return posterior_from_log(std::move(log_weights), 0);
}

std::vector<std::vector<double>> exact_posteriors(const Model& model, const RecordTable& records,
                                                  const LatentEntityTable& latents) {
  check_shapes(model, records, latents);
  std::vector<std::vector<double>> out(records.record_count());
  for (std::size_t r = 0; r < records.record_count(); ++r) {
    std::vector<double> log_weights(latents.rows());
    for (std::size_t j = 0; j < latents.rows(); ++j)
      log_weights[j] = model.record_log_likelihood(records.record(r), latents.row(j));
    out[r] = posterior_from_log(std::move(log_weights), r);
  }
  return out;
}

void exact_sample_linkage(const Model& model, const RecordTable& records,
                          const LatentEntityTable& latents, std::size_t draws, std::uint64_t seed,
                          const LinkageObserver& observer) {
  auto cumulative = exact_posteriors(model, records, latents);
  for (auto& row : cumulative) {
    std::partial_sum(row.begin(), row.end(), row.begin());
  }
  Rng rng(seed);
  LinkageStructure sample(records.record_count());
  for (std::size_t d = 0; d < draws; ++d) {
    for (std::size_t r = 0; r < sample.size(); ++r) {
      const auto& row = cumulative[r];
      const double u = uniform01(rng) * row.back();
      auto it = std::upper_bound(row.begin(), row.end(), u);
      if (it == row.end()) --it;
      sample[r] = static_cast<EntityIndex>(it - row.begin());
    }
    observer(d, sample);
  }
}

std::vector<LinkageStructure> exact_sample_linkage(const Model& model, const RecordTable& records,
                                                   const LatentEntityTable& latents,
                                                   std::size_t draws, std::uint64_t seed) {
  std::vector<LinkageStructure> out;
  out.reserve(draws);
  exact_sample_linkage(model, records, latents, draws, seed,
                       [&](std::size_t, const LinkageStructure& s) { out.push_back(s); });
  return out;
}

ChainState initial_state(const Model& model, const RecordTable& records,
                         const LatentEntityTable& latents, SamplerMode mode, std::uint64_t seed) {
  check_shapes(model, records, latents);
  const auto& params = model.params();
  ChainState state;
  state.seed = seed;
  state.theta = params.theta;
  state.beta = params.beta;
  if (mode == SamplerMode::hierarchical) {
    for (std::size_t f = 0; f < model.field_count(); ++f) {
      const double a = params.a.empty() ? 1.0 : params.a[f];
      const double b = params.b.empty() ? 1.0 : params.b[f];
      state.beta[f] = a / (a + b);
      if (model.kind() == ModelKind::categorical && !params.mu.empty() && !params.mu[f].empty()) {
        const double total = std::accumulate(params.mu[f].begin(), params.mu[f].end(), 0.0);
        for (std::size_t m = 0; m < params.mu[f].size(); ++m) state.theta[f][m] = params.mu[f][m] / total;
      }
    }
  }

  Rng rng(seed);
  const std::size_t p = model.field_count();
  state.linkage.resize(records.record_count());
  state.distortion = DistortionMask(records.record_count(), p);
  std::vector<EntityIndex> feasible;
  for (std::size_t r = 0; r < records.record_count(); ++r) {
    feasible.clear();
    for (EntityIndex j = 0; j < latents.rows(); ++j) {
      bool possible = true;
      for (std::size_t f = 0; f < p && possible; ++f) {
        const Value x = records(r, f);
        const Value y = latents(j, f);
        const double distort = model.schema().is_string(f) ? model.distortion_probability(f, x, y)
                                                           : state.theta[f][x];
        possible = (x == y ? 1.0 - state.beta[f] : 0.0) + state.beta[f] * distort > 0.0;
      }
      if (possible) feasible.push_back(j);
    }
    if (feasible.empty()) throw Error("no entity can explain record " + std::to_string(r));
    state.linkage[r] = feasible[std::uniform_int_distribution<std::size_t>(0, feasible.size() - 1)(rng)];
    for (std::size_t f = 0; f < p; ++f)
      state.distortion(r, f) = records(r, f) != latents(state.linkage[r], f) ? 1 : 0;
  }
  return state;
}

void gibbs_run(const Model& model, const RecordTable& records, const LatentEntityTable& latents,
               ChainState state, const SamplerConfig& config, const ChainObserver& observer) {
  config.validate();
  check_shapes(model, records, latents);
  if (state.linkage.size() != records.record_count() ||
      state.distortion.rows() != records.record_count() || state.beta.size() != model.field_count() ||
      state.theta.size() != model.field_count())
    throw Error("chain state does not match the data");
  GibbsKernel kernel(model, records, latents, config.mode);
  Rng rng(config.seed);
  state.seed = config.seed;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    kernel.sweep(state, rng);
    observer(state);
  }
}

std::vector<ChainState> gibbs_run(const Model& model, const RecordTable& records,
                                  const LatentEntityTable& latents, ChainState init,
                                  const SamplerConfig& config) {
  std::vector<ChainState> chain;
  chain.reserve(config.iterations);
  gibbs_run(model, records, latents, std::move(init), config,
            [&](const ChainState& s) { chain.push_back(s); });
  return chain;
}

void ErrorAccumulator::add(const LinkageStructure& sample) {
  if (sample.size() != truth_->size() || sample.empty())
    throw Error("sample and truth cover different records");
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < sample.size(); ++r) wrong += sample[r] != (*truth_)[r];
  fractions_.push_back(static_cast<double>(wrong) / static_cast<double>(sample.size()));
}

ErrorEstimate ErrorAccumulator::estimate() const {
  const std::size_t n = fractions_.size();
  if (n == 0) throw Error("error rate needs at least one sample");
  ErrorEstimate out;
  out.samples = n;
  out.rate = std::accumulate(fractions_.begin(), fractions_.end(), 0.0) / static_cast<double>(n);
  if (n < 4) {
    const double cells = static_cast<double>(n * truth_->size());
    out.standard_error = std::sqrt(out.rate * (1.0 - out.rate) / cells);
    return out;
  }
  const auto batches = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  const std::size_t batch_size = n / batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t k = 0; k < batch_size; ++k) means[b] += fractions_[b * batch_size + k];
    means[b] /= static_cast<double>(batch_size);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  const double variance = ss / static_cast<double>(batches - 1);
  out.standard_error = std::sqrt(variance / static_cast<double>(batches));
  return out;
}

ErrorEstimate error_rate(std::span<const LinkageStructure> samples, const LinkageStructure& truth,
                         std::size_t burn_in) {
  if (samples.size() <= burn_in) throw Error("empty sample set after burn-in");
  ErrorAccumulator acc(truth);
  for (std::size_t s = burn_in; s < samples.size(); ++s) acc.add(samples[s]);
  return acc.estimate();
}

ChainSummary summarize(std::span<const LinkageStructure> samples, const LinkageStructure& truth,
                       const SamplerConfig& config, std::size_t burn_in) {
  ChainSummary summary;
  summary.error = error_rate(samples, truth, burn_in);
  summary.seed = config.seed;
  summary.config = config;
  summary.match_frequency.assign(truth.size(), 0.0);
  const double kept = static_cast<double>(samples.size() - burn_in);
  for (std::size_t s = burn_in; s < samples.size(); ++s)
    for (std::size_t r = 0; r < truth.size(); ++r)
      summary.match_frequency[r] += samples[s][r] == truth[r] ? 1.0 : 0.0;
  for (double& m : summary.match_frequency) m /= kept;
  return summary;
}

}  // namespace linkbound
