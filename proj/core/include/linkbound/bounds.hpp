#pragma once

#include <string>
#include <vector>

#include "linkbound/model.hpp"
#include "linkbound/priors.hpp"
#include "linkbound/types.hpp"

namespace linkbound {

/// Two linkage hypotheses over the same latent table and parameters. P is the
/// distribution of X under `truth`, Q under `alternative`.
struct HypothesisPair {
  const Model& model;
  const LatentEntityTable& latents;
  const LinkageStructure& truth;
  const LinkageStructure& alternative;
};

struct KlResult {
  double nats = 0.0;
  /// Non-empty when Q puts zero mass where P does not; nats is then +inf.
  std::string diagnostic;
};

/// Exact KL(P || Q) in nats, summed record-major, field-minor.
KlResult kl_exact(const HypothesisPair& pair);

/// KL of one field between the likelihoods of two latent values.
double field_kl(const Model& model, std::size_t field, Value latent_p, Value latent_q);

/// String-model KL computed on the unnormalized masses
/// I(y = m)(1 - beta) + alpha(m) beta exp(-c d(m, y)) that the kappa
/// derivation works with. Categorical fields use their exact likelihoods.
double kl_unnormalized(const HypothesisPair& pair);

/// sum_m |P(m) - Q(m)|; exactly 2(1 - beta) for distinct categorical values.
double l1_per_record(const HypothesisPair& pair, std::size_t record, std::size_t field);
double field_l1(const Model& model, std::size_t field, Value latent_p, Value latent_q);

/// Pinsker-type lower bound: categorical fields contribute
/// I(Y != Y')(1 - beta)^2, string fields contribute L1^2 / 2.
double pinsker_lower(const HypothesisPair& pair);

/// gamma over every record: max over Lambda != Lambda' of
/// 2 sum I(Y != Y')(1 - beta) ln(1 / (min_m theta_m beta)).
/// +inf when an active field has beta = 0.
double gamma_bound(const Model& model, const LatentEntityTable& latents, std::size_t records);
double gamma_bound(const LinkageModel& model, const LatentEntityTable& latents, std::size_t records);
/// gamma evaluated at the given pair instead of maximized.
double gamma_pair(const HypothesisPair& pair);

/// E[exp(-c d(M, y))] with M ~ alpha.
double distance_mgf(const StringUniverse& universe, Value latent, double c);

enum class KappaVariant {
  /// beta on the second summand, summed over all records.
  appendix,
  /// No beta on the second summand, one record.
  main_text,
};

/// kappa maximized over linkage structures of `records` records.
double kappa_bound(const Model& model, const LatentEntityTable& latents, std::size_t records,
                   KappaVariant variant = KappaVariant::appendix);
double kappa_bound(const LinkageModel& model, const LatentEntityTable& latents,
                   std::size_t records, KappaVariant variant = KappaVariant::appendix);
/// kappa bracket of the given pair times ln(1 / min Q) over the pair's Q.
double kappa_pair(const HypothesisPair& pair);

/// min_m I(y = m)(1 - beta) + alpha(m) beta exp(-c d(m, y)), or
/// I(y = m)(1 - beta) + theta_m beta for categorical fields.
double min_q_mass(const Model& model, std::size_t field, Value latent_q);

/// gamma for Model 1, kappa (appendix) for Model 2.
double model_bound(const Model& model, const LatentEntityTable& latents, std::size_t records);

struct FanoBound {
  double raw = 0.0;
  double clamped = 0.0;
};

/// 1 - (bound + ln 2) / ln(N - 1), clamped to [0, 1]. Requires N >= 3.
FanoBound fano_lower(double bound, std::size_t entities);

/// Largest single-record KL over ordered pairs of distinct entities.
double max_record_kl(const Model& model, const LatentEntityTable& latents);

struct BoundReport {
  bool string_model = false;
  double exact_kl = 0.0;
  std::vector<double> l1_per_record;  // summed over fields
  double bound = 0.0;                 // gamma or kappa over all records
  double bound_per_record = 0.0;      // same bound for a single record
  double pinsker_lower = 0.0;
  double fano_raw = 0.0;
  double fano_error_lower = 0.0;  // clamped, from bound_per_record
  std::size_t r = 0;              // N - 1
  std::string diagnostic;

  /// pinsker_lower <= exact_kl <= bound (within tolerance).
  bool dominance_holds(double tolerance = 1e-9) const;
};

/// Hardest alternative for each record: the entity j != truth maximizing the
/// record's bound term, lowest index on ties.
LinkageStructure hardest_alternative(const Model& model, const LatentEntityTable& latents,
                                     const LinkageStructure& truth);

/// Report for truth against its hardest alternative.
BoundReport bound_report(const Model& model, const LatentEntityTable& latents,
                         const LinkageStructure& truth);

}  // namespace linkbound
