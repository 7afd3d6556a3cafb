#include "linkbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace linkbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const HypothesisPair& pair) {
  const std::size_t p = pair.model.field_count();
  if (pair.latents.fields() != p) throw Error("latent table does not match the model's fields");
  if (pair.truth.size() != pair.alternative.size())
    throw Error("hypotheses cover different record counts");
  for (std::size_t r = 0; r < pair.truth.size(); ++r) {
    if (pair.truth[r] >= pair.latents.rows() || pair.alternative[r] >= pair.latents.rows())
      throw Error("linkage entry out of range");
  }
}

void require_categorical(const Model& model, const char* what) {
  if (model.schema().string_count() > 0)
    throw Error(std::string(what) + " is defined for categorical fields only");
}

/// Unnormalized mass I(y = m)(1 - beta) + alpha(m) beta exp(-c d(m, y)) for
/// string fields; the exact likelihood for categorical ones.
double unnormalized_mass(const Model& model, std::size_t field, Value m, Value latent) {
  const auto& spec = model.schema()[field];
  if (spec.kind == FieldKind::categorical) return model.field_likelihood(field, m, latent);
  const double beta = model.beta(field);
  const auto& u = *spec.universe;
  return (m == latent ? 1.0 - beta : 0.0) +
         u.frequency(m) * beta * std::exp(-model.steepness() * u.distance(m, latent));
}

double kl_terms(std::span<const double> p, std::span<const double> q) {
  double total = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    if (p[m] <= 0.0) continue;
    if (q[m] <= 0.0) return kInf;
    total += p[m] * std::log(p[m] / q[m]);
  }
  return total;
}

/// 2 I(y != y')(1 - beta) ln(1 / (min theta beta)); 0 for equal values.
double gamma_term(const Model& model, std::size_t field, Value y, Value y_alt) {
  if (y == y_alt) return 0.0;
  const double beta = model.beta(field);
  if (beta >= 1.0) return 0.0;
  const auto& theta = model.params().theta[field];
  const double min_theta = *std::min_element(theta.begin(), theta.end());
  const double floor = min_theta * beta;
  if (floor <= 0.0) return kInf;
  return 2.0 * (1.0 - beta) * std::log(1.0 / floor);
}

/// One field's share of the kappa bracket.
double kappa_term(const Model& model, std::size_t field, Value y, Value y_alt,
                  KappaVariant variant) {
  if (y == y_alt) return 0.0;
  const double beta = model.beta(field);
  double term = 2.0 * (1.0 - beta);
  const auto& spec = model.schema()[field];
  if (spec.kind == FieldKind::string) {
    const double c = model.steepness();
    const double weight = variant == KappaVariant::appendix ? beta : 1.0;
    term += weight * (1.0 - std::exp(-c * spec.universe->distance(y, y_alt))) *
            distance_mgf(*spec.universe, y, c);
  }
  return term;
}

/// Per-field value x value tables of a pairwise quantity.
struct PairTables {
  std::vector<std::vector<double>> table;
  std::vector<std::size_t> stride;

  template <typename F>
  PairTables(const Model& model, F&& fn) {
    const std::size_t p = model.field_count();
    table.resize(p);
    stride.resize(p);
    for (std::size_t f = 0; f < p; ++f) {
      const std::size_t m = model.schema()[f].cardinality;
      stride[f] = m;
      table[f].resize(m * m);
      for (Value a = 0; a < m; ++a)
        for (Value b = 0; b < m; ++b) table[f][a * m + b] = fn(f, a, b);
    }
  }

  double row_pair(std::span<const Value> a, std::span<const Value> b) const {
    double total = 0.0;
    for (std::size_t f = 0; f < table.size(); ++f) total += table[f][a[f] * stride[f] + b[f]];
    return total;
  }
};

/// Distinct latent rows; equal rows give equal terms, so pair searches run over
/// these only.
std::vector<std::size_t> distinct_rows(const LatentEntityTable& latents) {
  std::map<std::vector<Value>, std::size_t> seen;
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < latents.rows(); ++j) {
    const auto row = latents.row(j);
    if (seen.emplace(std::vector<Value>(row.begin(), row.end()), j).second) out.push_back(j);
  }
  return out;
}

/// ln(1 / min Q) over all fields of one latent row.
double log_inverse_min_q(const Model& model, std::span<const Value> row) {
  double worst = 0.0;
  for (std::size_t f = 0; f < row.size(); ++f) {
    const double q = min_q_mass(model, f, row[f]);
    if (q <= 0.0) return kInf;
    worst = std::max(worst, -std::log(q));
  }
  return worst;
}

/// bracket * log factor with 0 * inf = 0.
double scaled(double bracket, double log_factor) {
  if (bracket == 0.0) return 0.0;
  return bracket * log_factor;
}

}  // namespace

double field_kl(const Model& model, std::size_t field, Value latent_p, Value latent_q) {
  if (latent_p == latent_q) return 0.0;
  const auto p = model.field_distribution(field, latent_p);
  const auto q = model.field_distribution(field, latent_q);
  return kl_terms(p, q);
}

KlResult kl_exact(const HypothesisPair& pair) {
  validate(pair);
  KlResult out;
  for (std::size_t r = 0; r < pair.truth.size(); ++r) {
    const auto y = pair.latents.row(pair.truth[r]);
    const auto y_alt = pair.latents.row(pair.alternative[r]);
    for (std::size_t f = 0; f < y.size(); ++f) {
      const double d = field_kl(pair.model, f, y[f], y_alt[f]);
      if (std::isinf(d)) {
        out.nats = kInf;
        out.diagnostic = "Q has zero mass where P is positive (record " + std::to_string(r) +
                         ", field " + std::to_string(f) + ")";
        return out;
      }
      out.nats += d;
    }
  }
  return out;
}

double kl_unnormalized(const HypothesisPair& pair) {
  validate(pair);
  double total = 0.0;
  for (std::size_t r = 0; r < pair.truth.size(); ++r) {
    const auto y = pair.latents.row(pair.truth[r]);
    const auto y_alt = pair.latents.row(pair.alternative[r]);
    for (std::size_t f = 0; f < y.size(); ++f) {
      if (y[f] == y_alt[f]) continue;
      const std::size_t m_count = pair.model.schema()[f].cardinality;
      for (Value m = 0; m < m_count; ++m) {
        const double p = unnormalized_mass(pair.model, f, m, y[f]);
        const double q = unnormalized_mass(pair.model, f, m, y_alt[f]);
        if (p <= 0.0) continue;
        if (q <= 0.0) return kInf;
        total += p * std::log(p / q);
      }
    }
  }
  return total;
}

double field_l1(const Model& model, std::size_t field, Value latent_p, Value latent_q) {
  if (latent_p == latent_q) return 0.0;
  if (model.schema()[field].kind == FieldKind::categorical) return 2.0 * (1.0 - model.beta(field));
  const auto p = model.field_distribution(field, latent_p);
  const auto q = model.field_distribution(field, latent_q);
  double total = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) total += std::abs(p[m] - q[m]);
  return total;
}

double l1_per_record(const HypothesisPair& pair, std::size_t record, std::size_t field) {
  validate(pair);
  if (record >= pair.truth.size() || field >= pair.model.field_count())
    throw Error("record or field index out of range");
  return field_l1(pair.model, field, pair.latents(pair.truth[record], field),
                  pair.latents(pair.alternative[record], field));
}

double pinsker_lower(const HypothesisPair& pair) {
  validate(pair);
  double total = 0.0;
  for (std::size_t r = 0; r < pair.truth.size(); ++r) {
    for (std::size_t f = 0; f < pair.model.field_count(); ++f) {
      const Value y = pair.latents(pair.truth[r], f);
      const Value y_alt = pair.latents(pair.alternative[r], f);
      if (y == y_alt) continue;
      if (pair.model.schema()[f].kind == FieldKind::categorical) {
        const double gap = 1.0 - pair.model.beta(f);
        total += gap * gap;
      } else {
        const double l1 = field_l1(pair.model, f, y, y_alt);
        total += 0.5 * l1 * l1;
      }
    }
  }
  return total;
}

double gamma_bound(const Model& model, const LatentEntityTable& latents, std::size_t records) {
  require_categorical(model, "gamma");
  if (latents.fields() != model.field_count()) throw Error("latent table does not match the model");
  if (records == 0) return 0.0;
  const PairTables terms(model, [&](std::size_t f, Value a, Value b) { return gamma_term(model, f, a, b); });
  const auto rows = distinct_rows(latents);
  double best = 0.0;
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = a + 1; b < rows.size(); ++b)
      best = std::max(best, terms.row_pair(latents.row(rows[a]), latents.row(rows[b])));
  return scaled(best, static_cast<double>(records));
}

double gamma_bound(const LinkageModel& model, const LatentEntityTable& latents,
                   std::size_t records) {
  return gamma_bound(model.likelihood, latents, records);
}

double gamma_pair(const HypothesisPair& pair) {
  validate(pair);
  require_categorical(pair.model, "gamma");
  double total = 0.0;
  for (std::size_t r = 0; r < pair.truth.size(); ++r) {
    for (std::size_t f = 0; f < pair.model.field_count(); ++f)
      total += gamma_term(pair.model, f, pair.latents(pair.truth[r], f),
                          pair.latents(pair.alternative[r], f));
  }
  return total;
}

double distance_mgf(const StringUniverse& universe, Value latent, double c) {
  if (latent >= universe.size()) throw Error("string is not in the field universe");
  if (!(c >= 0.0)) throw Error("steepness c must be nonnegative");
  double total = 0.0;
  for (Value w = 0; w < universe.size(); ++w)
    total += universe.frequency(w) * std::exp(-c * universe.distance(w, latent));
  return total;
}

double min_q_mass(const Model& model, std::size_t field, Value latent_q) {
  const std::size_t m_count = model.schema()[field].cardinality;
  if (latent_q >= m_count) throw Error("latent value out of domain");
  double best = kInf;
  for (Value m = 0; m < m_count; ++m) best = std::min(best, unnormalized_mass(model, field, m, latent_q));
  return best;
}

double kappa_bound(const Model& model, const LatentEntityTable& latents, std::size_t records,
                   KappaVariant variant) {
  if (latents.fields() != model.field_count()) throw Error("latent table does not match the model");
  if (!(model.steepness() >= 0.0)) throw Error("steepness c must be nonnegative");
  if (records == 0) return 0.0;
  const PairTables terms(model, [&](std::size_t f, Value a, Value b) {
    return kappa_term(model, f, a, b, variant);
  });
  const auto rows = distinct_rows(latents);
  std::vector<double> log_factor(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) log_factor[k] = log_inverse_min_q(model, latents.row(rows[k]));

  // Best bracket for a record whose alternative is row e, and overall.
  std::vector<double> best_into(rows.size(), 0.0);
  double best_any = 0.0;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t e = 0; e < rows.size(); ++e) {
      if (a == e) continue;
      const double t = terms.row_pair(latents.row(rows[a]), latents.row(rows[e]));
      best_into[e] = std::max(best_into[e], t);
      best_any = std::max(best_any, t);
    }
  }
  const double other_records =
      variant == KappaVariant::appendix ? static_cast<double>(records - 1) : 0.0;
  double best = 0.0;
  for (std::size_t e = 0; e < rows.size(); ++e)
    best = std::max(best, scaled(other_records * best_any + best_into[e], log_factor[e]));
  return best;
}

double kappa_bound(const LinkageModel& model, const LatentEntityTable& latents,
                   std::size_t records, KappaVariant variant) {
  return kappa_bound(model.likelihood, latents, records, variant);
}

double kappa_pair(const HypothesisPair& pair) {
  validate(pair);
  double bracket = 0.0;
  double log_factor = 0.0;
  for (std::size_t r = 0; r < pair.truth.size(); ++r) {
    const auto y = pair.latents.row(pair.truth[r]);
    const auto y_alt = pair.latents.row(pair.alternative[r]);
    for (std::size_t f = 0; f < y.size(); ++f)
      bracket += kappa_term(pair.model, f, y[f], y_alt[f], KappaVariant::appendix);
    log_factor = std::max(log_factor, log_inverse_min_q(pair.model, y_alt));
  }
  return scaled(bracket, log_factor);
}

double model_bound(const Model& model, const LatentEntityTable& latents, std::size_t records) {
  if (model.kind() == ModelKind::categorical) return gamma_bound(model, latents, records);
  return kappa_bound(model, latents, records, KappaVariant::appendix);
}

FanoBound fano_lower(double bound, std::size_t entities) {
  if (entities <= 2) throw Error("Fano bound undefined (ln r <= 0)");
  if (std::isnan(bound) || bound < 0.0) throw Error("bound must be a nonnegative number of nats");
  const double log_r = std::log(static_cast<double>(entities - 1));
  FanoBound out;
  out.raw = std::isinf(bound) ? -kInf : 1.0 - (bound + std::numbers::ln2) / log_r;
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

double max_record_kl(const Model& model, const LatentEntityTable& latents) {
  if (latents.fields() != model.field_count()) throw Error("latent table does not match the model");
  const PairTables kl(model, [&](std::size_t f, Value a, Value b) { return field_kl(model, f, a, b); });
  const auto rows = distinct_rows(latents);
  double best = 0.0;
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < rows.size(); ++b)
      if (a != b) best = std::max(best, kl.row_pair(latents.row(rows[a]), latents.row(rows[b])));
  return best;
}

LinkageStructure hardest_alternative(const Model& model, const LatentEntityTable& latents,
                                     const LinkageStructure& truth) {
  const std::size_t n = latents.rows();
  if (n < 2) throw Error("an alternative linkage needs at least two entities");
  const bool categorical = model.kind() == ModelKind::categorical;
  const PairTables terms(model, [&](std::size_t f, Value a, Value b) {
    return categorical ? gamma_term(model, f, a, b) : kappa_term(model, f, a, b, KappaVariant::appendix);
  });
  std::vector<double> log_factor(n, 1.0);
  if (!categorical)
    for (std::size_t j = 0; j < n; ++j) log_factor[j] = log_inverse_min_q(model, latents.row(j));

  LinkageStructure alt(truth.size());
  for (std::size_t r = 0; r < truth.size(); ++r) {
    if (truth[r] >= n) throw Error("linkage entry out of range");
    double best = -1.0;
    for (EntityIndex j = 0; j < n; ++j) {
      if (j == truth[r]) continue;
      const double score = scaled(terms.row_pair(latents.row(truth[r]), latents.row(j)), log_factor[j]);
      if (score > best) {
        best = score;
        alt[r] = j;
      }
    }
  }
  return alt;
}

bool BoundReport::dominance_holds(double tolerance) const {
  return pinsker_lower <= exact_kl + tolerance && exact_kl <= bound + tolerance;
}

BoundReport bound_report(const Model& model, const LatentEntityTable& latents,
                         const LinkageStructure& truth) {
  BoundReport report;
  report.string_model = model.kind() == ModelKind::string;
  const auto alt = hardest_alternative(model, latents, truth);
  const HypothesisPair pair{model, latents, truth, alt};
  const auto kl = kl_exact(pair);
  report.exact_kl = kl.nats;
  report.diagnostic = kl.diagnostic;
  report.l1_per_record.resize(truth.size());
  for (std::size_t r = 0; r < truth.size(); ++r) {
    double total = 0.0;
    for (std::size_t f = 0; f < model.field_count(); ++f) total += l1_per_record(pair, r, f);
    report.l1_per_record[r] = total;
  }
  report.pinsker_lower = pinsker_lower(pair);
  report.bound = model_bound(model, latents, truth.size());
  report.bound_per_record = model_bound(model, latents, 1);
  report.r = latents.rows() - 1;
  if (latents.rows() >= 3) {
    const auto fano = fano_lower(report.bound_per_record, latents.rows());
    report.fano_raw = fano.raw;
    report.fano_error_lower = fano.clamped;
  } else {
    report.fano_raw = std::numeric_limits<double>::quiet_NaN();
    report.fano_error_lower = 0.0;
  }
  return report;
}

}  // namespace linkbound
