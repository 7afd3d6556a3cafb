#include "linkbound/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace linkbound {

FieldSpec FieldSpec::categorical(std::size_t cardinality) {
  return FieldSpec{FieldKind::categorical, cardinality, nullptr};
}

FieldSpec FieldSpec::string(std::shared_ptr<const StringUniverse> universe) {
  if (!universe) throw Error("string field needs a universe");
  const auto size = universe->size();
  return FieldSpec{FieldKind::string, size, std::move(universe)};
}

FieldSchema::FieldSchema(std::vector<FieldSpec> fields) : fields_(std::move(fields)) {
  bool seen_categorical = false;
  for (const auto& f : fields_) {
    if (f.kind == FieldKind::string) {
      if (seen_categorical) throw Error("string fields must precede categorical fields");
      if (!f.universe || f.cardinality != f.universe->size())
        throw Error("string field cardinality must equal its universe size");
      ++string_count_;
    } else {
      seen_categorical = true;
      // M = 1 is a field that carries no information; it arises at theta = 1.
      if (f.cardinality < 1) throw Error("categorical field needs at least one value");
    }
  }
}

FieldSchema FieldSchema::categorical(std::span<const std::size_t> cardinalities) {
  std::vector<FieldSpec> fields;
  for (auto m : cardinalities) fields.push_back(FieldSpec::categorical(m));
  return FieldSchema(std::move(fields));
}

FieldSchema FieldSchema::categorical(std::size_t fields, std::size_t cardinality) {
  return FieldSchema(std::vector<FieldSpec>(fields, FieldSpec::categorical(cardinality)));
}

FieldSchema FieldSchema::strings(std::shared_ptr<const StringUniverse> universe, std::size_t fields) {
  return FieldSchema(std::vector<FieldSpec>(fields, FieldSpec::string(std::move(universe))));
}

void FieldSchema::check_values(const ValueTable& table) const {
  if (table.fields() != size()) throw Error("table field count does not match the schema");
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t f = 0; f < size(); ++f) {
      if (table(r, f) >= fields_[f].cardinality)
        throw Error("value out of domain at row " + std::to_string(r) + ", field " +
                    std::to_string(f));
    }
  }
}

ModelParams ModelParams::uniform(const FieldSchema& schema, double beta, double c) {
  ModelParams p;
  p.c = c;
  for (const auto& f : schema.fields()) {
    if (f.kind == FieldKind::categorical) {
      p.theta.emplace_back(f.cardinality, 1.0 / static_cast<double>(f.cardinality));
      p.mu.emplace_back(f.cardinality, 1.0);
    } else {
      p.theta.emplace_back();
      p.mu.emplace_back();
    }
    p.beta.push_back(beta);
    p.a.push_back(1.0);
    p.b.push_back(1.0);
  }
  return p;
}

void ModelParams::validate(const FieldSchema& schema) const {
  const std::size_t p = schema.size();
  if (theta.size() != p || beta.size() != p) throw Error("parameter vectors do not match the schema");
  if (!mu.empty() && mu.size() != p) throw Error("mu does not match the schema");
  if ((!a.empty() && a.size() != p) || (!b.empty() && b.size() != p))
    throw Error("Beta hyperparameters do not match the schema");
  for (std::size_t f = 0; f < p; ++f) {
    if (!(beta[f] >= 0.0 && beta[f] <= 1.0))
      throw Error("beta must lie in [0, 1] (field " + std::to_string(f) + ")");
    if (schema[f].kind == FieldKind::categorical) {
      if (theta[f].size() != schema[f].cardinality)
        throw Error("theta size does not match cardinality (field " + std::to_string(f) + ")");
      double total = 0.0;
      for (double t : theta[f]) {
        if (!(t > 0.0)) throw Error("theta entries must be positive");
        total += t;
      }
      if (std::abs(total - 1.0) > 1e-12) throw Error("theta must sum to 1");
      if (!mu.empty() && !mu[f].empty() && mu[f].size() != theta[f].size())
        throw Error("mu size does not match cardinality");
    }
    if (!a.empty() && !(a[f] > 0.0 && b[f] > 0.0)) throw Error("Beta hyperparameters must be positive");
  }
  if (!(c >= 0.0) || !std::isfinite(c)) throw Error("steepness c must be finite and nonnegative");
}

double categorical_field_likelihood(Value m, Value latent, std::span<const double> theta,
                                    double beta) {
  if (m >= theta.size() || latent >= theta.size()) throw Error("category index out of range");
  return (m == latent ? 1.0 - beta : 0.0) + theta[m] * beta;
}

std::vector<double> string_distortion_distribution(const StringUniverse& universe, Value latent,
                                                   double c) {
  if (latent >= universe.size()) throw Error("latent string is not in the universe");
  if (!(c >= 0.0)) throw Error("steepness c must be nonnegative");
  const std::size_t n = universe.size();
  std::vector<double> out(n);
  // Shift by the minimum exponent so large c cannot underflow every term.
  double min_distance = std::numeric_limits<double>::infinity();
  for (Value w = 0; w < n; ++w) min_distance = std::min(min_distance, universe.distance(w, latent));
  double total = 0.0;
  for (Value w = 0; w < n; ++w) {
    out[w] = universe.frequency(w) * std::exp(-c * (universe.distance(w, latent) - min_distance));
    total += out[w];
  }
  for (double& x : out) x /= total;
  return out;
}

double string_field_likelihood(Value w, Value latent, const StringUniverse& universe, double beta,
                               double c) {
  if (w >= universe.size() || latent >= universe.size())
    throw Error("string value is not in the universe");
  const auto f = string_distortion_distribution(universe, latent, c);
  return (w == latent ? 1.0 - beta : 0.0) + beta * f[w];
}

Model::Model(ModelKind kind, FieldSchema schema, ModelParams params)
    : kind_(kind), schema_(std::move(schema)), params_(std::move(params)) {
  params_.validate(schema_);
  if (kind_ == ModelKind::categorical && schema_.string_count() > 0)
    throw Error("the categorical model has no string fields");
  kernels_.resize(schema_.size());
  for (std::size_t f = 0; f < schema_.size(); ++f) {
    if (!schema_.is_string(f)) continue;
    const auto& universe = *schema_[f].universe;
    const std::size_t n = universe.size();
    auto& kernel = kernels_[f];
    kernel.resize(n * n);
    for (Value y = 0; y < n; ++y) {
      const auto row = string_distortion_distribution(universe, y, params_.c);
      std::copy(row.begin(), row.end(), kernel.begin() + static_cast<std::ptrdiff_t>(y * n));
    }
  }
}

std::span<const double> Model::distortion_distribution(std::size_t field, Value latent) const {
  const auto& spec = schema_[field];
  if (latent >= spec.cardinality) throw Error("latent value out of domain");
  if (spec.kind == FieldKind::string)
    return {kernels_[field].data() + latent * spec.cardinality, spec.cardinality};
  return params_.theta[field];
}

std::vector<double> Model::field_distribution(std::size_t field, Value latent) const {
  const auto base = distortion_distribution(field, latent);
  const double beta = params_.beta[field];
  std::vector<double> out(base.size());
  for (std::size_t m = 0; m < base.size(); ++m) out[m] = beta * base[m];
  out[latent] += 1.0 - beta;
  return out;
}

double Model::record_log_likelihood(std::span<const Value> record,
                                    std::span<const Value> entity) const {
  if (record.size() != schema_.size() || entity.size() != schema_.size())
    throw Error("record and entity must have one value per field");
  double total = 0.0;
  for (std::size_t f = 0; f < schema_.size(); ++f) {
    if (record[f] >= schema_[f].cardinality || entity[f] >= schema_[f].cardinality)
      throw Error("value out of domain");
    const double p = field_likelihood(f, record[f], entity[f]);
    if (p <= 0.0) return kLogZero;
    total += std::log(p);
  }
  return total;
}

bool verify_consistency(const RecordTable& records, const LatentEntityTable& latents,
                        const LinkageStructure& linkage, const DistortionMask& distortion) {
  const std::size_t r = records.record_count();
  const std::size_t p = records.field_count();
  if (linkage.size() != r || distortion.rows() != r || distortion.fields() != p ||
      latents.fields() != p)
    throw Error("shapes of X, Y, Lambda and z do not agree");
  for (std::size_t i = 0; i < r; ++i) {
    if (linkage[i] >= latents.rows()) throw Error("linkage entry out of range");
    for (std::size_t f = 0; f < p; ++f) {
      if (distortion(i, f) == 0 && records(i, f) != latents(linkage[i], f)) return false;
    }
  }
  return true;
}

}  // namespace linkbound
