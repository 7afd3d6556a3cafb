#pragma once

#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "linkbound/types.hpp"
#include "linkbound/universe.hpp"

namespace linkbound {

enum class FieldKind { categorical, string };

/// Model 1 is the categorical hit-miss mixture; Model 2 is the empirical-Bayes
/// model with string distortion.
enum class ModelKind { categorical, string };

struct FieldSpec {
  FieldKind kind = FieldKind::categorical;
  /// M for categorical fields, |S| for string fields.
  std::size_t cardinality = 0;
  std::shared_ptr<const StringUniverse> universe;  // string fields only

  static FieldSpec categorical(std::size_t cardinality);
  static FieldSpec string(std::shared_ptr<const StringUniverse> universe);
};

/// String fields come first, categorical fields after them.
class FieldSchema {
 public:
  FieldSchema() = default;
  explicit FieldSchema(std::vector<FieldSpec> fields);

  static FieldSchema categorical(std::span<const std::size_t> cardinalities);
  static FieldSchema categorical(std::size_t fields, std::size_t cardinality);
  static FieldSchema strings(std::shared_ptr<const StringUniverse> universe, std::size_t fields);

  std::size_t size() const { return fields_.size(); }
  std::size_t string_count() const { return string_count_; }
  std::size_t categorical_count() const { return fields_.size() - string_count_; }
  const FieldSpec& operator[](std::size_t field) const { return fields_[field]; }
  const std::vector<FieldSpec>& fields() const { return fields_; }
  bool is_string(std::size_t field) const { return fields_[field].kind == FieldKind::string; }

  /// Throws when any value in the table is outside its field's domain.
  void check_values(const ValueTable& table) const;

 private:
  std::vector<FieldSpec> fields_;
  std::size_t string_count_ = 0;
};

/// theta holds, per categorical field, the distribution a distorted value is
/// drawn from: theta_l under Model 1, the empirical G_l under Model 2. String
/// fields leave their theta entry empty.
struct ModelParams {
  std::vector<std::vector<double>> theta;
  std::vector<double> beta;
  std::vector<std::vector<double>> mu;  // Dirichlet hyperparameters, hierarchical Model 1
  std::vector<double> a;                // Beta hyperparameters per field
  std::vector<double> b;
  double c = 1.0;  // string steepness

  /// Same beta and uniform theta over cardinality values on every field.
  static ModelParams uniform(const FieldSchema& schema, double beta, double c = 1.0);

  void validate(const FieldSchema& schema) const;
};

/// Explicit representation of log(0).
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// I(latent = m)(1 - beta) + theta_m beta.
double categorical_field_likelihood(Value m, Value latent, std::span<const double> theta,
                                    double beta);

/// F(y)(w) = alpha(w) exp(-c d(w, y)) / sum_w' alpha(w') exp(-c d(w', y)).
std::vector<double> string_distortion_distribution(const StringUniverse& universe, Value latent,
                                                   double c);

/// Normalized string likelihood: I(latent = w)(1 - beta) + beta F(latent)(w).
double string_field_likelihood(Value w, Value latent, const StringUniverse& universe, double beta,
                               double c);

/// Immutable likelihood evaluator for one model configuration. String
/// distortion kernels are tabulated at construction.
class Model {
 public:
  Model(ModelKind kind, FieldSchema schema, ModelParams params);

  ModelKind kind() const { return kind_; }
  const FieldSchema& schema() const { return schema_; }
  const ModelParams& params() const { return params_; }
  std::size_t field_count() const { return schema_.size(); }
  double beta(std::size_t field) const { return params_.beta[field]; }
  double steepness() const { return params_.c; }

  /// Probability of observing value x from the distortion distribution of a
  /// latent value y: theta_l(x), G_l(x), or F_l(y)(x).
  double distortion_probability(std::size_t field, Value observed, Value latent) const {
    const auto& spec = schema_[field];
    if (spec.kind == FieldKind::string) return kernels_[field][latent * spec.cardinality + observed];
    return params_.theta[field][observed];
  }

  /// Full distortion distribution for a latent value; its size is the field's
  /// cardinality.
  std::span<const double> distortion_distribution(std::size_t field, Value latent) const;

  /// z-marginalized likelihood (1 - beta) I(x = y) + beta f(x | y).
  double field_likelihood(std::size_t field, Value observed, Value latent) const {
    const double beta = params_.beta[field];
    const double copy = observed == latent ? 1.0 - beta : 0.0;
    return copy + beta * distortion_probability(field, observed, latent);
  }

  /// Sum over fields of log field likelihoods; kLogZero when any field is
  /// impossible.
  double record_log_likelihood(std::span<const Value> record, std::span<const Value> entity) const;

  /// Distribution over the whole domain of one field for a given latent value.
  std::vector<double> field_distribution(std::size_t field, Value latent) const;

 private:
  ModelKind kind_;
  FieldSchema schema_;
  ModelParams params_;
  std::vector<std::vector<double>> kernels_;  // per string field, |S| x |S|, row = latent
};

/// True iff z = 0 implies X = Y[Lambda] on every record and field.
bool verify_consistency(const RecordTable& records, const LatentEntityTable& latents,
                        const LinkageStructure& linkage, const DistortionMask& distortion);

}  // namespace linkbound
