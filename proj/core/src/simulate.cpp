#include "linkbound/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "linkbound/rng.hpp"

namespace linkbound {

namespace {

std::shared_ptr<const StringUniverse> bundled_universe() {
  static const std::shared_ptr<const StringUniverse> ptr(std::shared_ptr<const StringUniverse>{},
                                                         &StringUniverse::bundled_names());
  return ptr;
}

Value draw(std::span<const double> distribution, Rng& rng) {
  return static_cast<Value>(sample_weighted(distribution, 1.0, rng));
}

std::size_t total_records(const std::vector<std::size_t>& sizes) {
  std::size_t total = 0;
  for (auto s : sizes) total += s;
  return total;
}

/// Shared generative skeleton: latent rows from `prior`, Lambda uniform,
/// z ~ Bernoulli(beta), X copied or drawn from the distortion distribution.
Dataset generate(ModelKind kind, std::size_t entities, std::vector<std::size_t> database_sizes,
                 const FieldSchema& schema, const ModelParams& params, std::uint64_t seed) {
  if (entities == 0) throw Error("at least one latent entity is required");
  Model model(kind, schema, params);
  const std::size_t p = schema.size();
  const std::size_t r_count = total_records(database_sizes);
  Rng rng(seed);

  auto prior = [&](std::size_t f) -> std::span<const double> {
    if (schema.is_string(f)) return schema[f].universe->frequencies();
    return params.theta[f];
  };

  LatentEntityTable latents(entities, p);
  for (std::size_t j = 0; j < entities; ++j)
    for (std::size_t f = 0; f < p; ++f) latents(j, f) = draw(prior(f), rng);

  LinkageStructure linkage(r_count);
  DistortionMask distortion(r_count, p);
  ValueTable values(r_count, p);
  std::uniform_int_distribution<EntityIndex> pick(0, static_cast<EntityIndex>(entities - 1));
  for (std::size_t r = 0; r < r_count; ++r) {
    linkage[r] = pick(rng);
    for (std::size_t f = 0; f < p; ++f) {
      const Value y = latents(linkage[r], f);
      const bool distorted = uniform01(rng) < params.beta[f];
      distortion(r, f) = distorted ? 1 : 0;
      values(r, f) = distorted ? draw(model.distortion_distribution(f, y), rng) : y;
    }
  }
  return Dataset{std::move(model), RecordTable(std::move(database_sizes), std::move(values)),
                 std::move(latents), std::move(linkage), std::move(distortion), seed};
}

}  // namespace

Dataset generate_categorical(std::size_t entities, std::vector<std::size_t> database_sizes,
                             const FieldSchema& schema, const ModelParams& params,
                             std::uint64_t seed) {
  return generate(ModelKind::categorical, entities, std::move(database_sizes), schema, params, seed);
}

Dataset generate_string(std::size_t entities, std::vector<std::size_t> database_sizes,
                        const FieldSchema& schema, const ModelParams& params, std::uint64_t seed) {
  return generate(ModelKind::string, entities, std::move(database_sizes), schema, params, seed);
}

const char* parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::entities: return "N";
    case SweepParameter::distortion: return "beta";
    case SweepParameter::fields: return "p";
    case SweepParameter::theta: return "theta";
    case SweepParameter::steepness: return "c";
  }
  return "?";
}

SweepPoint SweepSpec::at(double value) const {
  SweepPoint point = fixed;
  switch (vary) {
    case SweepParameter::entities: point.entities = static_cast<std::size_t>(std::llround(value)); break;
    case SweepParameter::distortion: point.beta = value; break;
    case SweepParameter::fields: point.fields = static_cast<std::size_t>(std::llround(value)); break;
    case SweepParameter::theta: point.theta = value; break;
    case SweepParameter::steepness: point.c = value; break;
  }
  return point;
}

void SweepSpec::validate() const {
  if (grid.empty()) throw Error("sweep grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw Error("sweep grid must be sorted");
  if (replicates < 1) throw Error("sweep needs at least one replicate");
  if (model == ModelKind::categorical && vary == SweepParameter::steepness)
    throw Error("the categorical model has no steepness parameter");
  if (model == ModelKind::string && vary == SweepParameter::theta)
    throw Error("the string model has no theta parameter");
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points, bool integer) {
  if (points == 0) throw Error("grid needs at least one point");
  std::vector<double> out;
  for (std::size_t k = 0; k < points; ++k) {
    double v = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    if (integer) v = std::round(v);
    if (out.empty() || v != out.back()) out.push_back(v);
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0 && hi > 0.0)) throw Error("log grid needs positive endpoints");
  auto out = linear_grid(std::log(lo), std::log(hi), points, false);
  for (double& v : out) v = std::exp(v);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<SweepSpec> table1_sweeps(std::size_t grid_points) {
  const SweepPoint base{.entities = 100, .beta = 0.6, .fields = 3, .theta = 0.1, .c = 1.0};
  std::vector<SweepSpec> out;
  out.push_back({"table1a", ModelKind::categorical, SweepParameter::entities,
                 linear_grid(10, 500, grid_points, true), base});
  out.push_back({"table1b", ModelKind::categorical, SweepParameter::distortion,
                 linear_grid(0.0, 1.0, grid_points, false), base});
  SweepPoint c = base;
  c.theta = 0.25;
  out.push_back({"table1c", ModelKind::categorical, SweepParameter::fields,
                 linear_grid(1, 8, grid_points, true), c});
  SweepPoint d = base;
  d.beta = 0.8;
  d.fields = 5;
  out.push_back({"table1d", ModelKind::categorical, SweepParameter::theta,
                 log_grid(1.0 / 46.0, 1.0, grid_points), d});
  return out;
}

std::vector<SweepSpec> table2_sweeps(std::size_t grid_points) {
  const SweepPoint base{.entities = 100, .beta = 0.6, .fields = 1, .theta = 0.1, .c = 1.0};
  std::vector<SweepSpec> out;
  out.push_back({"table2a", ModelKind::string, SweepParameter::entities,
                 linear_grid(100, 500, grid_points, true), base});
  out.push_back({"table2b", ModelKind::string, SweepParameter::distortion,
                 linear_grid(0.2, 1.0, grid_points, false), base});
  out.push_back({"table2c", ModelKind::string, SweepParameter::fields,
                 linear_grid(1, 10, grid_points, true), base});
  out.push_back({"table2d", ModelKind::string, SweepParameter::steepness,
                 linear_grid(0.0, 2.0, grid_points, false), base});
  return out;
}

std::vector<std::string> preset_names() {
  return {"table1a", "table1b", "table1c", "table1d", "table2a", "table2b", "table2c", "table2d"};
}

SweepSpec preset_sweep(const std::string& name, std::size_t grid_points) {
  for (auto& spec : table1_sweeps(grid_points))
    if (spec.name == name) return spec;
  for (auto& spec : table2_sweeps(grid_points))
    if (spec.name == name) return spec;
  throw Error("unknown preset '" + name + "'");
}

std::size_t cardinality_for_theta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw Error("theta must lie in (0, 1]");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / theta)));
}

Dataset generate_point(ModelKind model, const SweepPoint& point, std::uint64_t seed) {
  if (point.fields == 0) throw Error("at least one field is required");
  std::vector<std::size_t> databases{point.entities};
  if (model == ModelKind::categorical) {
    const auto schema = FieldSchema::categorical(point.fields, cardinality_for_theta(point.theta));
    return generate_categorical(point.entities, databases, schema,
                                ModelParams::uniform(schema, point.beta), seed);
  }
  const auto schema = FieldSchema::strings(bundled_universe(), point.fields);
  return generate_string(point.entities, databases, schema,
                         ModelParams::uniform(schema, point.beta, point.c), seed);
}

}  // namespace linkbound
