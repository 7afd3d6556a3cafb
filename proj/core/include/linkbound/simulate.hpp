#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "linkbound/model.hpp"
#include "linkbound/types.hpp"

namespace linkbound {

/// A generated (or loaded) record-linkage instance with its ground truth.
struct Dataset {
  Model model;
  RecordTable records;
  LatentEntityTable latents;
  LinkageStructure linkage;
  DistortionMask distortion;
  std::uint64_t seed = 0;

  std::size_t entity_count() const { return latents.rows(); }
};

/// Model 1: Y ~ MN(theta), Lambda ~ Uniform, z ~ Bernoulli(beta), X copies Y
/// when z = 0 and is a fresh MN(theta) draw when z = 1.
Dataset generate_categorical(std::size_t entities, std::vector<std::size_t> database_sizes,
                             const FieldSchema& schema, const ModelParams& params,
                             std::uint64_t seed);

/// Model 2: Y ~ G (alpha for string fields, theta for categorical ones);
/// distorted strings come from F(Y), distorted categories from G.
Dataset generate_string(std::size_t entities, std::vector<std::size_t> database_sizes,
                        const FieldSchema& schema, const ModelParams& params, std::uint64_t seed);

enum class SweepParameter { entities, distortion, fields, theta, steepness };

const char* parameter_name(SweepParameter p);

struct SweepPoint {
  std::size_t entities = 100;
  double beta = 0.6;
  std::size_t fields = 3;
  double theta = 0.1;  // categorical: M = round(1 / theta)
  double c = 1.0;      // string steepness
};

struct SweepSpec {
  std::string name;
  ModelKind model = ModelKind::categorical;
  SweepParameter vary = SweepParameter::entities;
  std::vector<double> grid;
  SweepPoint fixed;
  std::size_t replicates = 20;
  std::uint64_t root_seed = 0;

  /// Fixed values with the varied parameter set to `value`.
  SweepPoint at(double value) const;
  void validate() const;
};

/// Evenly spaced grid; integer parameters are rounded and deduplicated.
std::vector<double> linear_grid(double lo, double hi, std::size_t points, bool integer);
std::vector<double> log_grid(double lo, double hi, std::size_t points);

/// Categorical sweeps (a)-(d).
std::vector<SweepSpec> table1_sweeps(std::size_t grid_points = 10);
/// String sweeps (a)-(d) on the bundled names universe.
std::vector<SweepSpec> table2_sweeps(std::size_t grid_points = 10);

/// Preset by name: table1a..table1d, table2a..table2d.
SweepSpec preset_sweep(const std::string& name, std::size_t grid_points = 10);
std::vector<std::string> preset_names();

/// Category count for a uniform theta value.
std::size_t cardinality_for_theta(double theta);

/// Dataset for one sweep point: k = 1 database of N records, beta on every
/// field, uniform theta with M = round(1 / theta), strings on the bundled
/// names universe.
Dataset generate_point(ModelKind model, const SweepPoint& point, std::uint64_t seed);

}  // namespace linkbound
