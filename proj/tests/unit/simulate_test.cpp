#include <gtest/gtest.h>

#include <cmath>

#include "linkbound/simulate.hpp"

using namespace linkbound;

namespace {

std::shared_ptr<const StringUniverse> names() {
  return {std::shared_ptr<const StringUniverse>{}, &StringUniverse::bundled_names()};
}

}  // namespace

TEST(Generate, FixedSeedIsReproducible) {
  const auto a = generate_point(ModelKind::string, {.entities = 40, .beta = 0.5, .fields = 2}, 77);
  const auto b = generate_point(ModelKind::string, {.entities = 40, .beta = 0.5, .fields = 2}, 77);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.latents, b.latents);
  EXPECT_EQ(a.linkage, b.linkage);
  EXPECT_EQ(a.distortion, b.distortion);
  const auto c = generate_point(ModelKind::string, {.entities = 40, .beta = 0.5, .fields = 2}, 78);
  EXPECT_NE(a.records, c.records);
}

TEST(Generate, DatasetsAreConsistent) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (auto kind : {ModelKind::categorical, ModelKind::string}) {
      const auto d = generate_point(kind, {.entities = 30, .beta = 0.4, .fields = 3}, seed);
      EXPECT_TRUE(verify_consistency(d.records, d.latents, d.linkage, d.distortion));
      EXPECT_EQ(d.records.record_count(), 30u);
    }
  }
}

TEST(Generate, NoDistortionCopiesLatents) {
  for (auto kind : {ModelKind::categorical, ModelKind::string}) {
    const auto d = generate_point(kind, {.entities = 50, .beta = 0.0, .fields = 3}, 1);
    for (std::size_t r = 0; r < d.records.record_count(); ++r)
      for (std::size_t f = 0; f < 3; ++f) EXPECT_EQ(d.records(r, f), d.latents(d.linkage[r], f));
  }
}

TEST(Generate, FullDistortionFollowsTheta) {
  const auto schema = FieldSchema::categorical(1, 4);
  auto params = ModelParams::uniform(schema, 1.0);
  params.theta[0] = {0.1, 0.2, 0.3, 0.4};
  const auto d = generate_categorical(5, {10000}, schema, params, 3);
  std::vector<double> counts(4, 0.0);
  for (std::size_t r = 0; r < 10000; ++r) counts[d.records(r, 0)] += 1.0;
  for (std::size_t m = 0; m < 4; ++m) {
    const double t = params.theta[0][m];
    EXPECT_NEAR(counts[m], 10000 * t, 3.0 * std::sqrt(10000 * t * (1 - t)));
  }
}

TEST(Generate, StringDistortionLimits) {
  const auto schema = FieldSchema::strings(names(), 1);
  const auto sharp = generate_string(5, {2000}, schema, ModelParams::uniform(schema, 1.0, 60.0), 4);
  for (std::size_t r = 0; r < 2000; ++r) EXPECT_EQ(sharp.records(r, 0), sharp.latents(sharp.linkage[r], 0));

  const auto flat = generate_string(5, {10000}, schema, ModelParams::uniform(schema, 1.0, 0.0), 5);
  std::vector<double> counts(20, 0.0);
  for (std::size_t r = 0; r < 10000; ++r) counts[flat.records(r, 0)] += 1.0;
  for (double c : counts) EXPECT_NEAR(c, 500.0, 3.0 * std::sqrt(10000 * 0.05 * 0.95));
}

TEST(Generate, MultipleDatabases) {
  const auto schema = FieldSchema::categorical(2, 3);
  const auto d = generate_categorical(4, {3, 3, 4}, schema, ModelParams::uniform(schema, 0.2), 1);
  EXPECT_EQ(d.records.database_count(), 3u);
  EXPECT_EQ(d.records.record_count(), 10u);
  EXPECT_EQ(d.entity_count(), 4u);
}

TEST(Sweeps, CategoricalPresets) {
  const auto sweeps = table1_sweeps();
  ASSERT_EQ(sweeps.size(), 4u);
  const auto& a = sweeps[0];
  EXPECT_EQ(a.vary, SweepParameter::entities);
  EXPECT_EQ(a.grid.front(), 10.0);
  EXPECT_EQ(a.grid.back(), 500.0);
  EXPECT_EQ(a.grid.size(), 10u);
  EXPECT_DOUBLE_EQ(a.fixed.beta, 0.6);
  EXPECT_EQ(a.fixed.fields, 3u);
  EXPECT_DOUBLE_EQ(a.fixed.theta, 0.1);
  EXPECT_EQ(sweeps[1].grid.front(), 0.0);
  EXPECT_EQ(sweeps[1].grid.back(), 1.0);
  EXPECT_EQ(sweeps[2].grid.front(), 1.0);
  EXPECT_EQ(sweeps[2].grid.back(), 8.0);
  EXPECT_DOUBLE_EQ(sweeps[2].fixed.theta, 0.25);
  const auto& d = sweeps[3];
  EXPECT_DOUBLE_EQ(d.grid.front(), 1.0 / 46.0);
  EXPECT_DOUBLE_EQ(d.grid.back(), 1.0);
  EXPECT_DOUBLE_EQ(d.fixed.beta, 0.8);
  EXPECT_EQ(d.fixed.fields, 5u);
  for (const auto& s : sweeps) EXPECT_NO_THROW(s.validate());
}

TEST(Sweeps, StringPresets) {
  const auto sweeps = table2_sweeps(8);
  ASSERT_EQ(sweeps.size(), 4u);
  for (const auto& s : sweeps) EXPECT_EQ(s.model, ModelKind::string);
  EXPECT_EQ(sweeps[0].grid.front(), 100.0);
  EXPECT_EQ(sweeps[0].grid.back(), 500.0);
  EXPECT_DOUBLE_EQ(sweeps[1].grid.front(), 0.2);
  EXPECT_EQ(sweeps[2].grid.front(), 1.0);
  EXPECT_EQ(sweeps[2].grid.back(), 10.0);
  EXPECT_EQ(sweeps[3].grid.front(), 0.0);
  EXPECT_EQ(sweeps[3].grid.back(), 2.0);
  const auto d = generate_point(ModelKind::string, sweeps[0].at(100), 1);
  EXPECT_EQ(d.model.schema()[0].universe->size(), 20u);
}

TEST(Sweeps, CardinalityFromTheta) {
  EXPECT_EQ(cardinality_for_theta(0.1), 10u);
  EXPECT_EQ(cardinality_for_theta(1.0 / 46.0), 46u);
  EXPECT_EQ(cardinality_for_theta(0.25), 4u);
  EXPECT_EQ(cardinality_for_theta(1.0), 1u);
  EXPECT_THROW(cardinality_for_theta(0.0), Error);
}

TEST(Sweeps, Grids) {
  EXPECT_EQ(linear_grid(1, 8, 8, true), (std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(linear_grid(1, 3, 8, true), (std::vector<double>{1, 2, 3}));
  const auto g = log_grid(0.01, 1.0, 3);
  EXPECT_NEAR(g[1], 0.1, 1e-15);
  EXPECT_THROW(log_grid(0.0, 1.0, 3), Error);
  EXPECT_THROW(preset_sweep("table3a"), Error);
  EXPECT_EQ(preset_names().size(), 8u);
}

TEST(Sweeps, PointOverridesOneParameter) {
  const auto spec = preset_sweep("table1b");
  const auto point = spec.at(0.3);
  EXPECT_DOUBLE_EQ(point.beta, 0.3);
  EXPECT_EQ(point.entities, 100u);
  SweepSpec bad = spec;
  bad.grid = {0.5, 0.1};
  EXPECT_THROW(bad.validate(), Error);
  bad = spec;
  bad.vary = SweepParameter::steepness;
  EXPECT_THROW(bad.validate(), Error);
}
