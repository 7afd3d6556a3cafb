#include <gtest/gtest.h>

#include <cmath>

#include "linkbound/samplers.hpp"
#include "linkbound/simulate.hpp"

using namespace linkbound;

namespace {

Model categorical_model(std::size_t p, std::size_t M, double beta) {
  const auto schema = FieldSchema::categorical(p, M);
  return Model(ModelKind::categorical, schema, ModelParams::uniform(schema, beta));
}

RecordTable one_database(std::size_t fields, std::vector<Value> values) {
  const std::size_t r = values.size() / fields;
  return RecordTable({r}, ValueTable(r, fields, std::move(values)));
}

}  // namespace

TEST(ExactPosterior, HandValue) {
  const auto model = categorical_model(1, 2, 0.5);
  const LatentEntityTable y(3, 1, std::vector<Value>{0, 0, 1});
  const std::vector<Value> x{0};
  const auto post = exact_posterior(model, y, x);
  EXPECT_NEAR(post[0], 3.0 / 7.0, 1e-15);
  EXPECT_NEAR(post[1], 3.0 / 7.0, 1e-15);
  EXPECT_NEAR(post[2], 1.0 / 7.0, 1e-15);
}

TEST(ExactPosterior, FullyDistortedIsUniform) {
  const auto model = categorical_model(2, 3, 1.0);
  const LatentEntityTable y(4, 2, std::vector<Value>{0, 1, 2, 2, 1, 0, 0, 0});
  const std::vector<Value> x{2, 2};
  for (double p : exact_posterior(model, y, x)) EXPECT_NEAR(p, 0.25, 1e-15);
}

TEST(ExactPosterior, NoDistortionGivesPointMass) {
  const auto model = categorical_model(2, 3, 0.0);
  const LatentEntityTable y(3, 2, std::vector<Value>{0, 1, 2, 2, 1, 0});
  const std::vector<Value> x{2, 2};
  const auto post = exact_posterior(model, y, x);
  EXPECT_EQ(post[1], 1.0);
  EXPECT_EQ(post[0] + post[2], 0.0);
  const std::vector<Value> orphan{1, 1};
  EXPECT_THROW(exact_posterior(model, y, orphan), Error);
}

TEST(ExactSampler, DeterministicAndUniformUnderFullDistortion) {
  const auto model = categorical_model(1, 2, 1.0);
  const LatentEntityTable y(4, 1, std::vector<Value>{0, 1, 0, 1});
  const auto records = one_database(1, {0});
  const auto a = exact_sample_linkage(model, records, y, 10000, 99);
  const auto b = exact_sample_linkage(model, records, y, 10000, 99);
  EXPECT_EQ(a, b);
  std::vector<double> counts(4, 0.0);
  for (const auto& s : a) counts[s[0]] += 1.0;
  const double sigma = std::sqrt(10000 * 0.25 * 0.75);
  for (double c : counts) EXPECT_NEAR(c, 2500.0, 3.0 * sigma);
}

TEST(ExactSampler, PointMassHasZeroError) {
  const auto model = categorical_model(2, 4, 0.0);
  const LatentEntityTable y(3, 2, std::vector<Value>{0, 1, 2, 3, 3, 0});
  const auto records = one_database(2, {2, 3, 0, 1, 3, 0, 2, 3});
  const LinkageStructure truth{1, 0, 2, 1};
  const auto draws = exact_sample_linkage(model, records, y, 50, 1);
  const auto e = error_rate(draws, truth, 0);
  EXPECT_EQ(e.rate, 0.0);
  EXPECT_EQ(e.samples, 50u);
}

TEST(Gibbs, NoDistortionLocksOntoTruth) {
  auto data = generate_point(ModelKind::categorical, {.entities = 30, .beta = 0.0, .fields = 4, .theta = 0.1}, 8);
  // Only entities with unique rows pin their records down.
  SamplerConfig config{.iterations = 3, .seed = 4};
  auto init = initial_state(data.model, data.records, data.latents, config.mode, 2);
  for (const auto& state : gibbs_run(data.model, data.records, data.latents, init, config)) {
    for (std::size_t r = 0; r < data.linkage.size(); ++r) {
      const auto got = data.latents.row(state.linkage[r]);
      const auto want = data.latents.row(data.linkage[r]);
      EXPECT_TRUE(std::equal(got.begin(), got.end(), want.begin()));
    }
  }
}

TEST(Gibbs, FixedSeedReproducesChain) {
  auto data = generate_point(ModelKind::string, {.entities = 25, .beta = 0.5, .fields = 2}, 3);
  SamplerConfig config{.iterations = 50, .seed = 17};
  auto init = initial_state(data.model, data.records, data.latents, config.mode, 5);
  const auto a = gibbs_run(data.model, data.records, data.latents, init, config);
  const auto b = gibbs_run(data.model, data.records, data.latents, init, config);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].linkage, b[i].linkage);
    EXPECT_EQ(a[i].distortion, b[i].distortion);
    EXPECT_EQ(a[i].iteration, i + 1);
  }
}

TEST(Gibbs, MarginalsApproachExactPosterior) {
  const auto model = categorical_model(2, 3, 0.5);
  const LatentEntityTable y(4, 2, std::vector<Value>{0, 0, 0, 1, 2, 1, 1, 2});
  const auto records = one_database(2, {0, 1, 2, 2, 1, 0});
  const auto exact = exact_posteriors(model, records, y);
  SamplerConfig config{.iterations = 20000, .burn_in = 0.05, .seed = 12};
  std::vector<std::vector<double>> freq(3, std::vector<double>(4, 0.0));
  const auto burn = config.burn_in_count();
  gibbs_run(model, records, y, initial_state(model, records, y, config.mode, 1), config,
            [&](const ChainState& s) {
              if (s.iteration <= burn) return;
              for (std::size_t r = 0; r < 3; ++r) freq[r][s.linkage[r]] += 1.0;
            });
  const double kept = static_cast<double>(config.iterations - burn);
  for (std::size_t r = 0; r < 3; ++r) {
    double tv = 0.0;
    for (std::size_t j = 0; j < 4; ++j) tv += 0.5 * std::abs(freq[r][j] / kept - exact[r][j]);
    EXPECT_LT(tv, 0.02) << "record " << r;
  }
}

TEST(Gibbs, HierarchicalModeKeepsParametersValid) {
  auto data = generate_point(ModelKind::categorical, {.entities = 20, .beta = 0.3, .fields = 2, .theta = 0.25}, 4);
  auto params = data.model.params();
  params.a = {2.0, 2.0};
  params.b = {6.0, 6.0};
  const Model model(ModelKind::categorical, data.model.schema(), params);
  SamplerConfig config{.iterations = 100, .mode = SamplerMode::hierarchical, .seed = 3};
  auto init = initial_state(model, data.records, data.latents, config.mode, 1);
  EXPECT_DOUBLE_EQ(init.beta[0], 0.25);
  gibbs_run(model, data.records, data.latents, init, config, [](const ChainState& s) {
    for (std::size_t f = 0; f < s.beta.size(); ++f) {
      ASSERT_GT(s.beta[f], 0.0);
      ASSERT_LT(s.beta[f], 1.0);
      double total = 0.0;
      for (double t : s.theta[f]) total += t;
      ASSERT_NEAR(total, 1.0, 1e-12);
    }
  });
}

TEST(Gibbs, ConfigValidation) {
  EXPECT_THROW((SamplerConfig{.iterations = 0}.validate()), Error);
  EXPECT_THROW((SamplerConfig{.burn_in = 1.0}.validate()), Error);
  EXPECT_THROW((SamplerConfig{.hold_latents_fixed = false}.validate()), Error);
  EXPECT_EQ((SamplerConfig{.iterations = 2000}.burn_in_count()), 200u);
}

TEST(ErrorRate, DirectCounts) {
  const LinkageStructure truth{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<LinkageStructure> same(5, truth);
  EXPECT_EQ(error_rate(same, truth, 0).rate, 0.0);
  auto off = truth;
  off[0] = 1;
  off[4] = 0;
  off[9] = 2;
  const std::vector<LinkageStructure> one{off};
  EXPECT_NEAR(error_rate(one, truth, 0).rate, 0.3, 1e-15);
  EXPECT_THROW(error_rate(one, truth, 1), Error);
}

TEST(ErrorRate, UniformGuessing) {
  const auto model = categorical_model(1, 2, 1.0);
  const LatentEntityTable y(5, 1, std::vector<Value>{0, 1, 0, 1, 0});
  const auto records = one_database(1, {0, 1, 1, 0, 1, 0, 0, 1});
  const LinkageStructure truth{0, 1, 2, 3, 4, 0, 1, 2};
  const auto draws = exact_sample_linkage(model, records, y, 4000, 6);
  const auto e = error_rate(draws, truth, 0);
  EXPECT_NEAR(e.rate, 0.8, 3.0 * e.standard_error);
  EXPECT_GT(e.standard_error, 0.0);
}

TEST(ErrorRate, SummaryEchoesConfig) {
  const LinkageStructure truth{0, 1};
  const std::vector<LinkageStructure> draws{{0, 1}, {0, 0}, {1, 1}, {0, 1}};
  const SamplerConfig config{.iterations = 4, .burn_in = 0.25, .seed = 9};
  const auto s = summarize(draws, truth, config, config.burn_in_count());
  EXPECT_EQ(s.seed, 9u);
  EXPECT_NEAR(s.match_frequency[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.match_frequency[1], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.error.rate, 1.0 / 3.0, 1e-15);
}
