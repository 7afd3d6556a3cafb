#include <gtest/gtest.h>

#include <filesystem>

#include "linkbound/io.hpp"

using namespace linkbound;

namespace {

void expect_same(const Dataset& a, const Dataset& b) {
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.latents, b.latents);
  EXPECT_EQ(a.linkage, b.linkage);
  EXPECT_EQ(a.distortion, b.distortion);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.model.kind(), b.model.kind());
  EXPECT_EQ(a.model.params().beta, b.model.params().beta);
  EXPECT_EQ(a.model.params().theta, b.model.params().theta);
}

}  // namespace

TEST(DatasetJson, CategoricalRoundTrip) {
  const auto d = generate_point(ModelKind::categorical, {.entities = 12, .beta = 0.3, .fields = 3}, 5);
  const auto back = dataset_from_json(dataset_to_json(d));
  expect_same(d, back);
  EXPECT_EQ(dataset_to_json(back), dataset_to_json(d));
}

TEST(DatasetJson, StringRoundTripWritesNames) {
  const auto d = generate_point(ModelKind::string, {.entities = 8, .beta = 0.6, .fields = 2, .c = 1.5}, 6);
  const auto text = dataset_to_json(d);
  EXPECT_NE(text.find(d.model.schema()[0].universe->value(d.records(0, 0))), std::string::npos);
  const auto back = dataset_from_json(text);
  expect_same(d, back);
  EXPECT_DOUBLE_EQ(back.model.steepness(), 1.5);
  EXPECT_EQ(back.model.schema()[0].universe, back.model.schema()[1].universe);
}

TEST(DatasetJson, FileRoundTrip) {
  const auto d = generate_point(ModelKind::categorical, {.entities = 5, .fields = 2}, 9);
  const auto path = std::filesystem::temp_directory_path() / "linkbound_io_test" / "d.json";
  save_dataset(d, path);
  expect_same(d, load_dataset(path));
  std::filesystem::remove_all(path.parent_path());
}

TEST(DatasetJson, RejectsInconsistentData) {
  const auto toy = load_dataset(std::string(LINKBOUND_FIXTURES) + "/toy.json");
  auto text = dataset_to_json(toy);
  // Mark the distorted "SC, 70, F" age as a copy of its entity.
  const std::string flagged = "[\n   0,\n   1,\n   0\n  ]";
  const auto pos = text.find(flagged, text.find("\"z\""));
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, flagged.size(), "[\n   0,\n   0,\n   0\n  ]");
  EXPECT_THROW(dataset_from_json(text), Error);
  EXPECT_THROW(load_dataset("/nonexistent/file.json"), Error);
  EXPECT_THROW(dataset_from_json(R"({"model":"bogus"})"), Error);
}

TEST(ReportJson, NonFiniteValuesAreStrings) {
  BoundReport r;
  r.exact_kl = std::numeric_limits<double>::infinity();
  r.fano_raw = -std::numeric_limits<double>::infinity();
  const auto text = report_to_json(r);
  EXPECT_NE(text.find("\"exact_kl\": \"inf\""), std::string::npos);
  EXPECT_NE(text.find("\"fano_raw\": \"-inf\""), std::string::npos);
}
