#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <string>

#include "linkbound/universe.hpp"

using namespace linkbound;

namespace {

// Plain recursion over the three edit operations, no memo table.
std::size_t edit_distance_naive(const std::string& a, const std::string& b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const std::string ta = a.substr(1), tb = b.substr(1);
  const std::size_t sub = edit_distance_naive(ta, tb) + (a[0] == b[0] ? 0 : 1);
  const std::size_t del = edit_distance_naive(ta, b) + 1;
  const std::size_t ins = edit_distance_naive(a, tb) + 1;
  return std::min({sub, del, ins});
}

}  // namespace

TEST(Levenshtein, HandValues) {
  EXPECT_EQ(levenshtein("emma", "emma"), 0u);
  EXPECT_EQ(levenshtein("", "abc"), 3u);
  EXPECT_EQ(levenshtein("abc", ""), 3u);
  EXPECT_EQ(levenshtein("abc", "abd"), 1u);
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
}

TEST(Levenshtein, MatchesRecursiveDefinition) {
  const std::vector<std::string> words{"",     "a",     "ab",   "ba",    "abc",  "emma",
                                       "ella", "sofia", "sophia", "mia",  "ava", "amelia"};
  for (const auto& a : words)
    for (const auto& b : words) {
      if (a.size() + b.size() > 12) continue;
      EXPECT_EQ(levenshtein(a, b), edit_distance_naive(a, b)) << a << " / " << b;
    }
}

TEST(Levenshtein, TriangleInequalityOnNames) {
  const auto& names = StringUniverse::bundled_names();
  const auto n = static_cast<Value>(names.size());
  for (Value a = 0; a < n; ++a)
    for (Value b = 0; b < n; ++b) {
      EXPECT_DOUBLE_EQ(names.distance(a, b), names.distance(b, a));
      for (Value c = 0; c < n; ++c)
        ASSERT_LE(names.distance(a, c), names.distance(a, b) + names.distance(b, c));
    }
}

TEST(StringUniverse, FromObservationsCountsFrequencies) {
  const std::vector<std::string> obs{"a", "a", "b", "c"};
  const auto u = StringUniverse::from_observations(obs);
  ASSERT_EQ(u.size(), 3u);
  EXPECT_EQ(u.value(0), "a");
  EXPECT_DOUBLE_EQ(u.frequency(0), 0.5);
  EXPECT_DOUBLE_EQ(u.frequency(1), 0.25);
  EXPECT_DOUBLE_EQ(u.frequency(2), 0.25);
  EXPECT_DOUBLE_EQ(u.min_separation(), 1.0);
}

TEST(StringUniverse, SingletonUniverse) {
  const std::vector<std::string> obs{"a", "a"};
  const auto u = StringUniverse::from_observations(obs);
  ASSERT_EQ(u.size(), 1u);
  EXPECT_DOUBLE_EQ(u.frequency(0), 1.0);
  EXPECT_DOUBLE_EQ(u.min_separation(), 0.0);
}

TEST(StringUniverse, BundledNamesMatchDataFile) {
  const auto& bundled = StringUniverse::bundled_names();
  const auto file = StringUniverse::load(std::string(LINKBOUND_DATA) + "/names_2014_top20.txt");
  ASSERT_EQ(bundled.size(), 20u);
  EXPECT_EQ(bundled.values(), file.values());
  double total = 0.0;
  for (double f : bundled.frequencies()) total += f;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_GE(bundled.min_separation(), 1.0);
}

TEST(StringUniverse, ParseWithFrequencies) {
  const auto u = StringUniverse::parse("ann 3\n\nbob 1\n");
  ASSERT_EQ(u.size(), 2u);
  EXPECT_DOUBLE_EQ(u.frequency(u.index_of("ann")), 0.75);
  EXPECT_FALSE(u.find("carl").has_value());
  EXPECT_THROW(u.index_of("carl"), Error);
}

TEST(StringUniverse, RejectsBadInput) {
  EXPECT_THROW(StringUniverse({}, {}), Error);
  EXPECT_THROW(StringUniverse({"a", "a"}, {1.0, 1.0}), Error);
  EXPECT_THROW(StringUniverse({"a", "b"}, {1.0, 0.0}), Error);
  EXPECT_THROW(StringUniverse::parse("ann 3\nbob\n"), Error);
}
