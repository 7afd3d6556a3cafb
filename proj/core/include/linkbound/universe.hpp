#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "linkbound/types.hpp"

namespace linkbound {

/// Unit-cost edit distance (insert, delete, substitute).
std::size_t levenshtein(std::string_view a, std::string_view b);

using DistanceFunction = std::function<double(std::string_view, std::string_view)>;

/// Levenshtein distance wrapped as a DistanceFunction.
DistanceFunction levenshtein_distance();

/// The closed value set S of one string field with its empirical frequencies
/// alpha and the precomputed pairwise distance matrix.
class StringUniverse {
 public:
  /// Frequencies are normalized; they need not sum to one on input but must be
  /// strictly positive. Values must be distinct.
  StringUniverse(std::vector<std::string> values, std::vector<double> frequencies,
                 const DistanceFunction& distance = levenshtein_distance());

  /// S = distinct observations in first-appearance order, alpha = count / total.
  static StringUniverse from_observations(std::span<const std::string> observations,
                                          const DistanceFunction& distance = levenshtein_distance());

  /// One lowercase string per line, optional whitespace-separated frequency
  /// column. Blank lines are skipped. Missing frequencies mean uniform.
  static StringUniverse load(const std::filesystem::path& path);
  static StringUniverse parse(std::string_view text);

  /// The 20 most popular US female baby names of 2014 with uniform frequencies,
  /// identical to data/names_2014_top20.txt.
  static const StringUniverse& bundled_names();

  std::size_t size() const { return values_.size(); }
  const std::string& value(Value i) const { return values_.at(i); }
  const std::vector<std::string>& values() const { return values_; }
  double frequency(Value i) const { return frequencies_.at(i); }
  std::span<const double> frequencies() const { return frequencies_; }
  double distance(Value a, Value b) const { return distances_[a * size() + b]; }

  std::optional<Value> find(std::string_view s) const;
  /// Throws Error when s is outside the universe.
  Value index_of(std::string_view s) const;

  /// delta: smallest distance between two distinct values (0 for a singleton).
  double min_separation() const { return min_separation_; }

 private:
  std::vector<std::string> values_;
  std::vector<double> frequencies_;
  std::vector<double> distances_;
  std::unordered_map<std::string, Value> lookup_;
  double min_separation_ = 0.0;
};

}  // namespace linkbound
