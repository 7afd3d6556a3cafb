#include "linkbound/universe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace linkbound {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  // Single row of the DP table over the shorter string.
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      const std::size_t substitute = diagonal + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({above + 1, row[j - 1] + 1, substitute});
      diagonal = above;
    }
  }
  return row[b.size()];
}

DistanceFunction levenshtein_distance() {
  return [](std::string_view a, std::string_view b) { return static_cast<double>(levenshtein(a, b)); };
}

StringUniverse::StringUniverse(std::vector<std::string> values, std::vector<double> frequencies,
                               const DistanceFunction& distance)
    : values_(std::move(values)), frequencies_(std::move(frequencies)) {
  if (values_.empty()) throw Error("empty field universe");
  if (frequencies_.size() != values_.size())
    throw Error("universe frequencies do not match its values");
  double total = 0.0;
  for (double f : frequencies_) {
    if (!(f > 0.0) || !std::isfinite(f)) throw Error("universe frequencies must be positive");
    total += f;
  }
  for (double& f : frequencies_) f /= total;

  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!lookup_.emplace(values_[i], static_cast<Value>(i)).second)
      throw Error("duplicate universe value '" + values_[i] + "'");
  }

  const std::size_t n = values_.size();
  distances_.assign(n * n, 0.0);
  min_separation_ = n > 1 ? std::numeric_limits<double>::infinity() : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(values_[i], values_[j]);
      if (!(d > 0.0)) throw Error("distance between distinct universe values must be positive");
      distances_[i * n + j] = d;
      distances_[j * n + i] = d;
      min_separation_ = std::min(min_separation_, d);
    }
  }
}

StringUniverse StringUniverse::from_observations(std::span<const std::string> observations,
                                                 const DistanceFunction& distance) {
  if (observations.empty()) throw Error("empty field universe");
  std::vector<std::string> values;
  std::vector<double> counts;
  std::unordered_map<std::string_view, std::size_t> seen;
  for (const auto& s : observations) {
    auto [it, inserted] = seen.emplace(s, values.size());
    if (inserted) {
      values.push_back(s);
      counts.push_back(0.0);
    }
    counts[it->second] += 1.0;
  }
  return StringUniverse(std::move(values), std::move(counts), distance);
}

StringUniverse StringUniverse::parse(std::string_view text) {
  std::vector<std::string> values;
  std::vector<double> frequencies;
  bool any_frequency = false;
  bool any_missing = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string value;
    if (!(fields >> value)) continue;
    double frequency = 1.0;
    if (fields >> frequency) {
      any_frequency = true;
    } else {
      any_missing = true;
    }
    values.push_back(std::move(value));
    frequencies.push_back(frequency);
  }
  if (any_frequency && any_missing) throw Error("names file mixes lines with and without frequencies");
  return StringUniverse(std::move(values), std::move(frequencies));
}

StringUniverse StringUniverse::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open names file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const StringUniverse& StringUniverse::bundled_names() {
  static const StringUniverse names(
      {"emma", "olivia", "sophia", "isabella", "ava", "mia", "emily", "abigail", "madison",
       "charlotte", "harper", "sofia", "avery", "elizabeth", "amelia", "evelyn", "ella", "chloe",
       "victoria", "aubrey"},
      std::vector<double>(20, 1.0));
  return names;
}

std::optional<Value> StringUniverse::find(std::string_view s) const {
  auto it = lookup_.find(std::string(s));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

Value StringUniverse::index_of(std::string_view s) const {
  if (auto v = find(s)) return *v;
  throw Error("string '" + std::string(s) + "' is not in the field universe");
}

}  // namespace linkbound
