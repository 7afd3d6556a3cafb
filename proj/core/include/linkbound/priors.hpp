#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "linkbound/model.hpp"
#include "linkbound/types.hpp"

namespace linkbound {

using BigCount = boost::multiprecision::cpp_int;

/// Set partition of r records in canonical form: blocks are numbered 0..n-1 in
/// order of first appearance (a restricted-growth string).
class Partition {
 public:
  Partition() = default;
  /// Canonicalizes arbitrary block labels.
  static Partition from_labels(std::span<const EntityIndex> labels);

  std::size_t size() const { return blocks_.size(); }
  std::size_t block_count() const { return block_count_; }
  std::uint32_t block_of(std::size_t record) const { return blocks_[record]; }
  const std::vector<std::uint32_t>& assignment() const { return blocks_; }
  /// Records of each block, blocks in canonical order.
  std::vector<std::vector<std::size_t>> blocks() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::uint32_t> blocks_;
  std::size_t block_count_ = 0;
};

/// z(Lambda): the partition of records induced by a linkage structure.
Partition partition_of(const LinkageStructure& linkage);

/// Stirling number of the second kind; 0 when n > r.
BigCount stirling2(unsigned r, unsigned n);
BigCount bell(unsigned r);
/// (N)_n = N! / (N - n)!; 0 when n > N.
BigCount falling_factorial(std::uint64_t N, unsigned n);
BigCount power(std::uint64_t base, unsigned exponent);

/// Natural log of a nonnegative big integer; -inf for 0.
double log_of(const BigCount& x);

struct Probability {
  double value = 0.0;
  double log_value = kLogZero;
};

enum class PriorKind { uniform_labels, uniform_partitions };

/// P(z) = (N)_n / N^r under Lambda_ij ~ Uniform{1..N}.
Probability uniform_label_partition_prob(const Partition& partition, std::uint64_t N);

/// Flat prior over partitions: -log B_r for every partition of r records.
double uniform_partition_log_prior(const Partition& partition);

/// Distribution of the block count n over 1..r (index n - 1). For the
/// partitions kind N is ignored.
std::vector<double> n_distribution(unsigned r, std::uint64_t N, PriorKind kind);

/// log p(Lambda): -r log N for uniform labels, -log B_r - log (N)_n for the
/// flat partition prior. kLogZero when n > N.
double log_linkage_prior(const LinkageStructure& linkage, std::uint64_t N, PriorKind kind);

/// Calls visit once per set partition of r records, in lexicographic
/// restricted-growth order. r is capped at 12.
void for_each_partition(unsigned r, const std::function<void(const Partition&)>& visit);

/// A likelihood paired with a Kolchin-partition prior on the linkage
/// structure. Bound computations take only the likelihood half.
struct LinkageModel {
  Model likelihood;
  PriorKind prior = PriorKind::uniform_labels;
};

}  // namespace linkbound
