#include "linkbound/priors.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <unordered_map>

namespace linkbound {

namespace {

constexpr unsigned kMemoRows = 128;
constexpr unsigned kMaxEnumeration = 12;

/// Stirling triangle S(r, n) for r < kMemoRows, built once.
const std::vector<std::vector<BigCount>>& stirling_table() {
  static const std::vector<std::vector<BigCount>> table = [] {
    std::vector<std::vector<BigCount>> t(kMemoRows);
    t[0] = {BigCount(1)};
    for (unsigned r = 1; r < kMemoRows; ++r) {
      t[r].assign(r + 1, BigCount(0));
      for (unsigned n = 1; n <= r; ++n) {
        BigCount above = n < r ? t[r - 1][n] : BigCount(0);
        t[r][n] = BigCount(n) * above + t[r - 1][n - 1];
      }
    }
    return t;
  }();
  return table;
}

std::vector<BigCount> stirling_row(unsigned r) {
  if (r < kMemoRows) return stirling_table()[r];
  std::vector<BigCount> row = stirling_table()[kMemoRows - 1];
  for (unsigned k = kMemoRows; k <= r; ++k) {
    std::vector<BigCount> next(k + 1, BigCount(0));
    for (unsigned n = 1; n <= k; ++n) {
      BigCount above = n < k ? row[n] : BigCount(0);
      next[n] = BigCount(n) * above + row[n - 1];
    }
    row = std::move(next);
  }
  return row;
}

}  // namespace

Partition Partition::from_labels(std::span<const EntityIndex> labels) {
  Partition p;
  p.blocks_.resize(labels.size());
  std::unordered_map<EntityIndex, std::uint32_t> canonical;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = canonical.emplace(labels[i], static_cast<std::uint32_t>(canonical.size()));
    p.blocks_[i] = it->second;
  }
  p.block_count_ = canonical.size();
  return p;
}

std::vector<std::vector<std::size_t>> Partition::blocks() const {
  std::vector<std::vector<std::size_t>> out(block_count_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) out[blocks_[i]].push_back(i);
  return out;
}

Partition partition_of(const LinkageStructure& linkage) { return Partition::from_labels(linkage); }

BigCount stirling2(unsigned r, unsigned n) {
  if (n > r) return 0;
  if (r < kMemoRows) return stirling_table()[r][n];
  return stirling_row(r)[n];
}

BigCount bell(unsigned r) {
  BigCount total = 0;
  for (const auto& s : stirling_row(r)) total += s;
  return total;
}

BigCount falling_factorial(std::uint64_t N, unsigned n) {
  if (n > N) return 0;
  BigCount out = 1;
  for (unsigned k = 0; k < n; ++k) out *= BigCount(N - k);
  return out;
}

BigCount power(std::uint64_t base, unsigned exponent) {
  return boost::multiprecision::pow(BigCount(base), exponent);
}

double log_of(const BigCount& x) {
  if (x < 0) throw Error("log of a negative count");
  if (x == 0) return kLogZero;
  const std::size_t bits = boost::multiprecision::msb(x) + 1;
  if (bits <= 1000) return std::log(x.convert_to<double>());
  // Keep the top 64 bits; the dropped tail changes the log by < 2^-63.
  const std::size_t shift = bits - 64;
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wstringop-overflow"
#pragma GCC diagnostic ignored "-Wstringop-overread"
#endif
  const BigCount top = x >> shift;
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::numbers::ln2;
}

Probability uniform_label_partition_prob(const Partition& partition, std::uint64_t N) {
  if (N == 0) throw Error("entity count must be positive");
  const auto r = static_cast<unsigned>(partition.size());
  const auto n = static_cast<unsigned>(partition.block_count());
  if (n > N) return {};
  const double log_value = log_of(falling_factorial(N, n)) - log_of(power(N, r));
  return {std::exp(log_value), log_value};
}

double uniform_partition_log_prior(const Partition& partition) {
  if (partition.size() == 0) throw Error("partition prior needs at least one record");
  return -log_of(bell(static_cast<unsigned>(partition.size())));
}

std::vector<double> n_distribution(unsigned r, std::uint64_t N, PriorKind kind) {
  if (r == 0) throw Error("n distribution needs at least one record");
  const auto row = stirling_row(r);
  std::vector<double> out(r, 0.0);
  if (kind == PriorKind::uniform_partitions) {
    const double log_bell = log_of(bell(r));
    for (unsigned n = 1; n <= r; ++n) out[n - 1] = std::exp(log_of(row[n]) - log_bell);
    return out;
  }
  if (N == 0) throw Error("entity count must be positive");
  const double log_total = log_of(power(N, r));
  for (unsigned n = 1; n <= r && n <= N; ++n)
    out[n - 1] = std::exp(log_of(falling_factorial(N, n) * row[n]) - log_total);
  return out;
}

double log_linkage_prior(const LinkageStructure& linkage, std::uint64_t N, PriorKind kind) {
  for (auto e : linkage)
    if (e >= N) throw Error("linkage entry out of range");
  const auto r = static_cast<unsigned>(linkage.size());
  if (kind == PriorKind::uniform_labels) return -static_cast<double>(r) * std::log(static_cast<double>(N));
  const auto n = static_cast<unsigned>(partition_of(linkage).block_count());
  return -log_of(bell(r)) - log_of(falling_factorial(N, n));
}

void for_each_partition(unsigned r, const std::function<void(const Partition&)>& visit) {
  if (r > kMaxEnumeration) throw Error("partition enumeration is capped at 12 records");
  if (r == 0) {
    visit(Partition{});
    return;
  }
  // Restricted-growth strings a with a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<EntityIndex> a(r, 0);
  std::vector<EntityIndex> prefix_max(r, 0);
  while (true) {
    visit(Partition::from_labels(a));
    std::size_t i = r - 1;
    while (i > 0 && a[i] == prefix_max[i - 1] + 1) --i;
    if (i == 0) return;
    ++a[i];
    prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
    for (std::size_t k = i + 1; k < r; ++k) {
      a[k] = 0;
      prefix_max[k] = prefix_max[i];
    }
  }
}

}  // namespace linkbound
