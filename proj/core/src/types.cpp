#include "linkbound/types.hpp"

#include <numeric>

namespace linkbound {

RecordTable::RecordTable(std::vector<std::size_t> database_sizes, ValueTable values)
    : database_sizes_(std::move(database_sizes)), values_(std::move(values)) {
  const auto total = std::accumulate(database_sizes_.begin(), database_sizes_.end(), std::size_t{0});
  if (total != values_.rows()) throw Error("database sizes do not sum to the record count");
}

std::size_t RecordTable::index_of(std::size_t database, std::size_t j) const {
  if (database >= database_sizes_.size() || j >= database_sizes_[database])
    throw Error("record index out of range");
  std::size_t offset = 0;
  for (std::size_t i = 0; i < database; ++i) offset += database_sizes_[i];
  return offset + j;
}

}  // namespace linkbound
