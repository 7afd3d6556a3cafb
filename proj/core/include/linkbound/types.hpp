#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace linkbound {

/// All field values are stored as indices into the field's domain: a category
/// in [0, M) for categorical fields, a position in S for string fields.
using Value = std::uint32_t;
using EntityIndex = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major rows x fields table.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t fields, T fill = T{})
      : rows_(rows), fields_(fields), data_(rows * fields, fill) {}
  Grid(std::size_t rows, std::size_t fields, std::vector<T> data)
      : rows_(rows), fields_(fields), data_(std::move(data)) {
    if (data_.size() != rows_ * fields_) throw Error("grid data size does not match shape");
  }

  std::size_t rows() const { return rows_; }
  std::size_t fields() const { return fields_; }

  T operator()(std::size_t row, std::size_t field) const { return data_[row * fields_ + field]; }
  T& operator()(std::size_t row, std::size_t field) { return data_[row * fields_ + field]; }

  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * fields_, fields_};
  }
  std::span<T> row(std::size_t r) { return {data_.data() + r * fields_, fields_}; }

  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t fields_ = 0;
  std::vector<T> data_;
};

using ValueTable = Grid<Value>;

/// True entity attributes, one row per latent entity.
using LatentEntityTable = ValueTable;

/// z: 1 where the observed field was drawn from the distortion distribution.
using DistortionMask = Grid<std::uint8_t>;

/// Record -> latent entity, records flattened database-major.
using LinkageStructure = std::vector<EntityIndex>;

/// Observed records X across k databases. Records are flattened in database
/// order so record r of database i sits at offset(i) + j.
class RecordTable {
 public:
  RecordTable() = default;
  RecordTable(std::vector<std::size_t> database_sizes, ValueTable values);

  std::size_t database_count() const { return database_sizes_.size(); }
  std::size_t record_count() const { return values_.rows(); }
  std::size_t field_count() const { return values_.fields(); }
  const std::vector<std::size_t>& database_sizes() const { return database_sizes_; }
  const ValueTable& values() const { return values_; }

  std::span<const Value> record(std::size_t r) const { return values_.row(r); }
  Value operator()(std::size_t r, std::size_t field) const { return values_(r, field); }

  /// Flat index of record j in database i.
  std::size_t index_of(std::size_t database, std::size_t j) const;

  friend bool operator==(const RecordTable&, const RecordTable&) = default;

 private:
  std::vector<std::size_t> database_sizes_;
  ValueTable values_;
};

}  // namespace linkbound
