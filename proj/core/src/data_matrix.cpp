#include "featimp/data_matrix.hpp"

#include "featimp/error.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

namespace featimp {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::feature: return "feature";
    case Role::driver: return "driver";
    case Role::demographic: return "demographic";
    case Role::class_label: return "class";
  }
  return "feature";
}

Role parse_role(std::string_view text) {
  if (text == "feature") return Role::feature;
  if (text == "driver") return Role::driver;
  if (text == "demographic") return Role::demographic;
  if (text == "class") return Role::class_label;
  throw SchemaError("unknown column role '" + std::string(text) + "'");
}

DataMatrix::DataMatrix(std::vector<ColumnInfo> columns, Matrix values)
    : columns_(std::move(columns)), values_(std::move(values)) {
  observed_ = Mask::Constant(values_.rows(), values_.cols(), true);
  validate();
}

DataMatrix::DataMatrix(std::vector<ColumnInfo> columns, Matrix values, Mask observed)
    : columns_(std::move(columns)), values_(std::move(values)), observed_(std::move(observed)) {
  validate();
}

void DataMatrix::validate() {
  if (static_cast<std::size_t>(values_.cols()) != columns_.size()) {
    throw SchemaError("value matrix has " + std::to_string(values_.cols()) + " columns but " +
                      std::to_string(columns_.size()) + " column descriptors were given");
  }
  if (observed_.rows() != values_.rows() || observed_.cols() != values_.cols()) {
    throw SchemaError("mask shape does not match value matrix");
  }
  std::unordered_set<std::string> seen;
  for (const auto& c : columns_) {
    if (!seen.insert(c.name).second) throw SchemaError("duplicate column name '" + c.name + "'");
  }
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      if (!observed_(i, j)) {
        values_(i, j) = nan;
      } else if (!std::isfinite(values_(i, j))) {
        throw IngestionError("non-finite observed value at row " + std::to_string(i) + ", column '" +
                             columns_[static_cast<std::size_t>(j)].name + "'");
      }
    }
  }
}

std::optional<std::size_t> DataMatrix::find(std::string_view name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].name == name) return j;
  }
  return std::nullopt;
}

std::size_t DataMatrix::index_of(std::string_view name) const {
  if (auto j = find(name)) return *j;
  throw SchemaError("unknown column '" + std::string(name) + "'");
}

std::vector<std::size_t> DataMatrix::indices_with_role(Role role) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].role == role) out.push_back(j);
  }
  return out;
}

std::vector<std::string> DataMatrix::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

std::size_t DataMatrix::observed_count(std::size_t j) const {
  return static_cast<std::size_t>(observed_.col(static_cast<Eigen::Index>(j)).count());
}

std::size_t DataMatrix::missing_count() const {
  return static_cast<std::size_t>(observed_.size() - observed_.count());
}

std::vector<double> DataMatrix::observed_values(std::size_t j) const {
  std::vector<double> out;
  const auto col = static_cast<Eigen::Index>(j);
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    if (observed_(i, col)) out.push_back(values_(i, col));
  }
  return out;
}

DataMatrix DataMatrix::with_values(Matrix values) const {
  return DataMatrix(columns_, std::move(values), observed_);
}

DataMatrix DataMatrix::with_mask(Mask observed) const {
  return DataMatrix(columns_, values_, std::move(observed));
}

DataMatrix DataMatrix::select(const std::vector<std::size_t>& cols) const {
  std::vector<ColumnInfo> info;
  Matrix v(values_.rows(), static_cast<Eigen::Index>(cols.size()));
  Mask m(values_.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    info.push_back(columns_.at(cols[k]));
    v.col(static_cast<Eigen::Index>(k)) = values_.col(static_cast<Eigen::Index>(cols[k]));
    m.col(static_cast<Eigen::Index>(k)) = observed_.col(static_cast<Eigen::Index>(cols[k]));
  }
  return DataMatrix(std::move(info), std::move(v), std::move(m));
}

DataMatrix DataMatrix::select(const std::vector<std::string>& names) const {
  std::vector<std::size_t> cols;
  cols.reserve(names.size());
  for (const auto& n : names) cols.push_back(index_of(n));
  return select(cols);
}

DataMatrix DataMatrix::without_roles(std::initializer_list<Role> drop) const {
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    bool dropped = false;
    for (Role r : drop) dropped = dropped || columns_[j].role == r;
    if (!dropped) keep.push_back(j);
  }
  return select(keep);
}

bool operator==(const DataMatrix& a, const DataMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    if (a.columns_[j].name != b.columns_[j].name || a.columns_[j].role != b.columns_[j].role) return false;
  }
  if ((a.observed_ != b.observed_).any()) return false;
  for (Eigen::Index j = 0; j < a.values_.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.values_.rows(); ++i) {
      if (a.observed_(i, j) && a.values_(i, j) != b.values_(i, j)) return false;
    }
  }
  return true;
}

}  // namespace featimp
