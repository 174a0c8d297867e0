#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace featimp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// What a column is for. Only `feature` columns ever receive injected
/// missingness or imputed values.
enum class Role { feature, driver, demographic, class_label };

std::string_view to_string(Role role);
Role parse_role(std::string_view text);

struct ColumnInfo {
  std::string name;
  Role role = Role::feature;
};

/// Rows x columns of reals with an explicit observed-mask.
///
/// The mask is the only record of missingness: masked cells hold NaN so that
/// accidental reads poison results, but no code path treats NaN as a marker.
/// Instances are immutable; "modifying" operations return new matrices.
class DataMatrix {
 public:
  DataMatrix() = default;

  /// Fully observed matrix.
  DataMatrix(std::vector<ColumnInfo> columns, Matrix values);

  /// `observed(i, j) == false` marks a missing cell; its value is ignored.
  DataMatrix(std::vector<ColumnInfo> columns, Matrix values, Mask observed);

  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const { return columns_.size(); }

  const std::vector<ColumnInfo>& columns() const { return columns_; }
  const ColumnInfo& column(std::size_t j) const { return columns_.at(j); }

  /// Index of the named column, or nullopt.
  std::optional<std::size_t> find(std::string_view name) const;
  /// Index of the named column; throws SchemaError when absent.
  std::size_t index_of(std::string_view name) const;

  std::vector<std::size_t> indices_with_role(Role role) const;
  std::vector<std::string> names() const;

  const Matrix& values() const { return values_; }
  const Mask& observed() const { return observed_; }

  double value(std::size_t i, std::size_t j) const { return values_(i, j); }
  bool is_observed(std::size_t i, std::size_t j) const { return observed_(i, j); }

  std::size_t observed_count(std::size_t j) const;
  std::size_t missing_count() const;
  bool complete() const { return missing_count() == 0; }

  /// Observed values of column j, in row order.
  std::vector<double> observed_values(std::size_t j) const;

  /// Same columns, new cell values, same mask.
  DataMatrix with_values(Matrix values) const;
  /// Same columns and values, new mask.
  DataMatrix with_mask(Mask observed) const;
  /// Subset of columns, in the given order.
  DataMatrix select(const std::vector<std::size_t>& cols) const;
  /// Subset of columns by name, in the given order.
  DataMatrix select(const std::vector<std::string>& names) const;
  /// Columns whose role is not in `drop`.
  DataMatrix without_roles(std::initializer_list<Role> drop) const;

  /// Exact equality of columns, mask and observed values.
  friend bool operator==(const DataMatrix& a, const DataMatrix& b);

 private:
  void validate();

  std::vector<ColumnInfo> columns_;
  Matrix values_;
  Mask observed_;
};

}  // namespace featimp
