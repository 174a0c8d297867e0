#pragma once

#include "featimp/data_matrix.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace featimp {

/// Observed-cell summary of one column. `sd` is the sample (n-1) deviation.
struct ColumnStats {
  double mean = 0.0;
  double sd = 0.0;
  double median = 0.0;
  std::size_t observed_count = 0;
};

ColumnStats column_stats(const DataMatrix& m, std::string_view name);
ColumnStats column_stats(const DataMatrix& m, std::size_t j);

/// Per-column location and scale used to map to and from z-scores.
struct Standardization {
  Vector means;
  Vector sds;

  /// Observed-cell mean and sample sd of every column.
  static Standardization fit(const DataMatrix& m);

  DataMatrix apply(const DataMatrix& m) const;
  /// Inverse of apply on every cell, observed or not.
  Matrix invert(const Matrix& z) const;
};

/// Observed cells of every column mapped to mean 0, sample sd 1. The mask is
/// untouched. Throws DegenerateColumnError on a constant column.
DataMatrix standardize(const DataMatrix& m);

/// Pairwise-complete Pearson correlation: each entry uses the rows where
/// both columns are observed. Throws OverlapError when a pair shares fewer
/// than three rows and DegenerateColumnError when a column is constant on the
/// overlap.
Matrix correlation_matrix(const DataMatrix& m);

double mean(std::span<const double> x);
/// Midpoint of the two central order statistics for even counts.
double median(std::vector<double> x);
double sample_sd(std::span<const double> x);
double pearson(std::span<const double> x, std::span<const double> y);
/// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> x);
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace featimp
