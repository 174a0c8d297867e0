#pragma once

#include "featimp/data_matrix.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace featimp {

/// Scores for one imputed matrix. Only cells masked by injection are scored.
struct R2Report {
  std::string method;
  std::size_t replicate = 0;
  double overall = 0.0;
  /// Feature name -> R^2, in column order.
  std::vector<std::pair<std::string, double>> per_feature;
  /// Features with fewer than three masked cells.
  std::vector<std::string> skipped;

  const double* feature(std::string_view name) const;
};

struct MethodSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t replicates = 0;
  /// Feature -> mean per-feature R^2 across the replicates that scored it.
  std::map<std::string, double> feature_mean;
};

struct AggregateReport {
  std::map<std::string, MethodSummary> methods;
};

/// Squared Pearson correlation of `imputed` with `truth` (the R^2 of the
/// simple regression of imputed on truth). Constant imputed or true values
/// score 0. Throws ContractError below three cells.
double imputation_r2(std::span<const double> imputed, std::span<const double> truth);

/// Per-feature R^2 over the cells unobserved in `masked`.
std::vector<std::pair<std::string, double>> per_feature_r2(const DataMatrix& imputed, const DataMatrix& truth,
                                                           const DataMatrix& masked,
                                                           std::vector<std::string>* skipped = nullptr);

/// Pooled R^2 over every masked cell; each column is z-scored with the
/// truth column's mean and sd before pooling.
double overall_r2(const DataMatrix& imputed, const DataMatrix& truth, const DataMatrix& masked);

R2Report score_imputation(const DataMatrix& imputed, const DataMatrix& truth, const DataMatrix& masked,
                          std::string method, std::size_t replicate);

AggregateReport aggregate(std::span<const R2Report> reports);

/// Tidy rows (method, replicate, feature|ALL, r2), sorted by replicate then method.
void save_r2_csv(const std::filesystem::path& path, std::vector<R2Report> reports);
std::vector<R2Report> load_r2_csv(const std::filesystem::path& path);

}  // namespace featimp
