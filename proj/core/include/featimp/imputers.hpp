#pragma once

#include "featimp/data_matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace featimp {

/// Per-run convergence record. `trace` holds one entry per iteration: the
/// missForest sweep-over-sweep change, the PPCA observed log-likelihood, or
/// the PMM per-cycle RMS change of imputed cells (imputation-major order).
struct ImputationDiagnostics {
  int iterations = 0;
  bool converged = true;
  std::string stop_reason;
  std::vector<double> trace;
  std::size_t components = 0;
};

/// A completed matrix. Only cells that were masked in the input differ from
/// it; observed cells are copied bit for bit and the mask is all-true.
struct ImputationResult {
  DataMatrix completed;
  std::string method;
  std::uint64_t seed = 0;
  ImputationDiagnostics diagnostics;
};

/// Which columns a multivariate imputer may read. Only feature columns are
/// ever imputed; every other column must be complete.
struct PredictorOptions {
  bool use_class = true;
};

ImputationResult impute_mean(const DataMatrix& m);
ImputationResult impute_median(const DataMatrix& m);

struct PmmConfig {
  std::size_t m = 15;
  std::size_t donors = 5;
  std::size_t cycles = 5;
  double ridge = 1e-5;
  PredictorOptions predictors;
};

/// The `cfg.m` single imputations, each a chained-equations run with
/// predictive mean matching (every imputed cell is a copied observed value).
std::vector<DataMatrix> pmm_imputations(const DataMatrix& m, const PmmConfig& cfg, std::uint64_t seed,
                                        ImputationDiagnostics* diagnostics = nullptr);

/// Cell-wise mean of `pmm_imputations`.
ImputationResult impute_pmm(const DataMatrix& m, const PmmConfig& cfg, std::uint64_t seed);

struct ForestConfig {
  std::size_t n_trees = 100;
  /// Predictors tried per split; 0 means ceil(#predictors / 3).
  std::size_t mtry = 0;
  std::size_t min_node = 5;
  /// 0 means unlimited depth.
  std::size_t max_depth = 0;
  std::size_t max_rounds = 10;
  PredictorOptions predictors;
};

/// Iterative random-forest imputation. Starts from mean imputation, refits one
/// forest per column (fewest missing first) each sweep, and stops when the
/// normalized sweep-over-sweep change stops decreasing, returning the sweep
/// before the increase (or the last sweep at max_rounds).
ImputationResult impute_missforest(const DataMatrix& m, const ForestConfig& cfg, std::uint64_t seed);

struct PpcaConfig {
  std::size_t k = 3;
  int max_iter = 2000;
  /// Relative change of the observed log-likelihood.
  double tol = 1e-6;
  /// Lower bound on the noise variance (standardized scale).
  double sigma2_floor = 1e-10;
  PredictorOptions predictors;
};

/// Probabilistic PCA fitted by exact EM with missing coordinates treated as
/// latent; masked cells take their posterior mean. Data are standardized
/// internally and mapped back.
ImputationResult impute_ppca(const DataMatrix& m, const PpcaConfig& cfg, std::uint64_t seed);

struct NipalsImputeConfig {
  std::size_t k = 3;
  double tol = 1e-9;
  int max_iter = 500;
  bool require_convergence = true;
  PredictorOptions predictors;
};

/// Low-rank NIPALS reconstruction on the standardized scale, de-standardized.
/// k = 0 reduces to mean imputation.
ImputationResult impute_nipals(const DataMatrix& m, const NipalsImputeConfig& cfg);

}  // namespace featimp
