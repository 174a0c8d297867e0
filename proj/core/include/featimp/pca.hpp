#pragma once

#include "featimp/data_matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace featimp {

/// Principal components of a column set.
///
/// `loadings` is features x k with unit-norm columns, `scores` is rows x k and
/// `explained` holds each component's share of the total sum of squares.
/// Every loading column is signed so that its largest-magnitude entry is
/// positive (first such entry on ties).
struct PcaModel {
  std::vector<std::string> feature_names;
  std::vector<Role> feature_roles;
  Matrix loadings;
  Matrix scores;
  Vector explained;
  /// NIPALS only: iterations used and final relative score change per component.
  std::vector<int> iterations;
  std::vector<double> final_delta;

  std::size_t components() const { return static_cast<std::size_t>(loadings.cols()); }
  /// First-component loading of the named feature.
  double pc1(std::string_view feature) const;
  /// Reconstruction from the first `k` components (rows x features).
  Matrix reconstruct(std::size_t k) const;
};

struct NipalsConfig {
  /// Number of components; 0 extracts all, up to min(rows, cols).
  std::size_t k = 0;
  /// Convergence threshold on ||t_new - t_old|| / ||t_new||.
  double tol = 1e-9;
  int max_iter = 500;
  /// When false, a component that hits max_iter is kept as is and its final
  /// delta stays in PcaModel::final_delta.
  bool require_convergence = true;
};

/// Eigendecomposition of the correlation matrix of complete data. `k` = 0
/// keeps every component. Scores are the standardized data times loadings.
PcaModel pca_correlation(const DataMatrix& m, std::size_t k = 0);

/// NIPALS on the values as given (callers standardize first). Missing cells
/// carry zero weight in both alternating regressions, and deflation touches
/// observed cells only. Extraction stops early once the observed residual
/// sum of squares vanishes. Throws ConvergenceError naming the component.
PcaModel nipals(const DataMatrix& m, const NipalsConfig& cfg = {});

/// Cross-validated component count: observed cells are split into `folds`
/// random folds; for each held-out fold NIPALS is fitted on the rest of the
/// standardized data and the held-out cells are reconstructed with
/// 1..k_max components. Returns the k with the lowest mean squared error,
/// smallest k on ties.
std::size_t estimate_k(const DataMatrix& m, std::size_t k_max, std::size_t folds, std::uint64_t seed,
                       const NipalsConfig& cfg = {});

/// Flips each loading column (and its scores) so that its largest-magnitude
/// entry is positive.
void apply_sign_convention(Matrix& loadings, Matrix& scores);

}  // namespace featimp
