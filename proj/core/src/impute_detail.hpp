#pragma once

#include "featimp/data_matrix.hpp"
#include "featimp/imputers.hpp"

#include <vector>

namespace featimp::detail {

/// Validates the imputation contract: every non-feature column is complete and
/// every feature column has at least `min_observed` observed cells. Returns
/// the feature columns that have missing cells.
std::vector<std::size_t> check_imputable(const DataMatrix& m, std::size_t min_observed);

/// Columns a multivariate model reads: all but the class column when
/// `use_class` is off.
std::vector<std::size_t> model_columns(const DataMatrix& m, const PredictorOptions& opts);

/// Observed cells keep their input value; masked cells take `filled`.
DataMatrix complete_with(const DataMatrix& m, const Matrix& filled);

/// Observed values with masked cells replaced by their column mean.
Matrix mean_filled(const DataMatrix& m);

}  // namespace featimp::detail
