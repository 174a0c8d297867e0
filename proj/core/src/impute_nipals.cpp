#include "featimp/error.hpp"
#include "featimp/imputers.hpp"
#include "featimp/pca.hpp"
#include "featimp/stats.hpp"
#include "impute_detail.hpp"

#include <algorithm>

namespace featimp {

ImputationResult impute_nipals(const DataMatrix& m, const NipalsImputeConfig& cfg) {
  detail::check_imputable(m, 2);
  const auto cols = detail::model_columns(m, cfg.predictors);
  const auto sub = m.select(cols);
  const auto scaling = Standardization::fit(sub);
  const auto z = scaling.apply(sub);

  ImputationResult result;
  result.method = "nipals";
  Matrix recon = Matrix::Zero(z.values().rows(), z.values().cols());
  if (cfg.k > 0) {
    NipalsConfig ncfg;
    ncfg.k = cfg.k;
    ncfg.tol = cfg.tol;
    ncfg.max_iter = cfg.max_iter;
    ncfg.require_convergence = cfg.require_convergence;
    const auto model = nipals(z, ncfg);
    recon = model.reconstruct(model.components());
    result.diagnostics.components = model.components();
    for (auto it : model.iterations) result.diagnostics.iterations += it;
    result.diagnostics.trace = model.final_delta;
    result.diagnostics.converged =
        std::all_of(model.final_delta.begin(), model.final_delta.end(), [&](double d) { return d < cfg.tol; });
  }
  result.diagnostics.stop_reason = result.diagnostics.converged ? "converged per component" : "max_iter reached";

  Matrix filled = m.values();
  const Matrix back = scaling.invert(recon);
  for (std::size_t c = 0; c < cols.size(); ++c) filled.col(static_cast<Eigen::Index>(cols[c])) = back.col(static_cast<Eigen::Index>(c));
  result.completed = detail::complete_with(m, filled);
  return result;
}

}  // namespace featimp
