#include "featimp/error.hpp"
#include "featimp/forest.hpp"
#include "featimp/imputers.hpp"
#include "featimp/random.hpp"
#include "impute_detail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace featimp {

ImputationResult impute_missforest(const DataMatrix& m, const ForestConfig& cfg, std::uint64_t seed) {
  if (cfg.n_trees < 1) throw ContractError("missForest: n_trees must be >= 1");
  if (cfg.max_rounds < 1) throw ContractError("missForest: max_rounds must be >= 1");
  auto targets = detail::check_imputable(m, 2);
  const auto cols = detail::model_columns(m, cfg.predictors);
  if (cols.size() < 2) throw ContractError("missForest: need at least one predictor column");

  std::stable_sort(targets.begin(), targets.end(),
                   [&](auto a, auto b) { return m.observed_count(a) > m.observed_count(b); });

  const auto n = static_cast<Eigen::Index>(m.rows());
  const auto q = static_cast<Eigen::Index>(cols.size()) - 1;
  TreeConfig tree_cfg;
  tree_cfg.mtry = cfg.mtry ? cfg.mtry : static_cast<std::size_t>((q + 2) / 3);
  tree_cfg.min_node = cfg.min_node;
  tree_cfg.max_depth = cfg.max_depth;
  if (tree_cfg.mtry > static_cast<std::size_t>(q)) throw ContractError("missForest: mtry exceeds #predictors");

  bool any_variation = false;
  for (auto c : cols) {
    const auto v = m.observed_values(c);
    any_variation = any_variation || std::any_of(v.begin(), v.end(), [&](double x) { return x != v.front(); });
  }
  if (!any_variation) throw DegenerateColumnError("missForest: every column is constant");

  ImputationResult result;
  result.method = "missforest";
  result.seed = seed;
  auto& diag = result.diagnostics;

  Matrix current = detail::mean_filled(m);
  Matrix previous = current;
  double last_delta = std::numeric_limits<double>::infinity();
  Matrix design(n, q);

  for (std::size_t round = 0; round < cfg.max_rounds; ++round) {
    previous = current;
    for (auto j : targets) {
      const auto jc = static_cast<Eigen::Index>(j);
      std::vector<Eigen::Index> preds;
      for (auto c : cols) {
        if (c != j) preds.push_back(static_cast<Eigen::Index>(c));
      }
      for (std::size_t k = 0; k < preds.size(); ++k) design.col(static_cast<Eigen::Index>(k)) = current.col(preds[k]);

      std::vector<Eigen::Index> obs_rows, mis_rows;
      for (Eigen::Index i = 0; i < n; ++i) (m.observed()(i, jc) ? obs_rows : mis_rows).push_back(i);
      Matrix x_obs(static_cast<Eigen::Index>(obs_rows.size()), q);
      Vector y_obs(static_cast<Eigen::Index>(obs_rows.size()));
      for (std::size_t r = 0; r < obs_rows.size(); ++r) {
        x_obs.row(static_cast<Eigen::Index>(r)) = design.row(obs_rows[r]);
        y_obs(static_cast<Eigen::Index>(r)) = current(obs_rows[r], jc);
      }
      RegressionForest forest;
      forest.fit(x_obs, y_obs, cfg.n_trees, tree_cfg, derive_seed(seed, "missforest", round, m.column(j).name));
      for (auto i : mis_rows) current(i, jc) = forest.predict(design.row(i));
    }
    const double denom = current.squaredNorm();
    const double delta = denom > 0.0 ? (current - previous).squaredNorm() / denom : 0.0;
    diag.trace.push_back(delta);
    diag.iterations = static_cast<int>(round + 1);
    if (delta >= last_delta) {
      current = previous;
      diag.stop_reason = "change increased; returned previous sweep";
      diag.converged = true;
      result.completed = detail::complete_with(m, current);
      return result;
    }
    last_delta = delta;
  }
  diag.stop_reason = "max_rounds reached";
  diag.converged = false;
  result.completed = detail::complete_with(m, current);
  return result;
}

}  // namespace featimp
