#include "featimp/error.hpp"
#include "featimp/imputers.hpp"
#include "featimp/stats.hpp"
#include "impute_detail.hpp"

namespace featimp {

namespace detail {

std::vector<std::size_t> check_imputable(const DataMatrix& m, std::size_t min_observed) {
  std::vector<std::size_t> targets;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const auto obs = m.observed_count(j);
    if (m.column(j).role != Role::feature) {
      if (obs != m.rows()) {
        throw ContractError("non-feature column '" + m.column(j).name + "' has missing cells");
      }
      continue;
    }
    if (obs < min_observed) {
      throw DegenerateColumnError("column '" + m.column(j).name + "' has " + std::to_string(obs) +
                                  " observed values (need " + std::to_string(min_observed) + ")");
    }
    if (obs < m.rows()) targets.push_back(j);
  }
  return targets;
}

std::vector<std::size_t> model_columns(const DataMatrix& m, const PredictorOptions& opts) {
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (!opts.use_class && m.column(j).role == Role::class_label) continue;
    cols.push_back(j);
  }
  return cols;
}

DataMatrix complete_with(const DataMatrix& m, const Matrix& filled) {
  Matrix v = m.observed().select(m.values(), filled);
  return DataMatrix(m.columns(), std::move(v));
}

Matrix mean_filled(const DataMatrix& m) {
  Matrix v = m.values();
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const double mu = mean(m.observed_values(j));
    const auto c = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (!m.observed()(i, c)) v(i, c) = mu;
    }
  }
  return v;
}

}  // namespace detail

namespace {

template <typename Centre>
ImputationResult impute_univariate(const DataMatrix& m, const char* method, Centre centre) {
  const auto targets = detail::check_imputable(m, 1);
  Matrix v = m.values();
  for (auto j : targets) {
    const double fill = centre(m.observed_values(j));
    const auto c = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (!m.observed()(i, c)) v(i, c) = fill;
    }
  }
  ImputationResult r{DataMatrix(m.columns(), std::move(v)), method, 0, {}};
  r.diagnostics.stop_reason = "closed form";
  return r;
}

}  // namespace

ImputationResult impute_mean(const DataMatrix& m) {
  return impute_univariate(m, "mean", [](const std::vector<double>& v) { return mean(v); });
}

ImputationResult impute_median(const DataMatrix& m) {
  return impute_univariate(m, "median", [](std::vector<double> v) { return median(std::move(v)); });
}

}  // namespace featimp
