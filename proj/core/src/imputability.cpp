#include "featimp/imputability.hpp"

#include "featimp/error.hpp"
#include "featimp/stats.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace featimp {

namespace {

void assign_ranks(std::vector<FeatureImputability>& feats) {
  std::vector<std::size_t> order(feats.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return feats[a].abs_pc1 > feats[b].abs_pc1; });
  for (std::size_t r = 0; r < order.size(); ++r) feats[order[r]].rank = r + 1;
}

std::size_t loading_index(const PcaModel& pca, const std::string& feature) {
  for (std::size_t j = 0; j < pca.feature_names.size(); ++j) {
    if (pca.feature_names[j] == feature) return j;
  }
  throw SchemaError("feature '" + feature + "' has no PC1 loading");
}

}  // namespace

std::string_view to_string(LoadingSource s) {
  return s == LoadingSource::complete_pca ? "complete-data PCA" : "NIPALS on missing data";
}

double t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw ContractError("t_two_sided_p: degrees of freedom must be positive");
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  return boost::math::ibeta(0.5 * df, 0.5, df / (df + t * t));
}

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractError("ols_fit: length mismatch");
  if (x.size() < 3) throw ContractError("ols_fit: need at least 3 points");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateColumnError("ols_fit: all x values are equal");

  OlsFit f;
  f.n_points = x.size();
  if (syy == 0.0) {
    f.slope = 0.0;
    f.intercept = my;
    f.fit_r2 = 0.0;
    f.p_value = 1.0;
    return f;
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.fit_r2 = std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  const double sse = std::max(0.0, syy - f.slope * sxy);
  const double df = n - 2.0;
  if (sse <= 1e-30 * syy) {
    f.p_value = std::numeric_limits<double>::min();
  } else {
    const double se = std::sqrt(sse / df / sxx);
    f.p_value = std::max(t_two_sided_p(f.slope / se, df), std::numeric_limits<double>::min());
  }
  return f;
}

double Calibration::predict(double abs_loading) const {
  return std::clamp(slope * abs_loading + intercept, 0.0, 1.0);
}

ImputabilityReport fit_imputability(std::span<const std::pair<std::string, double>> per_feature_r2,
                                    const PcaModel& pca, LoadingSource source) {
  if (per_feature_r2.size() < 3) throw ContractError("fit_imputability: need at least 3 scored features");
  if (pca.components() < 1) throw ContractError("fit_imputability: PCA model has no components");
  ImputabilityReport rep;
  rep.source = source;
  std::vector<double> xs, ys;
  for (const auto& [feature, r2] : per_feature_r2) {
    const auto j = loading_index(pca, feature);
    FeatureImputability fi;
    fi.feature = feature;
    fi.abs_pc1 = std::abs(pca.loadings(static_cast<Eigen::Index>(j), 0));
    fi.observed_r2 = r2;
    xs.push_back(fi.abs_pc1);
    ys.push_back(r2);
    rep.features.push_back(std::move(fi));
  }
  rep.fit = ols_fit(xs, ys);
  rep.calibration = Calibration{rep.fit->slope, rep.fit->intercept};
  for (auto& fi : rep.features) {
    const double line = rep.fit->slope * fi.abs_pc1 + rep.fit->intercept;
    fi.predicted_r2 = rep.calibration->predict(fi.abs_pc1);
    fi.residual = *fi.observed_r2 - line;
  }
  assign_ranks(rep.features);
  return rep;
}

ImputabilityReport predict_imputability(const PcaModel& pca, std::optional<Calibration> calibration,
                                        LoadingSource source) {
  if (pca.components() < 1) throw ContractError("predict_imputability: PCA model has no components");
  ImputabilityReport rep;
  rep.source = source;
  rep.calibration = calibration;
  for (std::size_t j = 0; j < pca.feature_names.size(); ++j) {
    if (pca.feature_roles.size() == pca.feature_names.size() && pca.feature_roles[j] != Role::feature) continue;
    FeatureImputability fi;
    fi.feature = pca.feature_names[j];
    fi.abs_pc1 = std::abs(pca.loadings(static_cast<Eigen::Index>(j), 0));
    if (calibration) fi.predicted_r2 = calibration->predict(fi.abs_pc1);
    rep.features.push_back(std::move(fi));
  }
  if (rep.features.size() < 2) throw ContractError("predict_imputability: need at least 2 features");
  assign_ranks(rep.features);
  return rep;
}

PredictionCheck validate_prediction(const ImputabilityReport& prediction,
                                    std::span<const std::pair<std::string, double>> observed_r2) {
  PredictionCheck check;
  check.report = prediction;
  std::vector<double> xs, ys, neg_rank;
  for (const auto& [feature, r2] : observed_r2) {
    auto it = std::find_if(check.report.features.begin(), check.report.features.end(),
                           [&](const auto& f) { return f.feature == feature; });
    if (it == check.report.features.end()) {
      throw SchemaError("validate_prediction: feature '" + feature + "' is not in the prediction");
    }
    it->observed_r2 = r2;
    xs.push_back(it->abs_pc1);
    ys.push_back(r2);
    neg_rank.push_back(-static_cast<double>(it->rank));
  }
  check.fit = ols_fit(xs, ys);
  for (auto& f : check.report.features) {
    if (f.observed_r2) f.residual = *f.observed_r2 - (check.fit.slope * f.abs_pc1 + check.fit.intercept);
  }
  check.report.fit = check.fit;
  check.spearman = spearman(neg_rank, ys);
  return check;
}

}  // namespace featimp
