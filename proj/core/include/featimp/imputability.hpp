#pragma once

#include "featimp/pca.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace featimp {

/// Simple linear regression y = intercept + slope * x with the two-sided
/// t-test on the slope (n - 2 degrees of freedom).
struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double fit_r2 = 0.0;
  double p_value = 1.0;
  std::size_t n_points = 0;
};

/// Conventions: constant y gives slope 0, fit_r2 0, p 1; an exact fit with
/// non-zero slope reports the smallest positive normalized double as p.
OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

/// Two-sided P(|T| >= |t|) for Student's t with `df` degrees of freedom,
/// I_{df/(df+t^2)}(df/2, 1/2).
double t_two_sided_p(double t, double df);

/// Maps |PC1 loading| to a predicted imputation R^2.
struct Calibration {
  double slope = 0.0;
  double intercept = 0.0;

  double predict(double abs_loading) const;
};

/// The line (slope 1.9, intercept 0.19) fitted on the original clinical
/// cohort, for use when no local ground truth exists.
constexpr Calibration reference_calibration() { return {1.9, 0.19}; }

enum class LoadingSource { complete_pca, nipals_missing };

struct FeatureImputability {
  std::string feature;
  double abs_pc1 = 0.0;
  std::optional<double> observed_r2;
  std::optional<double> predicted_r2;
  /// observed - fitted line value, when a fit exists.
  std::optional<double> residual;
  /// 1 = most imputable by |PC1|; ties follow column order.
  std::size_t rank = 0;
};

struct ImputabilityReport {
  LoadingSource source = LoadingSource::complete_pca;
  std::vector<FeatureImputability> features;
  std::optional<OlsFit> fit;
  std::optional<Calibration> calibration;
};

/// Regresses observed per-feature R^2 on |PC1| of the matching features.
/// Predicted R^2 comes from the fitted line, clamped to [0, 1].
ImputabilityReport fit_imputability(std::span<const std::pair<std::string, double>> per_feature_r2,
                                    const PcaModel& pca, LoadingSource source = LoadingSource::complete_pca);

/// Ranks the feature-role columns of `pca` by |PC1| and, given a calibration,
/// attaches clamp(slope * |PC1| + intercept, 0, 1).
ImputabilityReport predict_imputability(const PcaModel& pca, std::optional<Calibration> calibration = std::nullopt,
                                        LoadingSource source = LoadingSource::nipals_missing);

struct PredictionCheck {
  OlsFit fit;
  double spearman = 0.0;
  ImputabilityReport report;
};

/// Observed R^2 regressed on the report's |PC1|, plus the Spearman correlation
/// between the predicted rank and the observed R^2 rank.
PredictionCheck validate_prediction(const ImputabilityReport& prediction,
                                    std::span<const std::pair<std::string, double>> observed_r2);

std::string_view to_string(LoadingSource s);

}  // namespace featimp
