#pragma once

#include "featimp/evaluation.hpp"
#include "featimp/feature_select.hpp"
#include "featimp/imputability.hpp"
#include "featimp/imputers.hpp"
#include "featimp/pca.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace featimp {

/// loadings.csv (column, role, PC1..PCk), scores.csv and explained.csv under `dir`.
void save_pca(const std::filesystem::path& dir, const PcaModel& model, bool with_scores = true);
/// Reads a loadings.csv written by save_pca; scores and explained are left empty.
PcaModel load_loadings_csv(const std::filesystem::path& path);

void save_feature_ranking(const std::filesystem::path& path, const std::vector<IgScore>& scores);

/// Pretty-printed JSON documents.
std::string diagnostics_json(const ImputationResult& result);
std::string imputability_json(const ImputabilityReport& report);
std::string prediction_check_json(const PredictionCheck& check);
std::string aggregate_json(const AggregateReport& agg);

/// (feature, |PC1|, observed R^2, predicted R^2, residual, rank) rows for scatter plots.
void save_scatter_csv(const std::filesystem::path& path, const ImputabilityReport& report);
/// slope, intercept, fit_r2, p_value, n_points sidecar for a fitted line.
void save_line_csv(const std::filesystem::path& path, const OlsFit& fit);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace featimp
