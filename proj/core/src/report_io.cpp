#include "featimp/report_io.hpp"

#include "featimp/csv_io.hpp"
#include "featimp/error.hpp"
#include "featimp/kv_config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace featimp {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  return f;
}

json fit_to_json(const OlsFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"fit_r2", f.fit_r2}, {"p_value", f.p_value},
          {"n_points", f.n_points}};
}

json report_to_json(const ImputabilityReport& r) {
  json j;
  j["source"] = std::string(to_string(r.source));
  if (r.fit) j["fit"] = fit_to_json(*r.fit);
  if (r.calibration) j["calibration"] = {{"slope", r.calibration->slope}, {"intercept", r.calibration->intercept}};
  j["features"] = json::array();
  for (const auto& f : r.features) {
    json e{{"feature", f.feature}, {"abs_pc1", f.abs_pc1}, {"rank", f.rank}};
    if (f.observed_r2) e["observed_r2"] = *f.observed_r2;
    if (f.predicted_r2) e["predicted_r2"] = *f.predicted_r2;
    if (f.residual) e["residual"] = *f.residual;
    j["features"].push_back(std::move(e));
  }
  return j;
}

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  if (text.empty() || text.back() != '\n') f << '\n';
}

void save_pca(const std::filesystem::path& dir, const PcaModel& model, bool with_scores) {
  const auto k = model.components();
  {
    auto f = open_out(dir / "loadings.csv");
    f << "column,role";
    for (std::size_t c = 0; c < k; ++c) f << ",PC" << c + 1;
    f << '\n';
    for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
      f << model.feature_names[j] << ','
        << (j < model.feature_roles.size() ? to_string(model.feature_roles[j]) : std::string_view("feature"));
      for (std::size_t c = 0; c < k; ++c) {
        f << ',' << format_double(model.loadings(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)));
      }
      f << '\n';
    }
  }
  {
    auto f = open_out(dir / "explained.csv");
    f << "component,explained\n";
    for (Eigen::Index c = 0; c < model.explained.size(); ++c) f << "PC" << c + 1 << ',' << format_double(model.explained(c)) << '\n';
  }
  if (with_scores) {
    auto f = open_out(dir / "scores.csv");
    for (std::size_t c = 0; c < k; ++c) f << (c ? "," : "") << "PC" << c + 1;
    f << '\n';
    for (Eigen::Index i = 0; i < model.scores.rows(); ++i) {
      for (Eigen::Index c = 0; c < model.scores.cols(); ++c) f << (c ? "," : "") << format_double(model.scores(i, c));
      f << '\n';
    }
  }
}

PcaModel load_loadings_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::string header;
  std::getline(in, header);
  const auto cols = split(header, ',');
  if (cols.size() < 3 || cols[0] != "column" || cols[1] != "role") {
    throw IngestionError("'" + path.string() + "' is not a loadings CSV (expected column,role,PC1,...)");
  }
  const auto k = cols.size() - 2;
  PcaModel model;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != cols.size()) throw IngestionError("loadings row has the wrong number of fields: " + line);
    model.feature_names.push_back(f[0]);
    model.feature_roles.push_back(parse_role(f[1]));
    std::vector<double> r;
    for (std::size_t c = 2; c < f.size(); ++c) {
      try {
        r.push_back(std::stod(f[c]));
      } catch (const std::exception&) {
        throw IngestionError("cannot parse loading '" + f[c] + "' for '" + f[0] + "'");
      }
    }
    rows.push_back(std::move(r));
  }
  model.loadings.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t c = 0; c < k; ++c) model.loadings(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = rows[j][c];
  }
  return model;
}

void save_feature_ranking(const std::filesystem::path& path, const std::vector<IgScore>& scores) {
  auto f = open_out(path);
  f << "feature,gain\n";
  for (const auto& s : scores) f << s.feature << ',' << format_double(s.gain) << '\n';
}

std::string diagnostics_json(const ImputationResult& result) {
  const auto& d = result.diagnostics;
  json j{{"method", result.method},
         {"seed", result.seed},
         {"iterations", d.iterations},
         {"converged", d.converged},
         {"stop_reason", d.stop_reason},
         {"components", d.components},
         {"trace", d.trace}};
  return j.dump(2);
}

std::string imputability_json(const ImputabilityReport& report) { return report_to_json(report).dump(2); }

std::string prediction_check_json(const PredictionCheck& check) {
  json j = report_to_json(check.report);
  j["fit"] = fit_to_json(check.fit);
  j["spearman"] = check.spearman;
  return j.dump(2);
}

std::string aggregate_json(const AggregateReport& agg) {
  json j = json::object();
  for (const auto& [method, s] : agg.methods) {
    j[method] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"replicates", s.replicates},
                 {"per_feature", s.feature_mean}};
  }
  return j.dump(2);
}

void save_scatter_csv(const std::filesystem::path& path, const ImputabilityReport& report) {
  auto f = open_out(path);
  f << "feature,abs_pc1,observed_r2,predicted_r2,residual,rank\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
  for (const auto& x : report.features) {
    f << x.feature << ',' << format_double(x.abs_pc1) << ',' << opt(x.observed_r2) << ',' << opt(x.predicted_r2) << ','
      << opt(x.residual) << ',' << x.rank << '\n';
  }
}

void save_line_csv(const std::filesystem::path& path, const OlsFit& fit) {
  auto f = open_out(path);
  f << "slope,intercept,fit_r2,p_value,n_points\n"
    << format_double(fit.slope) << ',' << format_double(fit.intercept) << ',' << format_double(fit.fit_r2) << ','
    << format_double(fit.p_value) << ',' << fit.n_points << '\n';
}

}  // namespace featimp
