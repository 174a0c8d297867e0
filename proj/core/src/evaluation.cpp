#include "featimp/evaluation.hpp"

#include "featimp/csv_io.hpp"
#include "featimp/error.hpp"
#include "featimp/kv_config.hpp"
#include "featimp/stats.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

namespace featimp {

namespace {

void check_shapes(const DataMatrix& imputed, const DataMatrix& truth, const DataMatrix& masked) {
  if (imputed.rows() != truth.rows() || imputed.cols() != truth.cols() || masked.rows() != truth.rows() ||
      masked.cols() != truth.cols()) {
    throw ContractError("evaluation: imputed, truth and masked matrices differ in shape");
  }
}

}  // namespace

const double* R2Report::feature(std::string_view name) const {
  for (const auto& [f, r2] : per_feature) {
    if (f == name) return &r2;
  }
  return nullptr;
}

double imputation_r2(std::span<const double> imputed, std::span<const double> truth) {
  if (imputed.size() != truth.size()) throw ContractError("imputation_r2: length mismatch");
  if (imputed.size() < 3) throw ContractError("imputation_r2: need at least 3 evaluated cells");
  const double r = pearson(imputed, truth);
  return r * r;
}

std::vector<std::pair<std::string, double>> per_feature_r2(const DataMatrix& imputed, const DataMatrix& truth,
                                                           const DataMatrix& masked,
                                                           std::vector<std::string>* skipped) {
  check_shapes(imputed, truth, masked);
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t j = 0; j < truth.cols(); ++j) {
    if (truth.column(j).role != Role::feature) continue;
    const auto& name = truth.column(j).name;
    const auto src = imputed.index_of(name);
    const auto msk = masked.index_of(name);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < truth.rows(); ++i) {
      if (!masked.is_observed(i, msk)) {
        a.push_back(imputed.value(i, src));
        b.push_back(truth.value(i, j));
      }
    }
    if (a.size() < 3) {
      if (a.size() > 0 && skipped) skipped->push_back(name);
      continue;
    }
    out.emplace_back(name, imputation_r2(a, b));
  }
  return out;
}

double overall_r2(const DataMatrix& imputed, const DataMatrix& truth, const DataMatrix& masked) {
  check_shapes(imputed, truth, masked);
  std::vector<double> a, b;
  for (std::size_t j = 0; j < truth.cols(); ++j) {
    const auto& name = truth.column(j).name;
    const auto src = imputed.index_of(name);
    const auto msk = masked.index_of(name);
    const auto st = column_stats(truth, j);
    if (!(st.sd > 0.0)) continue;
    for (std::size_t i = 0; i < truth.rows(); ++i) {
      if (!masked.is_observed(i, msk)) {
        a.push_back((imputed.value(i, src) - st.mean) / st.sd);
        b.push_back((truth.value(i, j) - st.mean) / st.sd);
      }
    }
  }
  return imputation_r2(a, b);
}

R2Report score_imputation(const DataMatrix& imputed, const DataMatrix& truth, const DataMatrix& masked,
                          std::string method, std::size_t replicate) {
  R2Report r;
  r.method = std::move(method);
  r.replicate = replicate;
  r.overall = overall_r2(imputed, truth, masked);
  r.per_feature = per_feature_r2(imputed, truth, masked, &r.skipped);
  return r;
}

AggregateReport aggregate(std::span<const R2Report> reports) {
  AggregateReport agg;
  std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> feature_sums;
  for (const auto& r : reports) {
    auto [it, fresh] = agg.methods.try_emplace(r.method);
    auto& s = it->second;
    if (fresh) {
      s.min = std::numeric_limits<double>::infinity();
      s.max = -std::numeric_limits<double>::infinity();
    }
    s.mean += r.overall;
    s.min = std::min(s.min, r.overall);
    s.max = std::max(s.max, r.overall);
    ++s.replicates;
    for (const auto& [f, v] : r.per_feature) {
      auto& acc = feature_sums[r.method][f];
      acc.first += v;
      ++acc.second;
    }
  }
  for (auto& [method, s] : agg.methods) {
    s.mean /= static_cast<double>(s.replicates);
    for (const auto& [f, acc] : feature_sums[method]) s.feature_mean[f] = acc.first / static_cast<double>(acc.second);
  }
  return agg;
}

void save_r2_csv(const std::filesystem::path& path, std::vector<R2Report> reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
    return a.replicate != b.replicate ? a.replicate < b.replicate : a.method < b.method;
  });
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << "method,replicate,feature,r2\n";
  for (const auto& r : reports) {
    f << r.method << ',' << r.replicate << ",ALL," << format_double(r.overall) << '\n';
    for (const auto& [feat, v] : r.per_feature) f << r.method << ',' << r.replicate << ',' << feat << ',' << format_double(v) << '\n';
  }
}

std::vector<R2Report> load_r2_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "'");
  std::string line;
  std::getline(f, line);
  if (trim(line) != "method,replicate,feature,r2") throw IngestionError("unexpected R^2 CSV header in '" + path.string() + "'");
  std::vector<R2Report> out;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4) throw IngestionError("line " + std::to_string(lineno) + ": expected 4 fields");
    std::size_t rep = 0;
    double r2 = 0.0;
    try {
      rep = std::stoul(fields[1]);
      r2 = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw IngestionError("line " + std::to_string(lineno) + ": cannot parse replicate or r2");
    }
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const auto& r) { return r.method == fields[0] && r.replicate == rep; });
    if (it == out.end()) {
      out.push_back({fields[0], rep, 0.0, {}, {}});
      it = out.end() - 1;
    }
    if (fields[2] == "ALL") {
      it->overall = r2;
    } else {
      it->per_feature.emplace_back(fields[2], r2);
    }
  }
  return out;
}

}  // namespace featimp
