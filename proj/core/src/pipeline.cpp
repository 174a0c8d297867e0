#include "featimp/pipeline.hpp"

#include "featimp/error.hpp"
#include "featimp/evaluation.hpp"
#include "featimp/feature_select.hpp"
#include "featimp/kv_config.hpp"
#include "featimp/random.hpp"
#include "featimp/report_io.hpp"
#include "featimp/stats.hpp"
#include "featimp/synth.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace featimp {

using nlohmann::json;

namespace {

std::size_t to_count(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    throw SchemaError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw SchemaError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw SchemaError("config key '" + key + "': expected true/false, got '" + v + "'");
}

// "auto" or a positive count.
void set_k(const std::string& key, const std::string& v, std::size_t& k, bool& automatic) {
  if (v == "auto") {
    automatic = true;
  } else {
    automatic = false;
    k = to_count(key, v);
  }
}

const std::vector<std::string> kKnownMethods{"mean", "median", "pmm", "missforest", "ppca", "nipals"};

std::string rep_dir_name(std::size_t r) {
  std::ostringstream s;
  s << "rep_" << (r < 10 ? "0" : "") << r;
  return s.str();
}

json fit_json(const OlsFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"fit_r2", f.fit_r2}, {"p_value", f.p_value},
          {"n_points", f.n_points}};
}

json points_json(const ImputabilityReport& r) {
  json pts = json::array();
  for (const auto& f : r.features) {
    json e{{"feature", f.feature}, {"abs_pc1", f.abs_pc1}, {"rank", f.rank}};
    if (f.observed_r2) e["r2"] = *f.observed_r2;
    if (f.predicted_r2) e["predicted_r2"] = *f.predicted_r2;
    if (f.residual) e["residual"] = *f.residual;
    pts.push_back(std::move(e));
  }
  return pts;
}

}  // namespace

PipelineError::PipelineError(std::string stage, std::optional<std::size_t> replicate, std::string method,
                             const std::string& what)
    : Error("stage '" + stage + "'" + (replicate ? ", replicate " + std::to_string(*replicate) : std::string()) +
            (method.empty() ? std::string() : ", method '" + method + "'") + ": " + what),
      stage_(std::move(stage)),
      replicate_(replicate),
      method_(std::move(method)) {}

std::string PipelineError::report() const {
  json j{{"status", "error"}, {"stage", stage_}, {"message", what()}};
  j["replicate"] = replicate_ ? json(*replicate_) : json(nullptr);
  j["method"] = method_.empty() ? json(nullptr) : json(method_);
  return j.dump(2);
}

std::vector<std::pair<std::string, std::string>> config_keys() {
  return {
      {"input", "CSV file with the base dataset"},
      {"schema", "schema file (name = role) for the input CSV"},
      {"synth_spec", "latent spec file used when no input CSV is given"},
      {"rows", "row count override for synthetic data"},
      {"synth_seed", "seed override for synthetic data"},
      {"class", "class column name"},
      {"driver", "missingness driver column name"},
      {"select_k", "number of features kept by information gain (0 = all)"},
      {"bins", "equal-frequency bins for information gain"},
      {"base_rate", "missingness base probability"},
      {"slope", "missingness probability per driver unit"},
      {"sign", "+1 or -1, applied to the scaled driver"},
      {"driver_scaling", "zscore or minmax"},
      {"replicates", "number of masked replicates"},
      {"methods", "comma-separated imputation methods"},
      {"pmm.m", "number of PMM imputations averaged"},
      {"pmm.donors", "PMM donor pool size"},
      {"pmm.cycles", "chained-equation sweeps per imputation"},
      {"pmm.ridge", "ridge factor on the PMM normal equations"},
      {"forest.trees", "trees per missForest forest"},
      {"forest.mtry", "predictors tried per split (0 = ceil(p/3))"},
      {"forest.min_node", "nodes with at most this many rows become leaves"},
      {"forest.max_depth", "tree depth cap (0 = none)"},
      {"forest.max_rounds", "missForest sweep cap"},
      {"ppca.k", "PPCA components or 'auto'"},
      {"ppca.max_iter", "PPCA EM iteration cap"},
      {"ppca.tol", "PPCA relative log-likelihood tolerance"},
      {"nipals.k", "NIPALS imputation components or 'auto'"},
      {"nipals.tol", "NIPALS score-change tolerance"},
      {"nipals.max_iter", "NIPALS iteration cap per component"},
      {"k_max", "largest component count tried by 'auto'"},
      {"k_folds", "cross-validation folds for 'auto'"},
      {"class_as_predictor", "let multivariate imputers read the class column"},
      {"reference_method", "method whose per-feature R^2 is related to PC1"},
      {"calibration", "slope,intercept of the |PC1| -> R^2 line used for prediction"},
      {"seed", "master seed"},
      {"output", "output directory"},
      {"threads", "worker threads (0 = hardware)"},
  };
}

void apply_setting(PipelineConfig& c, const std::string& key, const std::string& v) {
  if (key == "input") c.input_csv = v;
  else if (key == "schema") c.schema_file = v;
  else if (key == "synth_spec") c.synth_spec = v;
  else if (key == "rows") c.synth_rows = to_count(key, v);
  else if (key == "synth_seed") c.synth_seed = to_count(key, v);
  else if (key == "class") c.class_column = v;
  else if (key == "driver") c.driver_column = v;
  else if (key == "select_k") c.select_k = to_count(key, v);
  else if (key == "bins") c.bins = to_count(key, v);
  else if (key == "base_rate") c.missingness.base_rate = to_real(key, v);
  else if (key == "slope") c.missingness.slope = to_real(key, v);
  else if (key == "sign") {
    const auto s = to_real(key, v);
    if (s != 1.0 && s != -1.0) throw SchemaError("config key 'sign': expected +1 or -1");
    c.missingness.sign = static_cast<int>(s);
  } else if (key == "driver_scaling") {
    if (v == "zscore") c.missingness.scaling = DriverScaling::zscore;
    else if (v == "minmax") c.missingness.scaling = DriverScaling::minmax;
    else throw SchemaError("config key 'driver_scaling': expected zscore or minmax");
  } else if (key == "replicates") c.replicates = to_count(key, v);
  else if (key == "methods") {
    c.methods.clear();
    for (auto& m : split(v, ',')) {
      if (m.empty()) continue;
      if (std::find(kKnownMethods.begin(), kKnownMethods.end(), m) == kKnownMethods.end()) {
        throw SchemaError("unknown imputation method '" + m + "'");
      }
      if (std::find(c.methods.begin(), c.methods.end(), m) == c.methods.end()) c.methods.push_back(m);
    }
  } else if (key == "pmm.m") c.pmm.m = to_count(key, v);
  else if (key == "pmm.donors") c.pmm.donors = to_count(key, v);
  else if (key == "pmm.cycles") c.pmm.cycles = to_count(key, v);
  else if (key == "pmm.ridge") c.pmm.ridge = to_real(key, v);
  else if (key == "forest.trees") c.forest.n_trees = to_count(key, v);
  else if (key == "forest.mtry") c.forest.mtry = to_count(key, v);
  else if (key == "forest.min_node") c.forest.min_node = to_count(key, v);
  else if (key == "forest.max_depth") c.forest.max_depth = to_count(key, v);
  else if (key == "forest.max_rounds") c.forest.max_rounds = to_count(key, v);
  else if (key == "ppca.k") set_k(key, v, c.ppca.k, c.ppca_auto_k);
  else if (key == "ppca.max_iter") c.ppca.max_iter = static_cast<int>(to_count(key, v));
  else if (key == "ppca.tol") c.ppca.tol = to_real(key, v);
  else if (key == "nipals.k") set_k(key, v, c.nipals.k, c.nipals_auto_k);
  else if (key == "nipals.tol") c.nipals.tol = to_real(key, v);
  else if (key == "nipals.max_iter") c.nipals.max_iter = static_cast<int>(to_count(key, v));
  else if (key == "k_max") c.k_max = to_count(key, v);
  else if (key == "k_folds") c.k_folds = to_count(key, v);
  else if (key == "class_as_predictor") c.class_as_predictor = to_bool(key, v);
  else if (key == "reference_method") c.reference_method = v;
  else if (key == "calibration") {
    const auto parts = split(v, ',');
    if (parts.size() != 2) throw SchemaError("config key 'calibration': expected slope,intercept");
    c.calibration = {to_real(key, parts[0]), to_real(key, parts[1])};
  } else if (key == "seed") c.seed = to_count(key, v);
  else if (key == "output") c.output_dir = v;
  else if (key == "threads") c.threads = to_count(key, v);
  else throw SchemaError("unknown config key '" + key + "'");
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open config '" + path.string() + "'");
  PipelineConfig c;
  for (const auto& [k, v] : read_kv(f)) apply_setting(c, k, v);
  return c;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::vector<std::exception_ptr> errors(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

struct Cell {
  std::size_t replicate = 0;
  std::string method;
};

DataMatrix load_base(const PipelineConfig& cfg) {
  if (!cfg.input_csv.empty()) {
    const Schema schema = cfg.schema_file.empty() ? Schema{} : load_schema(cfg.schema_file);
    return load_csv(cfg.input_csv, schema);
  }
  LatentSpec spec = cfg.synth_spec.empty() ? default_clinic_analog() : load_latent_spec(cfg.synth_spec);
  if (cfg.synth_rows) spec.rows = *cfg.synth_rows;
  if (cfg.synth_seed) spec.seed = *cfg.synth_seed;
  return generate(spec);
}

ImputationResult run_method(const std::string& method, const DataMatrix& masked, const PipelineConfig& cfg,
                            std::size_t k, std::uint64_t seed) {
  const PredictorOptions preds{cfg.class_as_predictor};
  if (method == "mean") return impute_mean(masked);
  if (method == "median") return impute_median(masked);
  if (method == "pmm") {
    auto c = cfg.pmm;
    c.predictors = preds;
    return impute_pmm(masked, c, seed);
  }
  if (method == "missforest") {
    auto c = cfg.forest;
    c.predictors = preds;
    return impute_missforest(masked, c, seed);
  }
  if (method == "ppca") {
    auto c = cfg.ppca;
    c.predictors = preds;
    if (cfg.ppca_auto_k) c.k = k;
    return impute_ppca(masked, c, seed);
  }
  if (method == "nipals") {
    auto c = cfg.nipals;
    c.predictors = preds;
    c.require_convergence = false;
    if (cfg.nipals_auto_k) c.k = k;
    auto r = impute_nipals(masked, c);
    r.seed = seed;
    return r;
  }
  throw SchemaError("unknown imputation method '" + method + "'");
}

}  // namespace

PipelineOutcome run_pipeline(const PipelineConfig& cfg) {
  if (!cfg.seed) throw PipelineError("config", std::nullopt, "", "a master seed is required");
  if (cfg.replicates < 1) throw PipelineError("config", std::nullopt, "", "replicates must be at least 1");
  if (cfg.methods.empty()) throw PipelineError("config", std::nullopt, "", "no imputation methods selected");
  const std::uint64_t master = *cfg.seed;
  const auto& out = cfg.output_dir;
  std::filesystem::create_directories(out);

  auto stage = [](const char* name, auto&& body, std::optional<std::size_t> rep = std::nullopt,
                  const std::string& method = {}) {
    try {
      return body();
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError(name, rep, method, e.what());
    }
  };

  // Base data.
  const DataMatrix base = stage("load", [&] { return load_base(cfg); });
  stage("load", [&] {
    base.index_of(cfg.class_column);
    base.index_of(cfg.driver_column);
    if (!base.complete()) throw ContractError("the base dataset must be complete");
    save_csv(out / "data.csv", base);
    save_schema(out / "schema.txt", base);
    return 0;
  });

  // Feature selection.
  std::vector<IgScore> ranking;
  std::vector<std::string> selected;
  stage("select", [&] {
    const auto scores = score_features(base, cfg.class_column, cfg.bins);
    const auto k = cfg.select_k == 0 ? scores.size() : cfg.select_k;
    ranking = top_k(scores, scores.size());
    save_feature_ranking(out / "features.csv", ranking);
    for (const auto& s : top_k(scores, k)) selected.push_back(s.feature);
    return 0;
  });

  // Analysis columns: every non-driver column except unselected features, in input order.
  std::vector<std::string> analysis_cols;
  for (const auto& c : base.columns()) {
    if (c.role == Role::driver) continue;
    if (c.role == Role::feature && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
    analysis_cols.push_back(c.name);
  }
  auto with_driver = analysis_cols;
  with_driver.push_back(cfg.driver_column);
  const DataMatrix study = base.select(with_driver);
  const DataMatrix truth = base.select(analysis_cols);

  PipelineOutcome outcome;
  outcome.complete_pca = stage("pca", [&] { return pca_correlation(truth); });
  stage("pca", [&] {
    save_pca(out / "pca_complete", outcome.complete_pca);
    return 0;
  });

  // Missingness.
  std::vector<InjectionOutcome> injected;
  stage("inject", [&] {
    MissingnessSpec spec = cfg.missingness;
    spec.driver = cfg.driver_column;
    spec.targets = selected;
    spec.seed = derive_seed(master, "inject");
    injected = replicate(study, spec, cfg.replicates);
    save_csv(out / "truth.csv", truth);
    return 0;
  });
  std::vector<DataMatrix> masked(cfg.replicates);
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    masked[r] = injected[r].data.select(analysis_cols);
    outcome.realized_rates.push_back(injected[r].realized_rate);
    stage("inject", [&] {
      const auto dir = out / "replicates" / rep_dir_name(r);
      save_csv(dir / "masked.csv", masked[r]);
      save_mask_csv(dir / "mask.csv", masked[r]);
      return 0;
    }, r);
  }

  // Component counts and NIPALS loadings per replicate.
  std::vector<std::size_t> ks(cfg.replicates, 0);
  std::vector<PcaModel> nipals_pc(cfg.replicates);
  const bool need_k = (cfg.ppca_auto_k && std::count(cfg.methods.begin(), cfg.methods.end(), "ppca")) ||
                      (cfg.nipals_auto_k && std::count(cfg.methods.begin(), cfg.methods.end(), "nipals"));
  NipalsConfig ncfg;
  ncfg.tol = cfg.nipals.tol;
  ncfg.max_iter = cfg.nipals.max_iter;
  ncfg.require_convergence = false;
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
    stage("components", [&] {
      if (need_k) {
        const auto kmax = std::min(cfg.k_max, masked[r].cols() - 1);
        ks[r] = estimate_k(masked[r], kmax, cfg.k_folds, derive_seed(master, "estimate_k", r), ncfg);
      }
      auto one = ncfg;
      one.k = 1;
      nipals_pc[r] = nipals(standardize(masked[r]), one);
      save_pca(out / "replicates" / rep_dir_name(r) / "nipals_pc1", nipals_pc[r], false);
      return 0;
    }, r);
  });

  // Imputation x evaluation cells.
  std::vector<Cell> cells;
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    for (const auto& m : cfg.methods) cells.push_back({r, m});
  }
  std::vector<R2Report> reports(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    const auto& cell = cells[c];
    const auto seed = derive_seed(master, "impute", cell.replicate, cell.method);
    const auto result = stage("impute", [&] { return run_method(cell.method, masked[cell.replicate], cfg, ks[cell.replicate], seed); },
                              cell.replicate, cell.method);
    stage("evaluate", [&] {
      const auto dir = out / "replicates" / rep_dir_name(cell.replicate) / cell.method;
      save_csv(dir / "completed.csv", result.completed);
      write_text(dir / "diagnostics.json", diagnostics_json(result));
      reports[c] = score_imputation(result.completed, truth, masked[cell.replicate], cell.method, cell.replicate);
      return 0;
    }, cell.replicate, cell.method);
  });
  outcome.reports = reports;
  stage("evaluate", [&] {
    save_r2_csv(out / "r2.csv", reports);
    return 0;
  });
  const auto agg = aggregate(reports);
  stage("evaluate", [&] {
    write_text(out / "aggregate.json", aggregate_json(agg));
    return 0;
  });

  // Complete-data imputability fits on mean per-feature R^2.
  for (const auto& method : cfg.methods) {
    if (method == "mean" || method == "median") continue;
    const auto& fm = agg.methods.at(method).feature_mean;
    std::vector<std::pair<std::string, double>> pts;
    for (const auto& f : selected) {
      if (auto it = fm.find(f); it != fm.end()) pts.emplace_back(f, it->second);
    }
    if (pts.size() < 3) continue;
    auto rep = stage("fit", [&] { return fit_imputability(pts, outcome.complete_pca, LoadingSource::complete_pca); },
                     std::nullopt, method);
    outcome.complete_fits.emplace_back(method, std::move(rep));
  }

  // No-ground-truth prediction and its validation against the reference method.
  const bool have_ref = std::count(cfg.methods.begin(), cfg.methods.end(), cfg.reference_method) > 0;
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    const auto pred = stage("predict", [&] { return predict_imputability(nipals_pc[r], cfg.calibration); }, r);
    stage("predict", [&] {
      write_text(out / "replicates" / rep_dir_name(r) / "prediction.json", imputability_json(pred));
      return 0;
    }, r);
    if (!have_ref) continue;
    const auto it = std::find_if(reports.begin(), reports.end(), [&](const auto& rep) {
      return rep.replicate == r && rep.method == cfg.reference_method;
    });
    auto check = stage("validate", [&] { return validate_prediction(pred, it->per_feature); }, r, cfg.reference_method);
    stage("validate", [&] {
      write_text(out / "replicates" / rep_dir_name(r) / "validation.json", prediction_check_json(check));
      return 0;
    }, r);
    outcome.validations.push_back(std::move(check));
  }

  // Summary.
  json s;
  s["schema_version"] = kSummarySchemaVersion;
  s["seed"] = master;
  s["replicates"] = cfg.replicates;
  s["methods"] = cfg.methods;
  s["reference_method"] = cfg.reference_method;
  s["features"] = selected;
  s["feature_selection"] = json::array();
  for (const auto& g : ranking) s["feature_selection"].push_back({{"feature", g.feature}, {"gain", g.gain}});
  {
    json pc1 = json::object();
    for (std::size_t j = 0; j < outcome.complete_pca.feature_names.size(); ++j) {
      pc1[outcome.complete_pca.feature_names[j]] = outcome.complete_pca.loadings(static_cast<Eigen::Index>(j), 0);
    }
    std::vector<double> expl(outcome.complete_pca.explained.data(),
                             outcome.complete_pca.explained.data() + outcome.complete_pca.explained.size());
    s["complete_pca"] = {{"pc1", pc1}, {"explained", expl}};
  }
  s["missingness"] = {{"realized_rate", outcome.realized_rates},
                      {"base_rate", cfg.missingness.base_rate},
                      {"slope", cfg.missingness.slope},
                      {"sign", cfg.missingness.sign}};
  if (need_k) s["components"] = ks;
  {
    json a = json::object();
    for (const auto& [method, ms] : agg.methods) {
      a[method] = {{"mean", ms.mean}, {"min", ms.min}, {"max", ms.max}, {"per_feature", ms.feature_mean}};
    }
    s["aggregate"] = a;
  }
  {
    // Best / worst features by the reference method (or the first scored method).
    const auto& key_method = agg.methods.count(cfg.reference_method) ? cfg.reference_method : cfg.methods.front();
    const auto& fm = agg.methods.at(key_method).feature_mean;
    json fig = json::object();
    if (!fm.empty()) {
      std::string best = fm.begin()->first, worst = best;
      for (const auto& f : selected) {
        if (!fm.count(f)) continue;
        if (fm.at(f) > fm.at(best)) best = f;
        if (fm.at(f) < fm.at(worst)) worst = f;
      }
      fig["best_feature"] = best;
      fig["worst_feature"] = worst;
      fig["rows"] = json::array();
      for (const auto& method : cfg.methods) {
        const auto& ms = agg.methods.at(method);
        auto get = [&](const std::string& f) { return ms.feature_mean.count(f) ? json(ms.feature_mean.at(f)) : json(nullptr); };
        fig["rows"].push_back({{"method", method}, {"overall", ms.mean}, {"best_feature", get(best)}, {"worst_feature", get(worst)}});
      }
    }
    s["figure1"] = fig;
  }
  s["complete_fits"] = json::object();
  for (const auto& [method, rep] : outcome.complete_fits) {
    s["complete_fits"][method] = {{"fit", fit_json(*rep.fit)}, {"points", points_json(rep)}};
  }
  s["nipals_validation"] = json::array();
  for (std::size_t r = 0; r < outcome.validations.size(); ++r) {
    const auto& v = outcome.validations[r];
    s["nipals_validation"].push_back({{"replicate", r},
                                      {"fit", fit_json(v.fit)},
                                      {"spearman", v.spearman},
                                      {"calibration", {{"slope", cfg.calibration.slope}, {"intercept", cfg.calibration.intercept}}},
                                      {"points", points_json(v.report)}});
  }
  outcome.summary_json = s.dump(2);
  outcome.summary_path = out / "summary.json";
  stage("summary", [&] {
    write_text(outcome.summary_path, outcome.summary_json);
    emit_plot_data(outcome.summary_path, out / "plots");
    return 0;
  });
  return outcome;
}

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& summary_json,
                                                  const std::filesystem::path& out_dir) {
  std::ifstream in(summary_json);
  if (!in) throw Error("cannot open summary '" + summary_json.string() + "'");
  const json s = json::parse(in);
  if (s.value("schema_version", 0) != kSummarySchemaVersion) throw SchemaError("unsupported summary schema_version");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto num = [](const json& v) { return v.is_null() ? std::string("NA") : format_double(v.get<double>()); };

  {
    const auto path = out_dir / "figure1.csv";
    std::ostringstream f;
    f << "method,group,feature,r2\n";
    const auto& fig = s.at("figure1");
    if (fig.contains("rows")) {
      const auto best = fig.at("best_feature").get<std::string>();
      const auto worst = fig.at("worst_feature").get<std::string>();
      for (const auto& row : fig.at("rows")) {
        const auto m = row.at("method").get<std::string>();
        f << m << ",overall,ALL," << num(row.at("overall")) << '\n';
        f << m << ",best_feature," << best << ',' << num(row.at("best_feature")) << '\n';
        f << m << ",worst_feature," << worst << ',' << num(row.at("worst_feature")) << '\n';
      }
    }
    write_text(path, f.str());
    written.push_back(path);
  }

  auto scatter = [&](const std::string& stem, const json& fit, const json& points) {
    std::ostringstream f;
    f << "feature,abs_pc1,r2,residual\n";
    for (const auto& p : points) {
      f << p.at("feature").get<std::string>() << ',' << num(p.at("abs_pc1")) << ','
        << (p.contains("r2") ? num(p.at("r2")) : "NA") << ',' << (p.contains("residual") ? num(p.at("residual")) : "NA")
        << '\n';
    }
    std::ostringstream l;
    l << "slope,intercept,fit_r2,p_value,n_points\n"
      << num(fit.at("slope")) << ',' << num(fit.at("intercept")) << ',' << num(fit.at("fit_r2")) << ','
      << num(fit.at("p_value")) << ',' << fit.at("n_points").get<std::size_t>() << '\n';
    write_text(out_dir / (stem + ".csv"), f.str());
    write_text(out_dir / (stem + "_line.csv"), l.str());
    written.push_back(out_dir / (stem + ".csv"));
    written.push_back(out_dir / (stem + "_line.csv"));
  };
  for (const auto& [method, v] : s.at("complete_fits").items()) scatter("figure2_" + method, v.at("fit"), v.at("points"));
  for (const auto& v : s.at("nipals_validation")) {
    const auto r = v.at("replicate").get<std::size_t>();
    scatter("figure3_" + rep_dir_name(r), v.at("fit"), v.at("points"));
  }
  return written;
}

}  // namespace featimp
