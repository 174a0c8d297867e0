#include "featimp/csv_io.hpp"
#include "featimp/error.hpp"
#include "featimp/evaluation.hpp"
#include "featimp/feature_select.hpp"
#include "featimp/imputability.hpp"
#include "featimp/imputers.hpp"
#include "featimp/kv_config.hpp"
#include "featimp/missingness.hpp"
#include "featimp/pca.hpp"
#include "featimp/pipeline.hpp"
#include "featimp/random.hpp"
#include "featimp/report_io.hpp"
#include "featimp/stats.hpp"
#include "featimp/synth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace featimp;

namespace {

struct DataArgs {
  std::string data;
  std::string schema;

  void add(CLI::App* app, const std::string& help = "input CSV (NA or empty = missing)") {
    app->add_option("--data", data, help)->required()->check(CLI::ExistingFile);
    app->add_option("--schema", schema, "schema file, one `name = role` per line")->check(CLI::ExistingFile);
  }

  DataMatrix load() const { return load_csv(data, schema.empty() ? Schema{} : load_schema(schema)); }
};

Calibration parse_calibration(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw SchemaError("calibration must be slope,intercept");
  return {std::stod(parts[0]), std::stod(parts[1])};
}

std::string rep_name(std::size_t r) {
  return std::string("rep_") + (r < 10 ? "0" : "") + std::to_string(r);
}

void print_error(const std::string& stage, const std::string& message) {
  nlohmann::json j{{"status", "error"}, {"stage", stage}, {"message", message}, {"replicate", nullptr},
                   {"method", nullptr}};
  std::cerr << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"featimp: missing-data benchmarks and feature imputability from PCA loadings"};
  app.require_subcommand(1);
  std::string stage = "cli";

  // synth
  auto* synth = app.add_subcommand("synth", "generate a complete dataset from a latent-factor spec");
  std::string synth_spec, synth_out;
  std::optional<std::size_t> synth_rows;
  std::optional<std::uint64_t> synth_seed;
  bool synth_dump = false;
  synth->add_option("--spec", synth_spec, "latent spec file (default: built-in clinic analog)")->check(CLI::ExistingFile);
  synth->add_option("--rows", synth_rows, "row count override");
  synth->add_option("--seed", synth_seed, "seed override");
  synth->add_option("--out", synth_out, "output directory (data.csv, schema.txt, spec.txt)")->required();
  synth->add_flag("--print-spec", synth_dump, "also print the resolved spec");

  // select-features
  auto* select = app.add_subcommand("select-features", "rank features by information gain against the class");
  DataArgs select_in;
  select_in.add(select);
  std::string select_class = "CDRSB", select_out;
  std::size_t select_k = 0, select_bins = 5;
  select->add_option("--class", select_class, "class column")->capture_default_str();
  select->add_option("--k", select_k, "keep the top k (0 = all)")->capture_default_str();
  select->add_option("--bins", select_bins, "equal-frequency bins")->capture_default_str();
  select->add_option("--out", select_out, "ranked CSV (feature,gain)")->required();

  // inject
  auto* inj = app.add_subcommand("inject", "mask feature cells with driver-dependent probability");
  DataArgs inj_in;
  inj_in.add(inj, "complete input CSV");
  MissingnessSpec inj_spec;
  std::string inj_scaling = "zscore", inj_targets, inj_out;
  std::size_t inj_reps = 10;
  std::uint64_t inj_seed = 0;
  inj->add_option("--driver", inj_spec.driver, "driver column")->required();
  inj->add_option("--base", inj_spec.base_rate, "base probability")->capture_default_str();
  inj->add_option("--slope", inj_spec.slope, "probability change per scaled driver unit")->capture_default_str();
  inj->add_option("--sign", inj_spec.sign, "+1 or -1")->check(CLI::IsMember({-1, 1}))->capture_default_str();
  inj->add_option("--scaling", inj_scaling, "zscore or minmax")->check(CLI::IsMember({"zscore", "minmax"}))->capture_default_str();
  inj->add_option("--targets", inj_targets, "comma-separated target columns (default: all features)");
  inj->add_option("--replicates", inj_reps, "replicate count")->capture_default_str();
  inj->add_option("--seed", inj_seed, "seed; replicate i uses seed + i")->required();
  inj->add_option("--out", inj_out, "output directory")->required();

  // impute
  auto* imp = app.add_subcommand("impute", "fill masked feature cells");
  DataArgs imp_in;
  imp_in.add(imp, "masked CSV");
  std::string imp_method, imp_out, imp_k = "3";
  std::uint64_t imp_seed = 0;
  PmmConfig pmm;
  ForestConfig forest;
  PpcaConfig ppca;
  NipalsImputeConfig nip;
  bool no_class = false, imp_strict = false;
  imp->add_option("--method", imp_method, "mean|median|pmm|missforest|ppca|nipals")
      ->required()
      ->check(CLI::IsMember({"mean", "median", "pmm", "missforest", "ppca", "nipals"}));
  imp->add_option("--seed", imp_seed, "seed")->required();
  imp->add_option("--out", imp_out, "output directory (completed.csv, diagnostics.json)")->required();
  imp->add_option("--pmm-m", pmm.m, "PMM imputations averaged")->capture_default_str();
  imp->add_option("--donors", pmm.donors, "PMM donor pool")->capture_default_str();
  imp->add_option("--cycles", pmm.cycles, "PMM sweeps")->capture_default_str();
  imp->add_option("--ridge", pmm.ridge, "PMM ridge factor")->capture_default_str();
  imp->add_option("--trees", forest.n_trees, "missForest trees")->capture_default_str();
  imp->add_option("--mtry", forest.mtry, "predictors per split (0 = ceil(p/3))")->capture_default_str();
  imp->add_option("--min-node", forest.min_node, "nodes with at most this many rows become leaves")->capture_default_str();
  imp->add_option("--max-depth", forest.max_depth, "depth cap (0 = none)")->capture_default_str();
  imp->add_option("--max-rounds", forest.max_rounds, "missForest sweep cap")->capture_default_str();
  imp->add_option("--k", imp_k, "components for ppca/nipals, or auto")->capture_default_str();
  imp->add_option("--max-iter", ppca.max_iter, "PPCA EM iteration cap")->capture_default_str();
  imp->add_option("--tol", ppca.tol, "PPCA relative log-likelihood tolerance")->capture_default_str();
  imp->add_flag("--no-class", no_class, "do not use the class column as a predictor");
  imp->add_flag("--strict", imp_strict, "fail if a NIPALS component does not converge");

  // pca
  auto* pca = app.add_subcommand("pca", "principal components of a dataset");
  DataArgs pca_in;
  pca_in.add(pca);
  std::string pca_method = "eigen", pca_k = "0", pca_out;
  std::size_t pca_kmax = 5, pca_folds = 5;
  std::uint64_t pca_seed = 1;
  bool pca_all_roles = false;
  pca->add_option("--method", pca_method, "eigen (complete data) or nipals")
      ->check(CLI::IsMember({"eigen", "nipals"}))
      ->capture_default_str();
  pca->add_option("--k", pca_k, "components (0 = all) or auto")->capture_default_str();
  pca->add_option("--k-max", pca_kmax, "largest k tried by auto")->capture_default_str();
  pca->add_option("--folds", pca_folds, "cross-validation folds for auto")->capture_default_str();
  pca->add_option("--seed", pca_seed, "fold seed for auto")->capture_default_str();
  pca->add_flag("--with-driver", pca_all_roles, "keep the driver column");
  pca->add_option("--out", pca_out, "output directory (loadings.csv, scores.csv, explained.csv)")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "imputation R^2 against ground truth");
  std::string ev_truth, ev_masked, ev_imputed, ev_schema, ev_method = "unknown", ev_out;
  std::size_t ev_rep = 0;
  bool ev_append = false;
  eval->add_option("--truth", ev_truth, "complete CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--masked", ev_masked, "masked CSV (defines the scored cells)")->required()->check(CLI::ExistingFile);
  eval->add_option("--imputed", ev_imputed, "completed CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--schema", ev_schema, "schema file")->check(CLI::ExistingFile);
  eval->add_option("--method", ev_method, "method label")->capture_default_str();
  eval->add_option("--replicate", ev_rep, "replicate label")->capture_default_str();
  eval->add_option("--out", ev_out, "R^2 CSV (method,replicate,feature,r2)")->required();
  eval->add_flag("--append", ev_append, "merge into an existing R^2 CSV");

  // predict
  auto* pred = app.add_subcommand("predict", "rank features by |PC1| and predict imputation R^2");
  std::string pr_loadings, pr_cal = "1.9,0.19", pr_out;
  pred->add_option("--loadings", pr_loadings, "loadings.csv from `pca`")->required()->check(CLI::ExistingFile);
  pred->add_option("--calibration", pr_cal, "slope,intercept of the |PC1| -> R^2 line")->capture_default_str();
  pred->add_option("--out", pr_out, "prediction JSON")->required();

  // validate
  auto* val = app.add_subcommand("validate", "regress observed R^2 on |PC1| and compare ranks");
  std::string va_loadings, va_r2, va_method = "missforest", va_cal = "1.9,0.19", va_out, va_source = "nipals";
  std::optional<std::size_t> va_rep;
  val->add_option("--loadings", va_loadings, "loadings.csv from `pca`")->required()->check(CLI::ExistingFile);
  val->add_option("--r2", va_r2, "R^2 CSV from `evaluate` or `pipeline`")->required()->check(CLI::ExistingFile);
  val->add_option("--method", va_method, "method whose R^2 is used")->capture_default_str();
  val->add_option("--replicate", va_rep, "replicate (default: mean over replicates)");
  val->add_option("--source", va_source, "complete or nipals")->check(CLI::IsMember({"complete", "nipals"}))->capture_default_str();
  val->add_option("--calibration", va_cal, "slope,intercept for predicted R^2")->capture_default_str();
  val->add_option("--out", va_out, "validation JSON (and scatter/line CSVs next to it)")->required();

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "run select, inject, impute, evaluate, fit, predict and validate");
  std::string pipe_config;
  std::uint64_t pipe_seed = 0;
  pipe->add_option("--config", pipe_config, "key = value config file")->check(CLI::ExistingFile);
  pipe->add_option("--seed", pipe_seed, "master seed")->required();
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& [key, help] : config_keys()) {
    if (key == "seed") continue;
    pipe->add_option_function<std::string>(
        "--" + key, [key = key, &overrides](const std::string& v) { overrides.emplace_back(key, v); }, help);
  }

  // plot-data
  auto* plot = app.add_subcommand("plot-data", "write figure tables from a pipeline summary");
  std::string plot_summary, plot_out;
  plot->add_option("--summary", plot_summary, "summary.json")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      stage = "synth";
      LatentSpec spec = synth_spec.empty() ? default_clinic_analog() : load_latent_spec(synth_spec);
      if (synth_rows) spec.rows = *synth_rows;
      if (synth_seed) spec.seed = *synth_seed;
      const auto data = generate(spec);
      const fs::path out = synth_out;
      save_csv(out / "data.csv", data);
      save_schema(out / "schema.txt", data);
      std::ostringstream s;
      write_latent_spec(s, spec);
      write_text(out / "spec.txt", s.str());
      if (synth_dump) std::cout << s.str();
    } else if (*select) {
      stage = "select";
      const auto data = select_in.load();
      const auto scores = score_features(data, select_class, select_bins);
      save_feature_ranking(select_out, top_k(scores, select_k == 0 ? scores.size() : select_k));
    } else if (*inj) {
      stage = "inject";
      const auto data = inj_in.load();
      inj_spec.scaling = inj_scaling == "minmax" ? DriverScaling::minmax : DriverScaling::zscore;
      for (auto& t : split(inj_targets, ',')) {
        if (!t.empty()) inj_spec.targets.push_back(t);
      }
      inj_spec.seed = inj_seed;
      const auto reps = replicate(data, inj_spec, inj_reps);
      const fs::path out = inj_out;
      save_csv(out / "truth.csv", data);
      save_schema(out / "schema.txt", data);
      nlohmann::json rates = nlohmann::json::array();
      for (std::size_t r = 0; r < reps.size(); ++r) {
        save_csv(out / rep_name(r) / "masked.csv", reps[r].data);
        save_mask_csv(out / rep_name(r) / "mask.csv", reps[r].data);
        rates.push_back({{"replicate", r}, {"seed", reps[r].seed}, {"realized_rate", reps[r].realized_rate}});
      }
      write_text(out / "injection.json", rates.dump(2));
    } else if (*imp) {
      stage = "impute";
      const auto data = imp_in.load();
      const PredictorOptions preds{!no_class};
      std::size_t k = 0;
      if (imp_method == "ppca" || imp_method == "nipals") {
        if (imp_k == "auto") {
          NipalsConfig ncfg;
          ncfg.require_convergence = imp_strict;
          k = estimate_k(data.without_roles({Role::driver}), std::min<std::size_t>(5, data.cols() - 1), 5,
                         derive_seed(imp_seed, "estimate_k"), ncfg);
        } else {
          k = std::stoul(imp_k);
        }
      }
      ImputationResult result;
      if (imp_method == "mean") {
        result = impute_mean(data);
      } else if (imp_method == "median") {
        result = impute_median(data);
      } else if (imp_method == "pmm") {
        pmm.predictors = preds;
        result = impute_pmm(data, pmm, imp_seed);
      } else if (imp_method == "missforest") {
        forest.predictors = preds;
        result = impute_missforest(data, forest, imp_seed);
      } else if (imp_method == "ppca") {
        ppca.k = k;
        ppca.predictors = preds;
        result = impute_ppca(data, ppca, imp_seed);
      } else {
        nip.k = k;
        nip.predictors = preds;
        nip.require_convergence = imp_strict;
        result = impute_nipals(data, nip);
        result.seed = imp_seed;
      }
      const fs::path out = imp_out;
      save_csv(out / "completed.csv", result.completed);
      write_text(out / "diagnostics.json", diagnostics_json(result));
    } else if (*pca) {
      stage = "pca";
      auto data = pca_in.load();
      if (!pca_all_roles) data = data.without_roles({Role::driver});
      PcaModel model;
      std::size_t k = 0;
      if (pca_k == "auto") {
        NipalsConfig ncfg;
        ncfg.require_convergence = false;
        k = estimate_k(data, std::min(pca_kmax, data.cols()), pca_folds, pca_seed, ncfg);
      } else {
        k = std::stoul(pca_k);
      }
      if (pca_method == "eigen") {
        model = pca_correlation(data, k);
      } else {
        NipalsConfig ncfg;
        ncfg.k = k;
        model = nipals(standardize(data), ncfg);
      }
      save_pca(pca_out, model);
    } else if (*eval) {
      stage = "evaluate";
      const Schema schema = ev_schema.empty() ? Schema{} : load_schema(ev_schema);
      const auto truth = load_csv(ev_truth, schema);
      const auto masked = load_csv(ev_masked, schema);
      const auto imputed = load_csv(ev_imputed, schema);
      std::vector<R2Report> reports;
      if (ev_append && fs::exists(ev_out)) {
        for (auto& r : load_r2_csv(ev_out)) {
          if (!(r.method == ev_method && r.replicate == ev_rep)) reports.push_back(std::move(r));
        }
      }
      const auto cols = truth.names();
      reports.push_back(score_imputation(imputed.select(cols), truth, masked.select(cols), ev_method, ev_rep));
      save_r2_csv(ev_out, reports);
    } else if (*pred) {
      stage = "predict";
      const auto model = load_loadings_csv(pr_loadings);
      write_text(pr_out, imputability_json(predict_imputability(model, parse_calibration(pr_cal))));
    } else if (*val) {
      stage = "validate";
      const auto model = load_loadings_csv(va_loadings);
      const auto reports = load_r2_csv(va_r2);
      std::vector<std::pair<std::string, double>> observed;
      if (va_rep) {
        for (const auto& r : reports) {
          if (r.method == va_method && r.replicate == *va_rep) observed = r.per_feature;
        }
      } else {
        const auto agg = aggregate(reports);
        if (auto it = agg.methods.find(va_method); it != agg.methods.end()) {
          observed.assign(it->second.feature_mean.begin(), it->second.feature_mean.end());
        }
      }
      if (observed.empty()) throw SchemaError("no R^2 rows for method '" + va_method + "'");
      const auto source = va_source == "complete" ? LoadingSource::complete_pca : LoadingSource::nipals_missing;
      const auto check = validate_prediction(predict_imputability(model, parse_calibration(va_cal), source), observed);
      const fs::path out = va_out;
      write_text(out, prediction_check_json(check));
      const auto stem = out.parent_path() / out.stem();
      save_scatter_csv(stem.string() + "_scatter.csv", check.report);
      save_line_csv(stem.string() + "_line.csv", check.fit);
    } else if (*pipe) {
      stage = "config";
      PipelineConfig cfg = pipe_config.empty() ? PipelineConfig{} : load_pipeline_config(pipe_config);
      for (const auto& [k, v] : overrides) apply_setting(cfg, k, v);
      cfg.seed = pipe_seed;
      const auto outcome = run_pipeline(cfg);
      std::cout << outcome.summary_path.string() << '\n';
    } else if (*plot) {
      stage = "plot-data";
      for (const auto& p : emit_plot_data(plot_summary, plot_out)) std::cout << p.string() << '\n';
    }
  } catch (const PipelineError& e) {
    std::cerr << e.report() << '\n';
    return 1;
  } catch (const std::exception& e) {
    print_error(stage, e.what());
    return 1;
  }
  return 0;
}
