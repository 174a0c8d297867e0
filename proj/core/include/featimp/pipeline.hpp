#pragma once

#include "featimp/error.hpp"
#include "featimp/csv_io.hpp"
#include "featimp/evaluation.hpp"
#include "featimp/imputability.hpp"
#include "featimp/imputers.hpp"
#include "featimp/missingness.hpp"
#include "featimp/pca.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace featimp {

inline constexpr int kSummarySchemaVersion = 1;

/// Everything `run_pipeline` needs. Every field has a flat `key = value`
/// spelling (see `apply_setting` / `config_keys`).
struct PipelineConfig {
  // Input: a CSV + schema, or a latent spec file, or (neither) the built-in analog.
  std::filesystem::path input_csv;
  std::filesystem::path schema_file;
  std::filesystem::path synth_spec;
  std::optional<std::size_t> synth_rows;
  std::optional<std::uint64_t> synth_seed;

  std::string class_column = "CDRSB";
  std::string driver_column = "MMSE";
  std::size_t select_k = 0;  // 0 keeps every feature
  std::size_t bins = 5;

  MissingnessSpec missingness;
  std::size_t replicates = 10;
  std::vector<std::string> methods{"mean", "median", "pmm", "missforest", "ppca", "nipals"};

  PmmConfig pmm;
  ForestConfig forest;
  PpcaConfig ppca;
  NipalsImputeConfig nipals;
  bool ppca_auto_k = true;
  bool nipals_auto_k = true;
  std::size_t k_max = 5;
  std::size_t k_folds = 5;
  bool class_as_predictor = true;

  /// Method whose per-feature R^2 is regressed on |PC1| in the validation stage.
  std::string reference_method = "missforest";
  Calibration calibration = reference_calibration();

  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir = "featimp_out";
  std::size_t threads = 0;  // 0 = hardware concurrency
};

/// Sets one config key from its text form; throws SchemaError on unknown keys
/// or unparseable values.
void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value);
/// Every key understood by apply_setting, with a one-line description.
std::vector<std::pair<std::string, std::string>> config_keys();
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// A failure inside run_pipeline, tagged with where it happened.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, std::optional<std::size_t> replicate, std::string method,
                const std::string& what);
  const std::string& stage() const { return stage_; }
  std::optional<std::size_t> replicate() const { return replicate_; }
  const std::string& method() const { return method_; }
  /// Structured error report as JSON text.
  std::string report() const;

 private:
  std::string stage_;
  std::optional<std::size_t> replicate_;
  std::string method_;
};

struct PipelineOutcome {
  std::filesystem::path summary_path;
  std::string summary_json;
  std::vector<R2Report> reports;
  std::vector<PredictionCheck> validations;
  std::vector<std::pair<std::string, ImputabilityReport>> complete_fits;
  PcaModel complete_pca;
  std::vector<double> realized_rates;
};

/// select -> inject x replicates -> impute x methods -> evaluate ->
/// fit / predict / validate. Writes the artifact tree under
/// `cfg.output_dir` and returns the assembled summary. Deterministic in
/// (config, seed) regardless of thread count.
PipelineOutcome run_pipeline(const PipelineConfig& cfg);

/// Figure-style data files from a summary JSON: figure1.csv (method x bar
/// group), figure2_<method>.csv + _line.csv, figure3_rep<NN>.csv + _line.csv.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& summary_json,
                                                  const std::filesystem::path& out_dir);

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers. The first
/// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace featimp
