#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shifterr/bootstrap.hpp"
#include "shifterr/dataio.hpp"
#include "shifterr/insample.hpp"
#include "shifterr/models.hpp"
#include "shifterr/simgen.hpp"

namespace shifterr {

/// Outer cross-validation baseline settings (distinct from the internal
/// lambda-selection folds inside FitSpec).
struct CvPlanSpec {
  int folds = 10;
  bool grouped = false;
};

/// Real-data source: a labeled CSV plus the protocol used to split it.
struct CsvSource {
  std::string path;
  std::string outcome_column = "y";
  std::string group_column;
  SplitSpec split;
};

/// Fully resolved run description.  Exactly one of `dgp` / `source` is set.
/// All randomness derives from `seed`: replication r uses the substream
/// seed mix(seed, r) for generation, splitting, folds and bootstrap alike,
/// so results are independent of --jobs.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  int reps = 1;
  std::string output = "out";
  LossKind loss = LossKind::SquaredError;
  FitSpec fit;
  std::vector<EstimatorKind> estimators;
  BootstrapConfig bootstrap;
  std::optional<InSampleMethod> insample;  // empty: derived from fit + loss
  CvPlanSpec cv;
  std::optional<DGPSpec> dgp;
  std::optional<CsvSource> source;
};

/// Strict parse: unknown keys are rejected so config typos fail loudly.
ExperimentConfig parse_config(const nlohmann::json& j);

/// Reads a JSON config file.  The SHIFTERR_SEED environment variable, when
/// set, overrides the seed from the file.
ExperimentConfig load_config(const std::string& path);

/// The config with every default filled in, as written to manifests.
nlohmann::json resolved_config_json(const ExperimentConfig& config);

ExperimentConfig validate_config(ExperimentConfig config);

const char* estimator_name(EstimatorKind kind);
const char* scheme_name(SplitScheme scheme);
SplitScheme parse_scheme(const std::string& name);

/// Maps failures to process exit codes: 2 for configuration and data
/// problems, 3 for numerical failures.
int exit_code_for(const std::exception& e);

/// Runs `reps` independent replications and writes results.csv,
/// summary.csv, plot.svg and manifest.json under config.output.
int cmd_simulate(const ExperimentConfig& config, int jobs, std::ostream& err);

/// Fits on the train CSV and estimates test error at the test CSV's
/// covariates (outcome column optional there).  Writes the report JSON to
/// `out`, and to `output_json` when non-empty.
int cmd_estimate(const std::string& train_csv, const std::string& test_csv,
                 const ExperimentConfig& config, const std::string& output_json, std::ostream& out,
                 std::ostream& err);

/// Splits a CSV under the given protocol into out_dir/{train,test}.csv plus
/// a manifest recording scheme, seed and the group assignment.
int cmd_split(const std::string& input_csv, const std::string& outcome_column,
              const std::string& group_column, const SplitSpec& split, const std::string& out_dir,
              std::ostream& err);

}  // namespace shifterr
