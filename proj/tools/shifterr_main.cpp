#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "shifterr/experiment.hpp"
#include "shifterr/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Test-error estimation under covariate shift"};
  app.set_version_flag("--version", std::string(shifterr::kVersion));
  app.require_subcommand(1);

  int jobs = 1;
  auto* sim = app.add_subcommand("simulate", "Run simulation replications from a JSON config");
  std::string sim_config;
  sim->add_option("-c,--config", sim_config, "JSON config file")->required();
  sim->add_option("--jobs", jobs, "Worker threads for replications");

  auto* est = app.add_subcommand("estimate", "Estimate test error for a train/test CSV pair");
  std::string train_csv, test_csv, est_config, est_out;
  est->add_option("--train", train_csv, "Training CSV (outcome column required)")->required();
  est->add_option("--test", test_csv, "Test CSV (outcome column optional)")->required();
  est->add_option("-c,--config", est_config, "JSON config file")->required();
  est->add_option("-o,--out", est_out, "Also write the report JSON to this path");

  auto* spl = app.add_subcommand("split", "Split a CSV into train/test parts");
  std::string in_csv, scheme = "random-half", group_col, outcome_col, out_dir = "split_out";
  std::uint64_t seed = 0;
  double fraction = 0.5;
  spl->add_option("--in", in_csv, "Input CSV")->required();
  spl->add_option("--scheme", scheme, "random-half | group-half | two-means");
  spl->add_option("--group-col", group_col, "Group label column");
  spl->add_option("--outcome-col", outcome_col,
                  "Outcome column (excluded from the clustering features)");
  spl->add_option("--seed", seed, "Split seed");
  spl->add_option("--train-fraction", fraction, "Train share of rows or groups");
  spl->add_option("--out-dir", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return shifterr::cmd_simulate(shifterr::load_config(sim_config), jobs, std::cerr);
    if (est->parsed())
      return shifterr::cmd_estimate(train_csv, test_csv, shifterr::load_config(est_config),
                                    est_out, std::cout, std::cerr);
    shifterr::SplitSpec split;
    split.scheme = shifterr::parse_scheme(scheme);
    split.seed = seed;
    split.train_fraction = fraction;
    return shifterr::cmd_split(in_csv, outcome_col, group_col, split, out_dir, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return shifterr::exit_code_for(e);
  }
}
