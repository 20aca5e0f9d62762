#pragma once

#include <string>
#include <vector>

#include "shifterr/dataset.hpp"
#include "shifterr/models.hpp"

namespace shifterr {

/// One summary-table row comparing an estimator against realized test error
/// across simulation repetitions.
struct ComparisonRow {
  std::string estimator;
  double signed_bias = 0.0;
  double mse_std = 0.0;
  double mad_std = 0.0;
  int n_reps = 0;
};

/// mean(estimate - truth) / mean(truth).
double signed_bias_std(const std::vector<double>& estimates, const std::vector<double>& truths);

/// mean((estimate - truth)^2) / mean(truth^2).
double mse_std(const std::vector<double>& estimates, const std::vector<double>& truths);

/// mean(|estimate - truth|) / mean(truth).
double mad_std(const std::vector<double>& estimates, const std::vector<double>& truths);

/// Realized mean loss of a fitted model on a labeled test set.
double true_test_error(const ParametricModel& model, const Dataset& test, LossKind loss);

}  // namespace shifterr
