#include "shifterr/metrics.hpp"

#include <cmath>

#include "shifterr/errors.hpp"

namespace shifterr {

namespace {

void check_lengths(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty())
    throw ShapeMismatch("estimate and truth vectors must share a positive length");
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double signed_bias_std(const std::vector<double>& estimates, const std::vector<double>& truths) {
  check_lengths(estimates, truths);
  const double denom = mean(truths);
  if (denom <= 0.0) throw ZeroTruth("mean test error must be positive");
  double s = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) s += estimates[i] - truths[i];
  return s / static_cast<double>(estimates.size()) / denom;
}

double mse_std(const std::vector<double>& estimates, const std::vector<double>& truths) {
  check_lengths(estimates, truths);
  double denom = 0.0;
  for (double t : truths) denom += t * t;
  denom /= static_cast<double>(truths.size());
  if (denom <= 0.0) throw ZeroTruth("mean squared test error must be positive");
  double s = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double d = estimates[i] - truths[i];
    s += d * d;
  }
  return s / static_cast<double>(estimates.size()) / denom;
}

double mad_std(const std::vector<double>& estimates, const std::vector<double>& truths) {
  check_lengths(estimates, truths);
  const double denom = mean(truths);
  if (denom <= 0.0) throw ZeroTruth("mean test error must be positive");
  double s = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) s += std::abs(estimates[i] - truths[i]);
  return s / static_cast<double>(estimates.size()) / denom;
}

double true_test_error(const ParametricModel& model, const Dataset& test, LossKind loss) {
  test.validate();
  if (!test.has_y()) throw ShapeMismatch("realized test error requires outcomes");
  return mean_loss(model, test.X, test.y, loss);
}

}  // namespace shifterr
