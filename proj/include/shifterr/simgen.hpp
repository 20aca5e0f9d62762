#pragma once

#include <cstdint>
#include <optional>

#include "shifterr/dataset.hpp"
#include "shifterr/models.hpp"

namespace shifterr {

enum class MisspecKind { None, Quadratic, Power };

/// Transform applied to the leading ceil(fraction * p) coordinates during
/// outcome generation only; the covariates handed to fitters stay raw.
struct Misspec {
  MisspecKind kind = MisspecKind::None;
  double exponent = 1.5;  // Power only
  double fraction = 0.0;
};

struct NormalLaw {
  double mean = 0.0;
  double variance = 1.0;
};

struct DGPSpec {
  Eigen::Index n = 100;
  Eigen::Index n_test = 1000;
  Eigen::Index p = 10;
  int coef_count = 0;
  double coef_strength = 0.0;
  // Alternate the sign of consecutive nonzero coefficients (+, -, +, ...).
  bool alternate_signs = false;
  NormalLaw train_law;
  NormalLaw test_law;
  std::optional<double> sigma;  // noise sd; linear models only
  Misspec misspec;
  std::optional<double> imbalance_ratio;  // logistic training subsample
  std::uint64_t seed = 0;
};

/// One simulated train/test draw.  The test outcomes are kept so realized
/// test error can be evaluated against the estimates.
struct SimInstance {
  Dataset train;
  Dataset test;
  ParametricModel true_model;
  Misspec misspec;
};

SimInstance gen_linear(const DGPSpec& spec);

/// Bernoulli outcomes from the logistic law.  With imbalance_ratio = r the
/// training rows are drawn until the label counts reach floor(r):1
/// (majority class 1); InfeasibleImbalance if the draw pool runs dry.
SimInstance gen_logistic(const DGPSpec& spec);

/// Monte Carlo signal-to-noise ratio Var(g(x)' theta) / sigma^2 under the
/// training law.
double snr(const DGPSpec& spec);

/// The coefficient vector a DGPSpec describes.
Eigen::VectorXd dgp_theta(const DGPSpec& spec);

}  // namespace shifterr
