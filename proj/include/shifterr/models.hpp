#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <vector>

#include "shifterr/dataset.hpp"

namespace shifterr {

enum class ModelKind { GaussianLinear, BernoulliLogistic };
enum class Algorithm { OLS, LassoCV, RelaxedLasso, LogisticL1 };
enum class LossKind { SquaredError, CountingError };

/// Fitted conditional model of Y given x: either y = x'theta + N(0, sigma2)
/// or P(y=1|x) = 1/(1+exp(-x'theta)).  sigma2 is absent for logistic models.
struct ParametricModel {
  ModelKind kind = ModelKind::GaussianLinear;
  Eigen::VectorXd theta;
  std::optional<double> sigma2;
};

/// Which fitting algorithm to run and its tuning policy.
///
/// lambda_grid semantics: empty means "auto" (100 log-spaced values from
/// lambda_max = max|X'y|/n down to 1e-3 lambda_max); a single value fixes
/// lambda with no cross-validation; several values must be strictly
/// decreasing and are searched by CV.
struct FitSpec {
  Algorithm algorithm = Algorithm::OLS;
  int cv_folds = 10;
  std::vector<double> lambda_grid;
  double tolerance = 1e-7;
  int max_iter = 100000;
};

struct FitResult {
  ParametricModel model;
  Eigen::Index active_count = 0;
  double lambda_selected = 0.0;
  double training_residual_ss = 0.0;
  // Relaxed fit whose selection step chose no variables; model is all-zero.
  bool empty_active_set = false;
};

/// Least squares via column-pivoted QR.  Requires n >= p and full column
/// rank; sets sigma2 = RSS/(n-p), or 0 for an interpolating fit (n = p).
FitResult fit_ols(const Dataset& data);

/// Lasso with lambda selected by K-fold CV over lambda_grid (warm-started
/// coordinate descent along the descending path).  Objective per value:
/// (1/(2n))||y - X theta||^2 + lambda ||theta||_1.
/// sigma2 is the degrees-of-freedom-adjusted residual estimate
/// RSS/(n - s_hat) when s_hat < n, otherwise left unset.
FitResult fit_lasso_cv(const Dataset& data, const FitSpec& spec);

/// Lasso (or L1 logistic) selection followed by an unpenalized refit on the
/// active set; coefficients off the active set stay exactly zero.
FitResult fit_relaxed_lasso(const Dataset& data, const FitSpec& spec);

/// Logistic regression without intercept.  lambda_grid as in fit_lasso_cv;
/// lambda = 0 gives the plain maximum-likelihood fit (Newton with step
/// halving), lambda > 0 the L1 path via proximal Newton, with lambda
/// selected by CV deviance when the grid has several values.
FitResult fit_logistic(const Dataset& data, const FitSpec& spec);

/// Residual variance estimate RSS/(n - s_hat) for a penalized linear fit.
double estimate_sigma2_lasso(const Dataset& data, const FitResult& fit);

/// Dispatches on spec.algorithm.  This is the refit map used inside every
/// bootstrap replicate.
FitResult fit_model(const Dataset& data, const FitSpec& spec);

/// X theta for linear models, componentwise sigmoid(X theta) for logistic.
Eigen::VectorXd predict(const ParametricModel& model, const Eigen::MatrixXd& X);

/// Draws one outcome vector from the fitted conditional law at the rows of
/// X.  Deterministic given the engine state; sigma2 = 0 returns X theta
/// exactly without consuming any randomness.
Eigen::VectorXd sample_outcomes(const ParametricModel& model, const Eigen::MatrixXd& X,
                                std::mt19937_64& gen);

/// Per-row loss of model predictions against y.  Squared error requires a
/// linear model; counting error requires a logistic model (probability
/// thresholded at 0.5, ties to class 1).
Eigen::VectorXd pointwise_loss(const ParametricModel& model, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y, LossKind loss);

double mean_loss(const ParametricModel& model, const Eigen::MatrixXd& X,
                 const Eigen::VectorXd& y, LossKind loss);

/// Throws IncompatibleLoss unless (kind, loss) is a supported pairing.
void check_loss_compat(ModelKind kind, LossKind loss);

}  // namespace shifterr
