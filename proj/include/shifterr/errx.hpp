#pragma once

#include <Eigen/Dense>
#include <vector>

#include "shifterr/bootstrap.hpp"
#include "shifterr/dataset.hpp"
#include "shifterr/insample.hpp"
#include "shifterr/models.hpp"

namespace shifterr {

/// Direct bootstrap estimate of test error at the given test covariates:
/// fit theta_hat, draw B outcome pairs from the fitted model at X and
/// X_test, refit on each, average the replicate test losses.
ErrorEstimate errx_dir(const Dataset& train, const Eigen::MatrixXd& X_test, const FitSpec& spec,
                       LossKind loss, const BootstrapConfig& config);

/// Decomposition estimate: in-sample error estimate plus the bootstrap mean
/// of (test loss - in-sample loss), both losses evaluated with the
/// replicate refit.  The in-sample loss scores the refit on a fresh outcome
/// draw at the training covariates, so the difference term is exactly
/// centered when the test covariates match the training ones.
ErrorEstimate errx_dec(const Dataset& train, const Eigen::MatrixXd& X_test, const FitSpec& spec,
                       LossKind loss, const BootstrapConfig& config,
                       InSampleMethod insample_method);

/// Both estimators from one replicate sweep.  Bit-identical to calling
/// errx_dir and errx_dec separately (same substreams, same refits); used by
/// the simulation runner to avoid refitting every replicate twice.
struct ErrxPair {
  ErrorEstimate dir;
  ErrorEstimate dec;
};
ErrxPair errx_pair(const Dataset& train, const Eigen::MatrixXd& X_test, const FitSpec& spec,
                   LossKind loss, const BootstrapConfig& config, InSampleMethod insample_method);

/// Shrinkage factor ||theta_hat||^2 / mean_b ||theta^(b)||^2 clamped to
/// [1/cap, cap]; 1 when the denominator vanishes.
double multiplicative_factor(const Eigen::VectorXd& theta_hat,
                             const std::vector<Eigen::VectorXd>& bootstrap_thetas, double cap);

/// OLS + squared error target in closed form:
/// sigma2 + (sigma2/n) trace(Sigma_hat^{-1} Sigma_test), Sigma_hat = X'X/n.
double closed_form_ols_errx(double sigma2, const Eigen::MatrixXd& X_train,
                            const Eigen::MatrixXd& Sigma_test);

/// Default in-sample method pairing for the decomposition estimator.
InSampleMethod default_insample_method(Algorithm algorithm, LossKind loss);

}  // namespace shifterr
