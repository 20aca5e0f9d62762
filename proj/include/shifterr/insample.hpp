#pragma once

#include <Eigen/Dense>

#include "shifterr/bootstrap.hpp"
#include "shifterr/dataset.hpp"
#include "shifterr/models.hpp"

namespace shifterr {

enum class InSampleMethod { CpOLS, CpLasso, CovPenaltyBootstrap, CountingPenaltyLogistic };

/// Estimate of the error a fresh outcome vector at the training covariates
/// would incur.  Always satisfies value = training_loss + penalty_term.
struct InSampleEstimate {
  double value = 0.0;
  InSampleMethod method = InSampleMethod::CpOLS;
  double penalty_term = 0.0;
};

/// Mallows Cp: (1/n) RSS + 2 p sigma2 / n.
InSampleEstimate cp_ols(const Dataset& data, const FitResult& fit);

/// Cp with the penalty dimension replaced by the number of nonzero
/// coefficients: (1/n) RSS + 2 s_hat sigma2 / n.
InSampleEstimate cp_lasso(const Dataset& data, const FitResult& fit);

/// Bootstrap covariance penalty for squared error: training loss plus
/// (2/n) sum_i cov_B(Y_i^(b), fitted_i^(b)) over B parametric-bootstrap
/// refits.  Replicates that fail to refit are dropped; more than 10%
/// failures raises FailedReplicates.
InSampleEstimate cov_penalty_bootstrap(const Dataset& data, const FitSpec& spec,
                                       const BootstrapConfig& config);

/// Counting-error variant: predictions enter the covariance as the 0/1
/// classified label (the half-shifted slope of the counting loss).
InSampleEstimate counting_penalty_logistic(const Dataset& data, const FitSpec& spec,
                                           const BootstrapConfig& config);

/// (2/n) sum_i cov_i across replicate rows, 1/B normalization.  Centering
/// uses (B*v - sum)/B so that shifting every prediction by a constant with
/// exactly representable increments (e.g. 1/2 on 0/1 labels) leaves the
/// result bit-identical.
double covariance_penalty(const Eigen::MatrixXd& outcomes, const Eigen::MatrixXd& predictions);

/// Dispatch helper used by the decomposition estimator and the CLI.
InSampleEstimate insample_estimate(InSampleMethod method, const Dataset& data,
                                   const FitSpec& spec, const FitResult& base_fit,
                                   const BootstrapConfig& config);

}  // namespace shifterr
