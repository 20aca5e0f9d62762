#include "shifterr/insample.hpp"

#include <cmath>
#include <exception>
#include <string>
#include <vector>

#include "shifterr/errors.hpp"
#include "shifterr/parallel.hpp"
#include "shifterr/rng.hpp"

namespace shifterr {

namespace {

void require_linear_with_sigma(const FitResult& fit) {
  if (fit.model.kind != ModelKind::GaussianLinear || !fit.model.sigma2)
    throw MissingSigma("Cp requires a Gaussian-linear fit with sigma2");
}

void validate_config(const BootstrapConfig& config) {
  if (config.B < 2) throw ConfigError("bootstrap B must be at least 2");
  if (config.cap_c < 1.0) throw ConfigError("cap_c must be at least 1");
}

FitResult generator_fit(const Dataset& data, const FitSpec& spec, const FitResult& base,
                        Correction correction) {
  if (correction == Correction::RelaxedLasso &&
      (spec.algorithm == Algorithm::LassoCV || spec.algorithm == Algorithm::LogisticL1))
    return fit_relaxed_lasso(data, spec);
  return base;
}

/// Draws B outcome vectors from the generator, refits each, and stores the
/// outcome and fitted-value rows.  Failed refits are dropped; more than 10%
/// of them raises FailedReplicates.  `classify` turns fitted values into
/// 0/1 labels for the counting-error penalty.
void bootstrap_rows(const Dataset& data, const FitSpec& spec, const BootstrapConfig& config,
                    const ParametricModel& generator, bool classify, Eigen::MatrixXd& outcomes,
                    Eigen::MatrixXd& preds) {
  const int B = config.B;
  const Eigen::Index n = data.n();
  Eigen::MatrixXd yrows(B, n), frows(B, n);
  std::vector<char> ok(static_cast<std::size_t>(B), 0);

  parallel_for_each(static_cast<std::size_t>(B), config.jobs, [&](std::size_t b) {
    try {
      auto gen = rng::engine(config.seed, rng::kTagBootInsample, b);
      const Eigen::VectorXd yb = sample_outcomes(generator, data.X, gen);
      Dataset rep;
      rep.X = data.X;
      rep.y = yb;
      const FitResult refit = fit_model(rep, spec);
      Eigen::VectorXd fb = predict(refit.model, data.X);
      if (classify)
        for (Eigen::Index i = 0; i < n; ++i) fb(i) = fb(i) >= 0.5 ? 1.0 : 0.0;
      yrows.row(static_cast<Eigen::Index>(b)) = yb;
      frows.row(static_cast<Eigen::Index>(b)) = fb;
      ok[b] = 1;
    } catch (...) {
      ok[b] = 0;
    }
  });

  int kept = 0;
  for (char c : ok) kept += c;
  const int failed = B - kept;
  if (failed * 10 > B)
    throw FailedReplicates(std::to_string(failed) + " of " + std::to_string(B) +
                           " bootstrap refits failed");
  outcomes.resize(kept, n);
  preds.resize(kept, n);
  Eigen::Index row = 0;
  for (int b = 0; b < B; ++b) {
    if (!ok[static_cast<std::size_t>(b)]) continue;
    outcomes.row(row) = yrows.row(b);
    preds.row(row) = frows.row(b);
    ++row;
  }
}

}  // namespace

double covariance_penalty(const Eigen::MatrixXd& outcomes, const Eigen::MatrixXd& predictions) {
  if (outcomes.rows() != predictions.rows() || outcomes.cols() != predictions.cols())
    throw ShapeMismatch("outcome and prediction matrices must agree");
  const Eigen::Index B = outcomes.rows();
  const Eigen::Index n = outcomes.cols();
  if (B < 2) throw ConfigError("covariance penalty needs at least 2 replicates");
  const double Bd = static_cast<double>(B);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double sy = 0.0, sf = 0.0;
    for (Eigen::Index b = 0; b < B; ++b) {
      sy += outcomes(b, i);
      sf += predictions(b, i);
    }
    double cov = 0.0;
    for (Eigen::Index b = 0; b < B; ++b) {
      const double dy = (Bd * outcomes(b, i) - sy) / Bd;
      const double df = (Bd * predictions(b, i) - sf) / Bd;
      cov += dy * df;
    }
    total += cov / Bd;
  }
  return 2.0 * total / static_cast<double>(n);
}

InSampleEstimate cp_ols(const Dataset& data, const FitResult& fit) {
  require_linear_with_sigma(fit);
  const double n = static_cast<double>(data.n());
  InSampleEstimate out;
  out.method = InSampleMethod::CpOLS;
  const double training = mean_loss(fit.model, data.X, data.y, LossKind::SquaredError);
  out.penalty_term = 2.0 * static_cast<double>(data.p()) * *fit.model.sigma2 / n;
  out.value = training + out.penalty_term;
  return out;
}

InSampleEstimate cp_lasso(const Dataset& data, const FitResult& fit) {
  require_linear_with_sigma(fit);
  const double n = static_cast<double>(data.n());
  InSampleEstimate out;
  out.method = InSampleMethod::CpLasso;
  const double training = mean_loss(fit.model, data.X, data.y, LossKind::SquaredError);
  out.penalty_term = 2.0 * static_cast<double>(fit.active_count) * *fit.model.sigma2 / n;
  out.value = training + out.penalty_term;
  return out;
}

InSampleEstimate cov_penalty_bootstrap(const Dataset& data, const FitSpec& spec,
                                       const BootstrapConfig& config) {
  validate_config(config);
  const FitResult base = fit_model(data, spec);
  if (base.model.kind != ModelKind::GaussianLinear)
    throw IncompatibleLoss("covariance penalty for squared error needs a linear fit");
  const FitResult gen = generator_fit(data, spec, base, config.correction);

  Eigen::MatrixXd outcomes, preds;
  bootstrap_rows(data, spec, config, gen.model, false, outcomes, preds);

  InSampleEstimate out;
  out.method = InSampleMethod::CovPenaltyBootstrap;
  out.penalty_term = covariance_penalty(outcomes, preds);
  out.value = mean_loss(base.model, data.X, data.y, LossKind::SquaredError) + out.penalty_term;
  return out;
}

InSampleEstimate counting_penalty_logistic(const Dataset& data, const FitSpec& spec,
                                           const BootstrapConfig& config) {
  validate_config(config);
  const FitResult base = fit_model(data, spec);
  if (base.model.kind != ModelKind::BernoulliLogistic)
    throw IncompatibleLoss("counting penalty needs a logistic fit");
  const FitResult gen = generator_fit(data, spec, base, config.correction);

  Eigen::MatrixXd outcomes, preds;
  bootstrap_rows(data, spec, config, gen.model, true, outcomes, preds);

  InSampleEstimate out;
  out.method = InSampleMethod::CountingPenaltyLogistic;
  out.penalty_term = covariance_penalty(outcomes, preds);
  out.value = mean_loss(base.model, data.X, data.y, LossKind::CountingError) + out.penalty_term;
  return out;
}

InSampleEstimate insample_estimate(InSampleMethod method, const Dataset& data,
                                   const FitSpec& spec, const FitResult& base_fit,
                                   const BootstrapConfig& config) {
  switch (method) {
    case InSampleMethod::CpOLS:
      return cp_ols(data, base_fit);
    case InSampleMethod::CpLasso:
      return cp_lasso(data, base_fit);
    case InSampleMethod::CovPenaltyBootstrap:
      return cov_penalty_bootstrap(data, spec, config);
    case InSampleMethod::CountingPenaltyLogistic:
      return counting_penalty_logistic(data, spec, config);
  }
  throw ConfigError("unknown in-sample method");
}

}  // namespace shifterr
