#include "shifterr/errx.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <vector>

#include "shifterr/errors.hpp"
#include "shifterr/parallel.hpp"
#include "shifterr/rng.hpp"

namespace shifterr {

namespace {

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

struct ReplicateSlot {
  double test_loss = 0.0;
  double insample_loss = 0.0;
  double theta_norm2 = 0.0;
  std::exception_ptr error;
};

/// One parametric-bootstrap sweep: per replicate, draw outcomes at X and
/// X_test from the generator model, refit on (X, Y^(b)), and record the
/// refit's mean loss on both covariate sets.  The in-sample loss uses a
/// fresh outcome draw at X, not the refitting outcomes: reusing Y^(b) would
/// inflate the decomposition's difference term by the refit's optimism.
std::vector<ReplicateSlot> run_replicates(const Dataset& train, const Eigen::MatrixXd& X_test,
                                          const FitSpec& spec, LossKind loss,
                                          const BootstrapConfig& config,
                                          const ParametricModel& generator) {
  std::vector<ReplicateSlot> slots(static_cast<std::size_t>(config.B));
  parallel_for_each(slots.size(), config.jobs, [&](std::size_t b) {
    ReplicateSlot& slot = slots[b];
    try {
      auto gen_train = rng::engine(config.seed, rng::kTagBootTrain, b);
      auto gen_test = rng::engine(config.seed, rng::kTagBootTest, b);
      auto gen_fresh = rng::engine(config.seed, rng::kTagBootFresh, b);
      const Eigen::VectorXd yb = sample_outcomes(generator, train.X, gen_train);
      const Eigen::VectorXd yb_test = sample_outcomes(generator, X_test, gen_test);
      const Eigen::VectorXd yb_fresh = sample_outcomes(generator, train.X, gen_fresh);
      Dataset rep;
      rep.X = train.X;
      rep.y = yb;
      const FitResult refit = fit_model(rep, spec);
      slot.test_loss = mean_loss(refit.model, X_test, yb_test, loss);
      slot.insample_loss = mean_loss(refit.model, train.X, yb_fresh, loss);
      slot.theta_norm2 = refit.model.theta.squaredNorm();
    } catch (...) {
      slot.error = std::current_exception();
    }
  });
  for (const auto& slot : slots)
    if (slot.error) std::rethrow_exception(slot.error);
  return slots;
}

double clamp_factor(double base_norm2, double mean_boot_norm2, double cap) {
  if (mean_boot_norm2 == 0.0) return 1.0;
  const double c = base_norm2 / mean_boot_norm2;
  return std::min(std::max(c, 1.0 / cap), cap);
}

double applied_factor(const FitResult& base, const std::vector<ReplicateSlot>& slots,
                      const BootstrapConfig& config) {
  if (config.correction != Correction::Multiplicative) return 1.0;
  double mean_norm2 = 0.0;
  for (const auto& slot : slots) mean_norm2 += slot.theta_norm2;
  mean_norm2 /= static_cast<double>(slots.size());
  return clamp_factor(base.model.theta.squaredNorm(), mean_norm2, config.cap_c);
}

struct Context {
  FitResult base;
  FitResult generator;
  std::vector<ReplicateSlot> slots;
};

Context prepare(const Dataset& train, const Eigen::MatrixXd& X_test, const FitSpec& spec,
                LossKind loss, const BootstrapConfig& config) {
  validate_config(config);
  train.validate();
  if (X_test.cols() != train.p())
    throw ShapeMismatch("test covariates have " + std::to_string(X_test.cols()) +
                        " columns, train has " + std::to_string(train.p()));
  Context ctx;
  ctx.base = fit_model(train, spec);
  check_loss_compat(ctx.base.model.kind, loss);
  ctx.generator = generator_fit(train, spec, ctx.base, config.correction);
  ctx.slots = run_replicates(train, X_test, spec, loss, config, ctx.generator.model);
  return ctx;
}

ErrorEstimate assemble_dir(const Context& ctx, const BootstrapConfig& config) {
  ErrorEstimate out;
  out.estimator = EstimatorKind::ErrXdir;
  out.replicate_values.reserve(ctx.slots.size());
  double sum = 0.0;
  for (const auto& slot : ctx.slots) {
    out.replicate_values.push_back(slot.test_loss);
    sum += slot.test_loss;
  }
  const double raw = sum / static_cast<double>(ctx.slots.size());
  out.correction_factor = applied_factor(ctx.base, ctx.slots, config);
  out.value = std::max(out.correction_factor * raw, 0.0);
  return out;
}

ErrorEstimate assemble_dec(const Context& ctx, const BootstrapConfig& config,
                           double insample_value) {
  ErrorEstimate out;
  out.estimator = EstimatorKind::ErrXdec;
  out.replicate_values.reserve(ctx.slots.size());
  double sum = 0.0;
  for (const auto& slot : ctx.slots) {
    const double v = insample_value + (slot.test_loss - slot.insample_loss);
    out.replicate_values.push_back(v);
    sum += v;
  }
  const double raw = sum / static_cast<double>(ctx.slots.size());
  out.correction_factor = applied_factor(ctx.base, ctx.slots, config);
  out.value = std::max(out.correction_factor * raw, 0.0);
  return out;
}

}  // namespace

ErrorEstimate errx_dir(const Dataset& train, const Eigen::MatrixXd& X_test, const FitSpec& spec,
                       LossKind loss, const BootstrapConfig& config) {
  return assemble_dir(prepare(train, X_test, spec, loss, config), config);
}

ErrorEstimate errx_dec(const Dataset& train, const Eigen::MatrixXd& X_test, const FitSpec& spec,
                       LossKind loss, const BootstrapConfig& config,
                       InSampleMethod insample_method) {
  const Context ctx = prepare(train, X_test, spec, loss, config);
  const InSampleEstimate in =
      insample_estimate(insample_method, train, spec, ctx.base, config);
  return assemble_dec(ctx, config, in.value);
}

ErrxPair errx_pair(const Dataset& train, const Eigen::MatrixXd& X_test, const FitSpec& spec,
                   LossKind loss, const BootstrapConfig& config,
                   InSampleMethod insample_method) {
  const Context ctx = prepare(train, X_test, spec, loss, config);
  const InSampleEstimate in =
      insample_estimate(insample_method, train, spec, ctx.base, config);
  return {assemble_dir(ctx, config), assemble_dec(ctx, config, in.value)};
}

double multiplicative_factor(const Eigen::VectorXd& theta_hat,
                             const std::vector<Eigen::VectorXd>& bootstrap_thetas, double cap) {
  if (bootstrap_thetas.empty()) return 1.0;
  double mean_norm2 = 0.0;
  for (const auto& t : bootstrap_thetas) mean_norm2 += t.squaredNorm();
  mean_norm2 /= static_cast<double>(bootstrap_thetas.size());
  return clamp_factor(theta_hat.squaredNorm(), mean_norm2, cap);
}

double closed_form_ols_errx(double sigma2, const Eigen::MatrixXd& X_train,
                            const Eigen::MatrixXd& Sigma_test) {
  const Eigen::Index n = X_train.rows();
  const Eigen::Index p = X_train.cols();
  if (Sigma_test.rows() != p || Sigma_test.cols() != p)
    throw ShapeMismatch("Sigma_test must be p x p");
  const Eigen::MatrixXd Sigma_hat = X_train.transpose() * X_train / static_cast<double>(n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Sigma_hat);
  if (!lu.isInvertible()) throw SingularDesign("empirical train covariance is singular");
  const double trace = lu.solve(Sigma_test).trace();
  return sigma2 + sigma2 * trace / static_cast<double>(n);
}

InSampleMethod default_insample_method(Algorithm algorithm, LossKind loss) {
  if (loss == LossKind::CountingError) return InSampleMethod::CountingPenaltyLogistic;
  switch (algorithm) {
    case Algorithm::OLS:
      return InSampleMethod::CpOLS;
    case Algorithm::LassoCV:
    case Algorithm::RelaxedLasso:
      return InSampleMethod::CpLasso;
    case Algorithm::LogisticL1:
      break;
  }
  throw IncompatibleLoss("no in-sample method for this algorithm/loss pairing");
}

}  // namespace shifterr
