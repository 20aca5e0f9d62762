#include "shifterr/simgen.hpp"

#include <cmath>
#include <random>

#include "shifterr/errors.hpp"
#include "shifterr/rng.hpp"

namespace shifterr {

namespace {

void validate_common(const DGPSpec& spec) {
  if (spec.n < 1 || spec.p < 1 || spec.n_test < 1)
    throw ConfigError("DGP sizes must be positive");
  if (spec.coef_count < 0 || static_cast<Eigen::Index>(spec.coef_count) > spec.p)
    throw ConfigError("coefficient count must lie in [0, p]");
  if (spec.train_law.variance <= 0.0 || spec.test_law.variance <= 0.0)
    throw ConfigError("feature law variance must be positive");
  if (spec.misspec.kind != MisspecKind::None &&
      (spec.misspec.fraction <= 0.0 || spec.misspec.fraction > 1.0))
    throw ConfigError("misspecification fraction must lie in (0, 1]");
}

Eigen::Index misspec_coords(const Misspec& misspec, Eigen::Index p) {
  if (misspec.kind == MisspecKind::None) return 0;
  // ceil(fraction * p) with protection against 0.2 * 10 = 2.0000000000000004.
  const double raw = misspec.fraction * static_cast<double>(p);
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) < 1e-9) return static_cast<Eigen::Index>(nearest);
  return static_cast<Eigen::Index>(std::ceil(raw));
}

/// Signal g(x)' theta for one covariate row, with the transform applied to
/// the leading coordinates.
double signal(const Eigen::RowVectorXd& x, const Eigen::VectorXd& theta, const Misspec& misspec,
              Eigen::Index m) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    double v = x(j);
    if (j < m) {
      if (misspec.kind == MisspecKind::Quadratic)
        v = v * v;
      else if (misspec.kind == MisspecKind::Power)
        v = std::copysign(std::pow(std::abs(v), misspec.exponent), v);
    }
    s += v * theta(j);
  }
  return s;
}

Eigen::MatrixXd draw_matrix(Eigen::Index rows, Eigen::Index cols, const NormalLaw& law,
                            std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(law.variance);
  Eigen::MatrixXd X(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) X(i, j) = law.mean + sd * normal(gen);
  return X;
}

}  // namespace

Eigen::VectorXd dgp_theta(const DGPSpec& spec) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(spec.p);
  for (int j = 0; j < spec.coef_count; ++j) {
    double v = spec.coef_strength;
    if (spec.alternate_signs && j % 2 == 1) v = -v;
    theta(j) = v;
  }
  return theta;
}

SimInstance gen_linear(const DGPSpec& spec) {
  validate_common(spec);
  if (!spec.sigma) throw ConfigError("linear DGP requires a noise sd");
  const Eigen::VectorXd theta = dgp_theta(spec);
  const Eigen::Index m = misspec_coords(spec.misspec, spec.p);
  const double sigma = *spec.sigma;

  auto gen_xtr = rng::engine(spec.seed, rng::kTagSimTrainX, 0);
  auto gen_etr = rng::engine(spec.seed, rng::kTagSimTrainNoise, 0);
  auto gen_xte = rng::engine(spec.seed, rng::kTagSimTestX, 0);
  auto gen_ete = rng::engine(spec.seed, rng::kTagSimTestNoise, 0);

  SimInstance out;
  out.misspec = spec.misspec;
  out.true_model.kind = ModelKind::GaussianLinear;
  out.true_model.theta = theta;
  out.true_model.sigma2 = sigma * sigma;

  auto make = [&](Eigen::Index rows, const NormalLaw& law, std::mt19937_64& gx,
                  std::mt19937_64& ge) {
    Dataset d;
    d.X = draw_matrix(rows, spec.p, law, gx);
    d.y.resize(rows);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < rows; ++i)
      d.y(i) = signal(d.X.row(i), theta, spec.misspec, m) + sigma * normal(ge);
    return d;
  };
  out.train = make(spec.n, spec.train_law, gen_xtr, gen_etr);
  out.test = make(spec.n_test, spec.test_law, gen_xte, gen_ete);
  return out;
}

SimInstance gen_logistic(const DGPSpec& spec) {
  validate_common(spec);
  if (spec.sigma) throw ConfigError("logistic DGP takes no noise sd");
  const Eigen::VectorXd theta = dgp_theta(spec);
  const Eigen::Index m = misspec_coords(spec.misspec, spec.p);

  auto gen_xtr = rng::engine(spec.seed, rng::kTagSimTrainX, 0);
  auto gen_utr = rng::engine(spec.seed, rng::kTagSimTrainNoise, 0);
  auto gen_xte = rng::engine(spec.seed, rng::kTagSimTestX, 0);
  auto gen_ute = rng::engine(spec.seed, rng::kTagSimTestNoise, 0);

  auto draw_row = [&](const NormalLaw& law, std::mt19937_64& gx, std::mt19937_64& gu,
                      Eigen::RowVectorXd& x) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double sd = std::sqrt(law.variance);
    for (Eigen::Index j = 0; j < spec.p; ++j) x(j) = law.mean + sd * normal(gx);
    const double z = signal(x, theta, spec.misspec, m);
    const double prob = 1.0 / (1.0 + std::exp(-z));
    return unif(gu) < prob ? 1.0 : 0.0;
  };

  SimInstance out;
  out.misspec = spec.misspec;
  out.true_model.kind = ModelKind::BernoulliLogistic;
  out.true_model.theta = theta;

  out.train.X.resize(spec.n, spec.p);
  out.train.y.resize(spec.n);
  if (!spec.imbalance_ratio) {
    Eigen::RowVectorXd x(spec.p);
    for (Eigen::Index i = 0; i < spec.n; ++i) {
      out.train.y(i) = draw_row(spec.train_law, gen_xtr, gen_utr, x);
      out.train.X.row(i) = x;
    }
  } else {
    if (*spec.imbalance_ratio < 1.0) throw ConfigError("imbalance ratio must be at least 1");
    const Eigen::Index k = static_cast<Eigen::Index>(std::floor(*spec.imbalance_ratio));
    const Eigen::Index want_major = spec.n * k / (k + 1);
    const Eigen::Index want_minor = spec.n - want_major;
    Eigen::Index have_major = 0, have_minor = 0, filled = 0;
    const Eigen::Index cap = 50 * spec.n + 1000;
    Eigen::RowVectorXd x(spec.p);
    for (Eigen::Index draw = 0; filled < spec.n; ++draw) {
      if (draw >= cap)
        throw InfeasibleImbalance("could not reach the requested label ratio");
      const double label = draw_row(spec.train_law, gen_xtr, gen_utr, x);
      if (label == 1.0 ? have_major >= want_major : have_minor >= want_minor) continue;
      (label == 1.0 ? have_major : have_minor) += 1;
      out.train.X.row(filled) = x;
      out.train.y(filled) = label;
      ++filled;
    }
  }

  out.test.X.resize(spec.n_test, spec.p);
  out.test.y.resize(spec.n_test);
  {
    Eigen::RowVectorXd x(spec.p);
    for (Eigen::Index i = 0; i < spec.n_test; ++i) {
      out.test.y(i) = draw_row(spec.test_law, gen_xte, gen_ute, x);
      out.test.X.row(i) = x;
    }
  }
  return out;
}

double snr(const DGPSpec& spec) {
  validate_common(spec);
  if (!spec.sigma) throw ConfigError("snr is defined for linear DGPs");
  const Eigen::VectorXd theta = dgp_theta(spec);
  if (theta.squaredNorm() == 0.0) return 0.0;
  const Eigen::Index m = misspec_coords(spec.misspec, spec.p);

  constexpr Eigen::Index kDraws = 100000;
  auto gen = rng::engine(spec.seed, rng::kTagSnr, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(spec.train_law.variance);
  Eigen::RowVectorXd x(spec.p);
  double sum = 0.0, sumsq = 0.0;
  for (Eigen::Index i = 0; i < kDraws; ++i) {
    for (Eigen::Index j = 0; j < spec.p; ++j) x(j) = spec.train_law.mean + sd * normal(gen);
    const double s = signal(x, theta, spec.misspec, m);
    sum += s;
    sumsq += s * s;
  }
  const double mean = sum / kDraws;
  const double var = sumsq / kDraws - mean * mean;
  return var / (*spec.sigma * *spec.sigma);
}

}  // namespace shifterr
