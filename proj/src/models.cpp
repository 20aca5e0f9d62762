#include "shifterr/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shifterr/errors.hpp"

namespace shifterr {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  if (z > 30.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

void validate_fit_inputs(const Dataset& data, const FitSpec& spec) {
  data.validate();
  if (!data.has_y()) throw ShapeMismatch("fitting requires outcomes y");
  if (spec.tolerance <= 0.0) throw ConfigError("tolerance must be positive");
  if (spec.max_iter < 1) throw ConfigError("max_iter must be positive");
}

void validate_grid(const std::vector<double>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || !std::isfinite(grid[i]))
      throw ConfigError("lambda_grid values must be finite and nonnegative");
    if (i > 0 && grid[i] >= grid[i - 1])
      throw ConfigError("explicit lambda_grid must be strictly decreasing");
  }
}

std::vector<double> log_spaced_grid(double lambda_max) {
  constexpr int kPoints = 100;
  constexpr double kRatio = 1e-3;
  std::vector<double> grid(kPoints);
  for (int k = 0; k < kPoints; ++k)
    grid[k] = lambda_max * std::pow(kRatio, static_cast<double>(k) / (kPoints - 1));
  return grid;
}

/// Coordinate descent for (1/(2n))||sqrt(w).(y - X theta)||^2 + lambda|theta|_1
/// with optional observation weights.  Maintains the residual r = y - X theta.
/// Returns the number of sweeps spent; throws NoConvergence past max_iter.
int coordinate_descent(const Eigen::MatrixXd& X, Eigen::VectorXd& r, Eigen::VectorXd& theta,
                       const Eigen::VectorXd& colsq, const Eigen::VectorXd* w, double lambda,
                       double tol, int max_iter) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  std::vector<char> active(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) active[static_cast<std::size_t>(j)] = theta(j) != 0.0;

  auto sweep = [&](bool full) {
    double maxdelta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!full && !active[static_cast<std::size_t>(j)]) continue;
      const double cj = colsq(j);
      if (cj == 0.0) continue;
      double rho;
      if (w)
        rho = (X.col(j).array() * w->array() * r.array()).sum() / static_cast<double>(n);
      else
        rho = X.col(j).dot(r) / static_cast<double>(n);
      const double old = theta(j);
      const double next = soft_threshold(rho + cj * old, lambda) / cj;
      if (next != old) {
        r -= (next - old) * X.col(j);
        theta(j) = next;
        maxdelta = std::max(maxdelta, std::abs(next - old));
        active[static_cast<std::size_t>(j)] = next != 0.0;
      }
    }
    return maxdelta;
  };

  // Convergence is judged on coordinate movement alone.  A membership flip of
  // sub-tolerance magnitude (a coefficient sitting exactly at the threshold
  // can oscillate between 0 and one ulp) must not keep the loop alive.
  int sweeps = 0;
  while (true) {
    double maxdelta = sweep(true);
    if (++sweeps > max_iter) throw NoConvergence("coordinate descent exceeded max_iter");
    if (maxdelta < tol) return sweeps;
    while (maxdelta >= tol) {
      maxdelta = sweep(false);
      if (++sweeps > max_iter) throw NoConvergence("coordinate descent exceeded max_iter");
    }
  }
}

/// Solutions along a descending lambda sequence, warm-started left to right.
std::vector<Eigen::VectorXd> lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const std::vector<double>& lambdas, double tol,
                                        int max_iter) {
  const Eigen::Index n = X.rows();
  Eigen::VectorXd colsq(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    colsq(j) = X.col(j).squaredNorm() / static_cast<double>(n);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(X.cols());
  Eigen::VectorXd r = y;
  std::vector<Eigen::VectorXd> path;
  path.reserve(lambdas.size());
  for (double lambda : lambdas) {
    coordinate_descent(X, r, theta, colsq, nullptr, lambda, tol, max_iter);
    path.push_back(theta);
  }
  return path;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(rows[i]);
  return out;
}

/// Deterministic stride folds for internal lambda selection (no seed in
/// FitSpec by design; rows of simulated data are exchangeable).
std::vector<int> stride_folds(Eigen::Index n, int K) {
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) fold[static_cast<std::size_t>(i)] = static_cast<int>(i % K);
  return fold;
}

void check_binary(const Eigen::VectorXd& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) != 0.0 && y(i) != 1.0) throw ShapeMismatch("logistic outcomes must be 0 or 1");
  const double s = y.sum();
  if (s == 0.0 || s == static_cast<double>(y.size()))
    throw SingleClass("all outcomes belong to one class");
}

double binomial_nll(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& theta) {
  const Eigen::VectorXd z = X * theta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += softplus(z(i)) - y(i) * z(i);
  return total / static_cast<double>(X.rows());
}

constexpr double kSeparationBound = 30.0;

/// Unpenalized logistic fit: Newton steps with Armijo halving.
Eigen::VectorXd logistic_newton(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol,
                                int max_iter) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  const int iters = std::min(max_iter, 500);
  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXd z = X * theta;
    Eigen::VectorXd prob(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prob(i) = sigmoid(z(i));
      // Floor keeps the Hessian factorizable for saturated observations; it
      // must stay small enough that separable fits keep moving until the
      // coefficient bound below can catch them.
      w(i) = std::max(prob(i) * (1.0 - prob(i)), 1e-12);
    }
    const Eigen::VectorXd g = X.transpose() * (prob - y) / static_cast<double>(n);
    const Eigen::MatrixXd H =
        X.transpose() * w.asDiagonal() * X / static_cast<double>(n);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success) throw SingularDesign("logistic Hessian not factorizable");
    const Eigen::VectorXd d = ldlt.solve(-g);
    if (!d.allFinite()) throw SingularDesign("logistic Hessian numerically singular");
    const double f0 = binomial_nll(X, y, theta);
    const double slope = g.dot(d);
    double t = 1.0;
    while (t > 1e-12 && binomial_nll(X, y, theta + t * d) > f0 + 1e-4 * t * slope) t *= 0.5;
    theta += t * d;
    if (theta.cwiseAbs().maxCoeff() > kSeparationBound)
      throw SeparableData("unpenalized logistic fit diverging (separable data)");
    // Step-based convergence: on separable data the gradient decays to zero
    // while the iterates keep marching, so a gradient test would stop short of
    // the divergence bound above.
    if (t * d.cwiseAbs().maxCoeff() < tol) return theta;
  }
  throw NoConvergence("logistic Newton exceeded iteration limit");
}

/// One L1-penalized logistic solve by proximal Newton (IRLS outer loop,
/// weighted coordinate descent inner loop), warm-started from theta.
void l1_logistic_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                       Eigen::VectorXd& theta, double tol, int max_iter) {
  const Eigen::Index n = X.rows();
  constexpr int kOuterMax = 100;
  double prev_obj = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < kOuterMax; ++outer) {
    const Eigen::VectorXd z = X * theta;
    Eigen::VectorXd w(n), r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double pr = sigmoid(z(i));
      pr = std::min(std::max(pr, 1e-5), 1.0 - 1e-5);
      w(i) = pr * (1.0 - pr);
      r(i) = (y(i) - pr) / w(i);  // working residual at the current theta
    }
    Eigen::VectorXd colsq(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      colsq(j) = (X.col(j).array().square() * w.array()).sum() / static_cast<double>(n);
    const Eigen::VectorXd before = theta;
    coordinate_descent(X, r, theta, colsq, &w, lambda, tol, max_iter);
    const double obj = binomial_nll(X, y, theta) + lambda * theta.cwiseAbs().sum();
    // The quadratic model can overshoot; fall back toward the previous
    // iterate until the true penalized likelihood stops increasing.
    Eigen::VectorXd accepted = theta;
    double obj_acc = obj;
    for (int h = 0; h < 10 && obj_acc > prev_obj + 1e-12; ++h) {
      accepted = 0.5 * (accepted + before);
      obj_acc = binomial_nll(X, y, accepted) + lambda * accepted.cwiseAbs().sum();
    }
    theta = accepted;
    const double delta = (theta - before).cwiseAbs().maxCoeff();
    prev_obj = obj_acc;
    if (delta < tol) return;
  }
  throw NoConvergence("L1 logistic solver exceeded outer iteration limit");
}

std::vector<Eigen::VectorXd> l1_logistic_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                              const std::vector<double>& lambdas, double tol,
                                              int max_iter) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(X.cols());
  std::vector<Eigen::VectorXd> path;
  path.reserve(lambdas.size());
  for (double lambda : lambdas) {
    if (lambda == 0.0)
      theta = logistic_newton(X, y, tol, max_iter);
    else
      l1_logistic_solve(X, y, lambda, theta, tol, max_iter);
    path.push_back(theta);
  }
  return path;
}

double binomial_deviance(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& theta) {
  const Eigen::VectorXd z = X * theta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    double pr = sigmoid(z(i));
    pr = std::min(std::max(pr, 1e-12), 1.0 - 1e-12);
    total += -2.0 * (y(i) * std::log(pr) + (1.0 - y(i)) * std::log(1.0 - pr));
  }
  return total / static_cast<double>(X.rows());
}

Eigen::Index count_nonzero(const Eigen::VectorXd& v) {
  Eigen::Index c = 0;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (v(j) != 0.0) ++c;
  return c;
}

}  // namespace

FitResult fit_ols(const Dataset& data) {
  data.validate();
  if (!data.has_y()) throw ShapeMismatch("fitting requires outcomes y");
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (n < p) throw SingularDesign("OLS requires at least as many rows as columns");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
  if (qr.rank() < p) throw SingularDesign("design matrix is numerically rank-deficient");
  FitResult out;
  out.model.kind = ModelKind::GaussianLinear;
  out.model.theta = qr.solve(data.y);
  out.training_residual_ss = (data.y - data.X * out.model.theta).squaredNorm();
  // n == p interpolates; the residual scale is then 0/0 and defined as 0.
  out.model.sigma2 = n > p ? out.training_residual_ss / static_cast<double>(n - p) : 0.0;
  out.active_count = p;
  out.lambda_selected = 0.0;
  return out;
}

FitResult fit_lasso_cv(const Dataset& data, const FitSpec& spec) {
  validate_fit_inputs(data, spec);
  const Eigen::Index n = data.n();
  if ((data.X.transpose() * data.y).cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateGrid("y is orthogonal to every column; only the zero model exists");

  std::vector<double> grid = spec.lambda_grid;
  validate_grid(grid);
  if (grid.empty())
    grid = log_spaced_grid((data.X.transpose() * data.y).cwiseAbs().maxCoeff() /
                           static_cast<double>(n));

  std::size_t selected = 0;
  if (grid.size() > 1) {
    const int K = spec.cv_folds;
    if (K < 2 || static_cast<Eigen::Index>(K) > n)
      throw ConfigError("cv_folds must satisfy 2 <= K <= n");
    const std::vector<int> fold = stride_folds(n, K);
    std::vector<double> cv_sse(grid.size(), 0.0);
    for (int k = 0; k < K; ++k) {
      std::vector<Eigen::Index> tr, va;
      for (Eigen::Index i = 0; i < n; ++i)
        (fold[static_cast<std::size_t>(i)] == k ? va : tr).push_back(i);
      const Eigen::MatrixXd Xtr = take_rows(data.X, tr);
      const Eigen::MatrixXd Xva = take_rows(data.X, va);
      const Eigen::VectorXd ytr = take_rows(data.y, tr);
      const Eigen::VectorXd yva = take_rows(data.y, va);
      const auto path = lasso_path(Xtr, ytr, grid, spec.tolerance, spec.max_iter);
      for (std::size_t g = 0; g < grid.size(); ++g)
        cv_sse[g] += (yva - Xva * path[g]).squaredNorm();
    }
    for (std::size_t g = 1; g < grid.size(); ++g)
      if (cv_sse[g] < cv_sse[selected]) selected = g;
  }

  const auto path = lasso_path(data.X, data.y, grid, spec.tolerance, spec.max_iter);

  FitResult out;
  out.model.kind = ModelKind::GaussianLinear;
  out.model.theta = path[selected];
  out.lambda_selected = grid[selected];
  out.active_count = count_nonzero(out.model.theta);
  out.training_residual_ss = (data.y - data.X * out.model.theta).squaredNorm();
  out.model.sigma2 = estimate_sigma2_lasso(data, out);
  return out;
}

FitResult fit_relaxed_lasso(const Dataset& data, const FitSpec& spec) {
  const bool logistic = spec.algorithm == Algorithm::LogisticL1;
  const FitResult base = logistic ? fit_logistic(data, spec) : fit_lasso_cv(data, spec);

  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < base.model.theta.size(); ++j)
    if (base.model.theta(j) != 0.0) active.push_back(j);

  FitResult out;
  out.lambda_selected = base.lambda_selected;
  if (active.empty()) {
    out.model.kind = logistic ? ModelKind::BernoulliLogistic : ModelKind::GaussianLinear;
    out.model.theta = Eigen::VectorXd::Zero(data.p());
    out.active_count = 0;
    out.empty_active_set = true;
    if (logistic) {
      out.training_residual_ss = (data.y.array() - 0.5).square().sum();
    } else {
      out.training_residual_ss = data.y.squaredNorm();
      out.model.sigma2 = estimate_sigma2_lasso(data, out);
    }
    return out;
  }

  Eigen::MatrixXd Xa(data.n(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j)
    Xa.col(static_cast<Eigen::Index>(j)) = data.X.col(active[j]);

  Eigen::VectorXd theta_a;
  if (logistic) {
    theta_a = logistic_newton(Xa, data.y, spec.tolerance, spec.max_iter);
  } else {
    Dataset sub;
    sub.X = Xa;
    sub.y = data.y;
    theta_a = fit_ols(sub).model.theta;
  }

  out.model.kind = logistic ? ModelKind::BernoulliLogistic : ModelKind::GaussianLinear;
  out.model.theta = Eigen::VectorXd::Zero(data.p());
  for (std::size_t j = 0; j < active.size(); ++j) out.model.theta(active[j]) = theta_a(j);
  out.active_count = static_cast<Eigen::Index>(active.size());
  if (logistic) {
    const Eigen::VectorXd prob = predict(out.model, data.X);
    out.training_residual_ss = (data.y - prob).squaredNorm();
  } else {
    out.training_residual_ss = (data.y - data.X * out.model.theta).squaredNorm();
    out.model.sigma2 = estimate_sigma2_lasso(data, out);
  }
  return out;
}

FitResult fit_logistic(const Dataset& data, const FitSpec& spec) {
  validate_fit_inputs(data, spec);
  check_binary(data.y);
  const Eigen::Index n = data.n();

  std::vector<double> grid = spec.lambda_grid;
  validate_grid(grid);
  if (grid.empty()) {
    const double lambda_max =
        (data.X.transpose() * (data.y.array() - 0.5).matrix()).cwiseAbs().maxCoeff() /
        static_cast<double>(n);
    if (lambda_max == 0.0)
      throw DegenerateGrid("labels carry no signal against any column");
    grid = log_spaced_grid(lambda_max);
  }

  std::size_t selected = 0;
  if (grid.size() > 1) {
    const int K = spec.cv_folds;
    if (K < 2 || static_cast<Eigen::Index>(K) > n)
      throw ConfigError("cv_folds must satisfy 2 <= K <= n");
    const std::vector<int> fold = stride_folds(n, K);
    std::vector<double> cv_dev(grid.size(), 0.0);
    for (int k = 0; k < K; ++k) {
      std::vector<Eigen::Index> tr, va;
      for (Eigen::Index i = 0; i < n; ++i)
        (fold[static_cast<std::size_t>(i)] == k ? va : tr).push_back(i);
      const Eigen::MatrixXd Xtr = take_rows(data.X, tr);
      const Eigen::MatrixXd Xva = take_rows(data.X, va);
      const Eigen::VectorXd ytr = take_rows(data.y, tr);
      const Eigen::VectorXd yva = take_rows(data.y, va);
      const auto path = l1_logistic_path(Xtr, ytr, grid, spec.tolerance, spec.max_iter);
      for (std::size_t g = 0; g < grid.size(); ++g)
        cv_dev[g] += binomial_deviance(Xva, yva, path[g]) * static_cast<double>(va.size());
    }
    for (std::size_t g = 1; g < grid.size(); ++g)
      if (cv_dev[g] < cv_dev[selected]) selected = g;
  }

  FitResult out;
  out.model.kind = ModelKind::BernoulliLogistic;
  if (grid.size() == 1 && grid[0] == 0.0) {
    out.model.theta = logistic_newton(data.X, data.y, spec.tolerance, spec.max_iter);
  } else {
    const auto path = l1_logistic_path(data.X, data.y, grid, spec.tolerance, spec.max_iter);
    out.model.theta = path[selected];
  }
  out.lambda_selected = grid[selected];
  out.active_count = count_nonzero(out.model.theta);
  const Eigen::VectorXd prob = predict(out.model, data.X);
  out.training_residual_ss = (data.y - prob).squaredNorm();
  return out;
}

double estimate_sigma2_lasso(const Dataset& data, const FitResult& fit) {
  const Eigen::Index n = data.n();
  if (fit.active_count >= n)
    throw Saturated("active set as large as the sample; residual variance undefined");
  const double rss = (data.y - data.X * fit.model.theta).squaredNorm();
  return rss / static_cast<double>(n - fit.active_count);
}

FitResult fit_model(const Dataset& data, const FitSpec& spec) {
  switch (spec.algorithm) {
    case Algorithm::OLS:
      return fit_ols(data);
    case Algorithm::LassoCV:
      return fit_lasso_cv(data, spec);
    case Algorithm::RelaxedLasso:
      return fit_relaxed_lasso(data, spec);
    case Algorithm::LogisticL1:
      return fit_logistic(data, spec);
  }
  throw ConfigError("unknown algorithm");
}

Eigen::VectorXd predict(const ParametricModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.theta.size())
    throw ShapeMismatch("X has " + std::to_string(X.cols()) + " columns but theta has " +
                        std::to_string(model.theta.size()));
  Eigen::VectorXd z = X * model.theta;
  if (model.kind == ModelKind::BernoulliLogistic)
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sigmoid(z(i));
  return z;
}

Eigen::VectorXd sample_outcomes(const ParametricModel& model, const Eigen::MatrixXd& X,
                                std::mt19937_64& gen) {
  if (X.cols() != model.theta.size())
    throw ShapeMismatch("X column count does not match theta length");
  const Eigen::Index n = X.rows();
  Eigen::VectorXd out(n);
  if (model.kind == ModelKind::GaussianLinear) {
    if (!model.sigma2) throw MissingSigma("GaussianLinear sampling requires sigma2");
    const Eigen::VectorXd mu = X * model.theta;
    const double sd = std::sqrt(*model.sigma2);
    if (sd == 0.0) return mu;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = mu(i) + sd * normal(gen);
  } else {
    const Eigen::VectorXd prob = predict(model, X);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = unif(gen) < prob(i) ? 1.0 : 0.0;
  }
  return out;
}

void check_loss_compat(ModelKind kind, LossKind loss) {
  if (loss == LossKind::SquaredError && kind != ModelKind::GaussianLinear)
    throw IncompatibleLoss("squared error applies to linear models only");
  if (loss == LossKind::CountingError && kind != ModelKind::BernoulliLogistic)
    throw IncompatibleLoss("counting error applies to logistic models only");
}

Eigen::VectorXd pointwise_loss(const ParametricModel& model, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y, LossKind loss) {
  check_loss_compat(model.kind, loss);
  if (y.size() != X.rows()) throw ShapeMismatch("y length does not match X rows");
  const Eigen::VectorXd pred = predict(model, X);
  Eigen::VectorXd out(y.size());
  if (loss == LossKind::SquaredError) {
    out = (y - pred).array().square();
  } else {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double label = pred(i) >= 0.5 ? 1.0 : 0.0;
      out(i) = label == y(i) ? 0.0 : 1.0;
    }
  }
  return out;
}

double mean_loss(const ParametricModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 LossKind loss) {
  return pointwise_loss(model, X, y, loss).mean();
}

}  // namespace shifterr
