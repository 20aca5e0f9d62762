#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shifterr/errors.hpp"
#include "shifterr/models.hpp"
#include "shifterr/rng.hpp"
#include "shifterr/simgen.hpp"

using namespace shifterr;

namespace {

Dataset make_data(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Dataset d;
  d.X = X;
  d.y = y;
  return d;
}

Dataset linear_instance(Eigen::Index n, Eigen::Index p, const Eigen::VectorXd& theta, double sigma,
                        std::uint64_t seed) {
  const Eigen::MatrixXd X = oracle::random_matrix(n, p, seed);
  const Eigen::VectorXd eps = oracle::random_vector(n, seed ^ 0x9e3779b97f4a7c15ULL);
  return make_data(X, X * theta + sigma * eps);
}

}  // namespace

TEST_CASE("fit_ols interpolating identity design") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd y(2);
  y << 1, 2;
  const FitResult fit = fit_ols(make_data(X, y));
  CHECK(fit.model.theta(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.model.theta(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.training_residual_ss == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.active_count == 2);
}

TEST_CASE("fit_ols intercept-only column is the mean") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(4, 1);
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 4;
  const FitResult fit = fit_ols(make_data(X, y));
  CHECK(fit.model.theta(0) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(*fit.model.sigma2 == doctest::Approx(5.0 / 3.0).epsilon(1e-12));  // RSS = 5, n-p = 3
}

TEST_CASE("fit_ols matches normal-equations oracle") {
  const Eigen::MatrixXd X = oracle::random_matrix(20, 3, 101);
  const Eigen::VectorXd y = oracle::random_vector(20, 202);
  const Eigen::VectorXd ref = oracle::ols_normal_equations(X, y);
  const FitResult fit = fit_ols(make_data(X, y));
  CHECK((fit.model.theta - ref).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(*fit.model.sigma2 ==
        doctest::Approx((y - X * ref).squaredNorm() / (20 - 3)).epsilon(1e-10));
}

TEST_CASE("fit_ols residual orthogonality invariant") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Eigen::MatrixXd X = oracle::random_matrix(30, 5, 1000 + s);
    const Eigen::VectorXd y = oracle::random_vector(30, 2000 + s);
    const FitResult fit = fit_ols(make_data(X, y));
    const double lhs = (X.transpose() * (y - X * fit.model.theta)).cwiseAbs().maxCoeff();
    CHECK(lhs < 1e-8 * (X.transpose() * y).cwiseAbs().maxCoeff());
  }
}

TEST_CASE("fit_ols rejects rank-deficient designs") {
  Eigen::MatrixXd X(4, 2);
  X.col(0) << 1, 2, 3, 4;
  X.col(1) = 2.0 * X.col(0);
  CHECK_THROWS_AS(fit_ols(make_data(X, oracle::random_vector(4, 5))), SingularDesign);

  // wide matrix: fewer rows than columns
  const Eigen::MatrixXd W = oracle::random_matrix(3, 5, 6);
  CHECK_THROWS_AS(fit_ols(make_data(W, oracle::random_vector(3, 7))), SingularDesign);
}

TEST_CASE("fit_lasso_cv full shrinkage above lambda_max") {
  const Eigen::MatrixXd X = oracle::random_matrix(30, 4, 11);
  const Eigen::VectorXd y = oracle::random_vector(30, 12);
  const double lambda_max = (X.transpose() * y).cwiseAbs().maxCoeff() / 30.0;
  FitSpec spec;
  spec.algorithm = Algorithm::LassoCV;
  spec.lambda_grid = {lambda_max * 1.001};
  const FitResult fit = fit_lasso_cv(make_data(X, y), spec);
  CHECK(fit.model.theta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.active_count == 0);
}

TEST_CASE("fit_lasso_cv at lambda 0 equals OLS") {
  Eigen::VectorXd theta(3);
  theta << 1.0, -2.0, 0.5;
  const Dataset data = linear_instance(40, 3, theta, 0.5, 21);
  FitSpec spec;
  spec.algorithm = Algorithm::LassoCV;
  spec.lambda_grid = {0.0};
  spec.tolerance = 1e-10;
  const FitResult lasso = fit_lasso_cv(data, spec);
  const FitResult ols = fit_ols(data);
  CHECK((lasso.model.theta - ols.model.theta).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit_lasso_cv scalar optimum matches grid-search oracle") {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(4, 2.0);
  // oracle first: brute grid search localizes the soft-threshold value
  const double grid_opt = oracle::scalar_lasso_grid(x, y, 1.0);
  CHECK(grid_opt == doctest::Approx(1.0).epsilon(2e-4));

  Eigen::MatrixXd X(4, 1);
  X.col(0) = x;
  FitSpec spec;
  spec.algorithm = Algorithm::LassoCV;
  spec.lambda_grid = {1.0};
  const FitResult fit = fit_lasso_cv(make_data(X, y), spec);
  CHECK(fit.model.theta(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(fit.model.theta(0) - grid_opt) < 2e-4);
}

TEST_CASE("lasso KKT conditions hold at the returned iterate") {
  std::mt19937_64 pick(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd X = oracle::random_matrix(40, 8, 3000 + static_cast<std::uint64_t>(rep));
    const Eigen::VectorXd y = oracle::random_vector(40, 4000 + static_cast<std::uint64_t>(rep));
    const double lambda_max = (X.transpose() * y).cwiseAbs().maxCoeff() / 40.0;
    std::uniform_real_distribution<double> frac(0.05, 0.8);
    const double lambda = lambda_max * frac(pick);
    FitSpec spec;
    spec.algorithm = Algorithm::LassoCV;
    spec.lambda_grid = {lambda};
    spec.tolerance = 1e-9;
    const FitResult fit = fit_lasso_cv(make_data(X, y), spec);
    CHECK(oracle::kkt_violation(X, y, fit.model.theta, lambda) < 1e-6);
    // descent sanity: no worse than the zero vector
    CHECK(oracle::lasso_objective(X, y, fit.model.theta, lambda) <=
          oracle::lasso_objective(X, y, Eigen::VectorXd::Zero(8), lambda) + 1e-12);
  }
}

TEST_CASE("fit_lasso_cv degenerate grid when y is orthogonal to X") {
  Eigen::MatrixXd X(4, 2);
  X << 1, 0, -1, 0, 0, 1, 0, -1;
  Eigen::VectorXd y = Eigen::VectorXd::Ones(4);  // X'y = 0
  FitSpec spec;
  spec.algorithm = Algorithm::LassoCV;
  CHECK_THROWS_AS(fit_lasso_cv(make_data(X, y), spec), DegenerateGrid);
}

TEST_CASE("fit_lasso_cv grid must be strictly decreasing") {
  const Dataset data = linear_instance(30, 3, Eigen::VectorXd::Ones(3), 1.0, 31);
  FitSpec spec;
  spec.algorithm = Algorithm::LassoCV;
  spec.lambda_grid = {0.1, 0.1, 0.05};
  CHECK_THROWS_AS(fit_lasso_cv(data, spec), Error);
}

TEST_CASE("fit_lasso_cv CV selects from the grid") {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(6);
  theta(0) = 3.0;
  theta(1) = -2.0;
  const Dataset data = linear_instance(60, 6, theta, 1.0, 41);
  FitSpec spec;
  spec.algorithm = Algorithm::LassoCV;
  spec.lambda_grid = {1.0, 0.3, 0.1, 0.03, 0.01};
  const FitResult fit = fit_lasso_cv(data, spec);
  bool on_grid = false;
  for (double l : spec.lambda_grid) on_grid |= (l == fit.lambda_selected);
  CHECK(on_grid);
  // strong signal: heavy shrinkage should lose the CV contest
  CHECK(fit.lambda_selected < 1.0);
  CHECK(fit.active_count >= 2);
}

TEST_CASE("fit_relaxed_lasso refits the active set without penalty") {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(8);
  theta(2) = 2.0;
  const Dataset data = linear_instance(50, 8, theta, 1.0, 51);
  FitSpec spec;
  spec.algorithm = Algorithm::LassoCV;
  spec.lambda_grid = {0.25};
  const FitResult base = fit_lasso_cv(data, spec);
  REQUIRE(base.active_count >= 1);

  const FitResult relaxed = fit_relaxed_lasso(data, spec);
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < 8; ++j)
    if (base.model.theta(j) != 0.0) active.push_back(j);
  Eigen::MatrixXd XA(data.n(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t k = 0; k < active.size(); ++k) XA.col(static_cast<Eigen::Index>(k)) = data.X.col(active[k]);
  const Eigen::VectorXd ref = oracle::ols_normal_equations(XA, data.y);
  for (std::size_t k = 0; k < active.size(); ++k)
    CHECK(relaxed.model.theta(active[k]) == doctest::Approx(ref(static_cast<Eigen::Index>(k))).epsilon(1e-8));
  for (Eigen::Index j = 0; j < 8; ++j)
    if (std::find(active.begin(), active.end(), j) == active.end())
      CHECK(relaxed.model.theta(j) == 0.0);
}

TEST_CASE("fit_relaxed_lasso empty active set flags and zeroes") {
  const Dataset data = linear_instance(30, 4, Eigen::VectorXd::Zero(4), 1.0, 61);
  FitSpec spec;
  spec.algorithm = Algorithm::RelaxedLasso;
  spec.lambda_grid = {1e6};
  const FitResult fit = fit_relaxed_lasso(data, spec);
  CHECK(fit.empty_active_set);
  CHECK(fit.model.theta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.active_count == 0);
}

TEST_CASE("fit_relaxed_lasso with full support equals OLS") {
  Eigen::VectorXd theta(2);
  theta << 4.0, -3.0;
  const Dataset data = linear_instance(40, 2, theta, 0.3, 71);
  FitSpec spec;
  spec.algorithm = Algorithm::RelaxedLasso;
  spec.lambda_grid = {1e-6};
  const FitResult relaxed = fit_relaxed_lasso(data, spec);
  const FitResult ols = fit_ols(data);
  CHECK((relaxed.model.theta - ols.model.theta).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("fit_logistic huge penalty gives the coin-flip model") {
  const Eigen::MatrixXd X = oracle::random_matrix(30, 3, 81);
  Eigen::VectorXd y(30);
  for (int i = 0; i < 30; ++i) y(i) = i % 2;
  FitSpec spec;
  spec.algorithm = Algorithm::LogisticL1;
  spec.lambda_grid = {100.0};
  const FitResult fit = fit_logistic(make_data(X, y), spec);
  CHECK(fit.model.theta.cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd probs = predict(fit.model, X);
  for (int i = 0; i < 30; ++i) CHECK(probs(i) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("fit_logistic separable 1-D data is rejected, near-separable matches Newton oracle") {
  // the fully separated pairs {(-1,0),(1,1)} have no finite MLE
  std::vector<double> xs, ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(-1.0);
    ys.push_back(0.0);
    xs.push_back(1.0);
    ys.push_back(1.0);
  }
  Eigen::MatrixXd X(20, 1);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    X(i, 0) = xs[static_cast<std::size_t>(i)];
    y(i) = ys[static_cast<std::size_t>(i)];
  }
  FitSpec plain;
  plain.algorithm = Algorithm::LogisticL1;
  plain.lambda_grid = {0.0};
  CHECK_THROWS_AS(fit_logistic(make_data(X, y), plain), SeparableData);

  // flip one label on each side: finite optimum, scalar Newton oracle applies
  std::vector<double> xs2 = xs, ys2 = ys;
  ys2[0] = 1.0;
  ys2[1] = 0.0;
  const double ref = oracle::scalar_logistic_newton(xs2, ys2);
  Eigen::VectorXd y2(20);
  for (int i = 0; i < 20; ++i) y2(i) = ys2[static_cast<std::size_t>(i)];
  const FitResult fit = fit_logistic(make_data(X, y2), plain);
  CHECK(fit.model.theta(0) == doctest::Approx(ref).epsilon(1e-6));
  CHECK(!fit.model.sigma2.has_value());
}

TEST_CASE("fit_logistic single class errors") {
  const Eigen::MatrixXd X = oracle::random_matrix(10, 2, 91);
  FitSpec spec;
  spec.algorithm = Algorithm::LogisticL1;
  spec.lambda_grid = {0.0};
  CHECK_THROWS_AS(fit_logistic(make_data(X, Eigen::VectorXd::Ones(10)), spec), SingleClass);
  CHECK_THROWS_AS(fit_logistic(make_data(X, Eigen::VectorXd::Zero(10)), spec), SingleClass);
}

TEST_CASE("fit_logistic L1 zeroes out above lambda_max") {
  DGPSpec dgp;
  dgp.n = 60;
  dgp.p = 4;
  dgp.coef_count = 2;
  dgp.coef_strength = 1.0;
  dgp.seed = 5;
  const SimInstance inst = gen_logistic(dgp);
  const double lambda_max =
      (inst.train.X.transpose() * (inst.train.y.array() - 0.5).matrix()).cwiseAbs().maxCoeff() /
      static_cast<double>(inst.train.n());
  FitSpec spec;
  spec.algorithm = Algorithm::LogisticL1;
  spec.lambda_grid = {lambda_max * 1.01};
  const FitResult fit = fit_logistic(inst.train, spec);
  CHECK(fit.model.theta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit_logistic L1 CV selection returns a grid member and fits signal") {
  DGPSpec dgp;
  dgp.n = 150;
  dgp.p = 6;
  dgp.coef_count = 2;
  dgp.coef_strength = 1.5;
  dgp.seed = 15;
  const SimInstance inst = gen_logistic(dgp);
  FitSpec spec;
  spec.algorithm = Algorithm::LogisticL1;
  spec.cv_folds = 5;
  spec.lambda_grid = {0.3, 0.1, 0.03, 0.01};
  const FitResult fit = fit_logistic(inst.train, spec);
  bool on_grid = false;
  for (double l : spec.lambda_grid) on_grid |= (l == fit.lambda_selected);
  CHECK(on_grid);
  CHECK(fit.active_count >= 1);
  CHECK(fit.model.theta(0) > 0.0);  // true coefficient is positive
}

TEST_CASE("estimate_sigma2_lasso formula and Saturated guard") {
  // residual sum of squares exactly 450 with 10 active coefficients
  const Eigen::MatrixXd X = oracle::random_matrix(100, 20, 111);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(20);
  for (int j = 0; j < 10; ++j) theta(j) = 1.0 + j * 0.1;
  const Eigen::VectorXd y = X * theta + std::sqrt(4.5) * Eigen::VectorXd::Ones(100);
  FitResult fit;
  fit.model.kind = ModelKind::GaussianLinear;
  fit.model.theta = theta;
  fit.active_count = 10;
  CHECK(estimate_sigma2_lasso(make_data(X, y), fit) == doctest::Approx(5.0).epsilon(1e-12));

  fit.active_count = 100;
  CHECK_THROWS_AS(estimate_sigma2_lasso(make_data(X, y), fit), Saturated);
}

TEST_CASE("estimate_sigma2_lasso zero residuals give zero") {
  Eigen::VectorXd theta(3);
  theta << 1, 2, 3;
  const Dataset data = linear_instance(30, 3, theta, 0.0, 121);
  FitSpec spec;
  spec.algorithm = Algorithm::LassoCV;
  spec.lambda_grid = {0.0};
  spec.tolerance = 1e-12;
  const FitResult fit = fit_lasso_cv(data, spec);
  CHECK(estimate_sigma2_lasso(data, fit) < 1e-12);
}

TEST_CASE("estimate_sigma2_lasso recovers known noise scale on average") {
  // n=100, p=50, sigma=3: the selected-support residual estimate should sit
  // near sigma^2 = 9 on average
  double total = 0.0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    DGPSpec dgp;
    dgp.n = 100;
    dgp.p = 50;
    dgp.coef_count = 5;
    dgp.coef_strength = 2.0;
    dgp.sigma = 3.0;
    dgp.seed = 7000 + static_cast<std::uint64_t>(r);
    const SimInstance inst = gen_linear(dgp);
    FitSpec spec;
    spec.algorithm = Algorithm::LassoCV;
    const FitResult fit = fit_lasso_cv(inst.train, spec);
    total += *fit.model.sigma2;
  }
  const double mean = total / reps;
  CHECK(mean > 6.0);
  CHECK(mean < 12.0);
}

TEST_CASE("predict values for linear and logistic models") {
  ParametricModel lin;
  lin.kind = ModelKind::GaussianLinear;
  lin.theta = Eigen::VectorXd::Zero(3);
  const Eigen::MatrixXd X = oracle::random_matrix(5, 3, 131);
  CHECK(predict(lin, X).cwiseAbs().maxCoeff() == 0.0);

  lin.theta << 1, 2, 3;
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd along = predict(lin, basis);
  CHECK(along(0) == 1.0);
  CHECK(along(1) == 2.0);
  CHECK(along(2) == 3.0);

  ParametricModel logit;
  logit.kind = ModelKind::BernoulliLogistic;
  logit.theta = Eigen::VectorXd::Zero(3);
  const Eigen::VectorXd probs = predict(logit, X);
  for (int i = 0; i < 5; ++i) CHECK(probs(i) == 0.5);

  ParametricModel shaped = logit;
  shaped.theta << 2, 0, 0;
  Eigen::MatrixXd one(1, 3);
  one << 0.5, 9.0, -4.0;
  shaped.theta << 2, 0, 0;
  CHECK(predict(shaped, one)(0) == doctest::Approx(oracle::sigmoid_ref(1.0)).epsilon(1e-14));

  Eigen::MatrixXd wrong(2, 2);
  CHECK_THROWS_AS(predict(lin, wrong), ShapeMismatch);
}

TEST_CASE("sample_outcomes noiseless model returns X theta exactly") {
  ParametricModel m;
  m.kind = ModelKind::GaussianLinear;
  m.theta = Eigen::VectorXd::Ones(3);
  m.sigma2 = 0.0;
  const Eigen::MatrixXd X = oracle::random_matrix(10, 3, 141);
  auto gen = rng::engine(1, 2, 3);
  const Eigen::VectorXd y = sample_outcomes(m, X, gen);
  CHECK((y - X * m.theta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sample_outcomes missing sigma2 errors") {
  ParametricModel m;
  m.kind = ModelKind::GaussianLinear;
  m.theta = Eigen::VectorXd::Ones(2);
  const Eigen::MatrixXd X = oracle::random_matrix(4, 2, 151);
  auto gen = rng::engine(1, 2, 3);
  CHECK_THROWS_AS(sample_outcomes(m, X, gen), MissingSigma);
}

TEST_CASE("sample_outcomes Gaussian residual variance tracks sigma2") {
  ParametricModel m;
  m.kind = ModelKind::GaussianLinear;
  m.theta = Eigen::VectorXd::Zero(1);
  m.sigma2 = 4.0;
  const Eigen::MatrixXd X = Eigen::MatrixXd::Zero(100000, 1);
  auto gen = rng::engine(9, 8, 7);
  const Eigen::VectorXd y = sample_outcomes(m, X, gen);
  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() / (y.size() - 1);
  CHECK(var == doctest::Approx(4.0).epsilon(0.025));
}

TEST_CASE("sample_outcomes logistic saturation and frequency") {
  ParametricModel m;
  m.kind = ModelKind::BernoulliLogistic;
  m.theta = Eigen::VectorXd::Constant(1, 50.0);
  const Eigen::MatrixXd X = Eigen::MatrixXd::Ones(1000, 1);
  auto gen = rng::engine(3, 1, 4);
  const Eigen::VectorXd y = sample_outcomes(m, X, gen);
  CHECK(y.minCoeff() == 1.0);  // miss probability ~1e-20 per draw

  ParametricModel half = m;
  half.theta = Eigen::VectorXd::Zero(1);
  auto gen2 = rng::engine(3, 1, 5);
  const Eigen::VectorXd flips = sample_outcomes(half, X, gen2);
  CHECK(flips.mean() == doctest::Approx(0.5).epsilon(0.1));
  for (int i = 0; i < 1000; ++i) CHECK((flips(i) == 0.0 || flips(i) == 1.0));
}

TEST_CASE("sample_outcomes is a pure function of the engine state") {
  ParametricModel m;
  m.kind = ModelKind::GaussianLinear;
  m.theta = Eigen::VectorXd::Ones(2);
  m.sigma2 = 2.0;
  const Eigen::MatrixXd X = oracle::random_matrix(50, 2, 161);
  auto g1 = rng::engine(77, 1, 0);
  auto g2 = rng::engine(77, 1, 0);
  const Eigen::VectorXd a = sample_outcomes(m, X, g1);
  const Eigen::VectorXd b = sample_outcomes(m, X, g2);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  // distinct substreams diverge
  auto g3 = rng::engine(77, 1, 1);
  const Eigen::VectorXd c = sample_outcomes(m, X, g3);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("loss functions and compatibility checks") {
  ParametricModel lin;
  lin.kind = ModelKind::GaussianLinear;
  lin.theta = Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  Eigen::VectorXd y(3);
  y << 1.5, 2.0, 2.0;
  const Eigen::VectorXd sq = pointwise_loss(lin, X, y, LossKind::SquaredError);
  CHECK(sq(0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(sq(1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(sq(2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mean_loss(lin, X, y, LossKind::SquaredError) == doctest::Approx(1.25 / 3.0).epsilon(1e-14));

  ParametricModel logit;
  logit.kind = ModelKind::BernoulliLogistic;
  logit.theta = Eigen::VectorXd::Constant(1, 1.0);
  Eigen::MatrixXd Xl(3, 1);
  Xl << 1.0, -1.0, 0.0;  // probs sigmoid(1) > .5, sigmoid(-1) < .5, exactly .5
  Eigen::VectorXd yl(3);
  yl << 1, 1, 0;
  const Eigen::VectorXd cnt = pointwise_loss(logit, Xl, yl, LossKind::CountingError);
  CHECK(cnt(0) == 0.0);  // predicts 1, y = 1
  CHECK(cnt(1) == 1.0);  // predicts 0, y = 1
  CHECK(cnt(2) == 1.0);  // tie -> class 1, y = 0

  CHECK_THROWS_AS(check_loss_compat(ModelKind::GaussianLinear, LossKind::CountingError),
                  IncompatibleLoss);
  CHECK_THROWS_AS(check_loss_compat(ModelKind::BernoulliLogistic, LossKind::SquaredError),
                  IncompatibleLoss);
  CHECK_NOTHROW(check_loss_compat(ModelKind::GaussianLinear, LossKind::SquaredError));
  CHECK_NOTHROW(check_loss_compat(ModelKind::BernoulliLogistic, LossKind::CountingError));
}

TEST_CASE("fit_model dispatches on the algorithm") {
  Eigen::VectorXd theta(3);
  theta << 2, 0, 0;
  const Dataset data = linear_instance(50, 3, theta, 1.0, 171);
  FitSpec spec;
  spec.algorithm = Algorithm::OLS;
  CHECK(fit_model(data, spec).active_count == 3);
  spec.algorithm = Algorithm::LassoCV;
  spec.lambda_grid = {0.4};
  const FitResult lasso = fit_model(data, spec);
  CHECK(lasso.active_count < 3);
  spec.algorithm = Algorithm::RelaxedLasso;
  const FitResult relaxed = fit_model(data, spec);
  CHECK(relaxed.model.kind == ModelKind::GaussianLinear);
}
