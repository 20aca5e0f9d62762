#include "shifterr/baselines.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "shifterr/errors.hpp"
#include "shifterr/rng.hpp"

namespace shifterr {

FoldPlan make_folds(Eigen::Index n, int K, const std::vector<std::string>& groups,
                    std::uint64_t seed) {
  if (K < 2) throw TooFewGroups("fold count must be at least 2");
  FoldPlan plan;
  plan.K = K;
  plan.assignments.assign(static_cast<std::size_t>(n), 0);
  auto gen = rng::engine(seed, rng::kTagFolds, 0);

  if (groups.empty()) {
    if (static_cast<Eigen::Index>(K) > n)
      throw TooFewGroups("fold count exceeds the number of rows");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), gen);
    for (std::size_t r = 0; r < order.size(); ++r)
      plan.assignments[static_cast<std::size_t>(order[r])] = static_cast<int>(r % K);
    return plan;
  }

  if (static_cast<Eigen::Index>(groups.size()) != n)
    throw ShapeMismatch("group labels do not match row count");
  std::set<std::string> distinct(groups.begin(), groups.end());
  if (static_cast<int>(distinct.size()) < K)
    throw TooFewGroups("fewer distinct groups than folds");
  std::vector<std::string> labels(distinct.begin(), distinct.end());
  std::shuffle(labels.begin(), labels.end(), gen);
  std::map<std::string, int> fold_of;
  for (std::size_t g = 0; g < labels.size(); ++g)
    fold_of[labels[g]] = static_cast<int>(g % K);
  for (std::size_t i = 0; i < groups.size(); ++i) plan.assignments[i] = fold_of[groups[i]];
  return plan;
}

ErrorEstimate cv_error(const Dataset& data, const FitSpec& spec, LossKind loss,
                       const FoldPlan& plan) {
  data.validate();
  if (!data.has_y()) throw ShapeMismatch("cross-validation requires outcomes y");
  const Eigen::Index n = data.n();
  if (static_cast<Eigen::Index>(plan.assignments.size()) != n)
    throw ShapeMismatch("fold plan does not match row count");

  Eigen::VectorXd held_out(n);
  ErrorEstimate out;
  out.estimator = EstimatorKind::CV;
  out.replicate_values.reserve(static_cast<std::size_t>(plan.K));

  for (int k = 0; k < plan.K; ++k) {
    std::vector<Eigen::Index> tr, va;
    for (Eigen::Index i = 0; i < n; ++i)
      (plan.assignments[static_cast<std::size_t>(i)] == k ? va : tr).push_back(i);
    if (va.empty()) throw TooFewGroups("fold " + std::to_string(k) + " is empty");
    const Dataset train = data.subset(tr);
    const Dataset valid = data.subset(va);
    FitResult fit;
    try {
      fit = fit_model(train, spec);
    } catch (const Error& e) {
      throw Error("cross-validation fold " + std::to_string(k) + ": " + e.what());
    }
    const Eigen::VectorXd losses = pointwise_loss(fit.model, valid.X, valid.y, loss);
    for (std::size_t i = 0; i < va.size(); ++i)
      held_out(va[i]) = losses(static_cast<Eigen::Index>(i));
    out.replicate_values.push_back(losses.mean());
  }

  out.value = held_out.mean();
  return out;
}

}  // namespace shifterr
