#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shifterr/bootstrap.hpp"
#include "shifterr/dataset.hpp"
#include "shifterr/models.hpp"

namespace shifterr {

/// K-fold assignment of rows.  When built from group labels, all rows of a
/// group share a fold.
struct FoldPlan {
  std::vector<int> assignments;
  int K = 0;
};

/// Balanced random folds (sizes differ by at most one row, or one group
/// when grouped), deterministic per seed.
FoldPlan make_folds(Eigen::Index n, int K, const std::vector<std::string>& groups,
                    std::uint64_t seed);

/// K-fold cross-validation error: fit on each fold's complement, score the
/// held-out rows, return the unweighted mean of all n held-out losses.
/// replicate_values holds the per-fold mean losses.
ErrorEstimate cv_error(const Dataset& data, const FitSpec& spec, LossKind loss,
                       const FoldPlan& plan);

}  // namespace shifterr
