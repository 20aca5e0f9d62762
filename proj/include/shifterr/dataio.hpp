#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "shifterr/dataset.hpp"

namespace shifterr {

enum class SplitScheme { RandomHalf, GroupHalf, TwoMeansGroups };

struct SplitSpec {
  SplitScheme scheme = SplitScheme::RandomHalf;
  std::uint64_t seed = 0;
  double train_fraction = 0.5;
};

/// Reads a comma-separated file (UTF-8, '.' decimal, header required).
/// Features are every numeric column not named as outcome or group, in
/// header order.
Dataset load_csv(const std::string& path, const std::string& outcome_column = "",
                 const std::string& group_column = "");

/// Header names of a CSV file, in order.
std::vector<std::string> csv_columns(const std::string& path);

/// Writes group column (if any), features, then outcome.  Doubles are
/// printed with enough digits to reload bit-exactly.
void save_csv(const Dataset& data, const std::string& path);

/// Row-level random split into round(f*n) train rows and the rest.
std::pair<Dataset, Dataset> split_random_half(const Dataset& data, const SplitSpec& spec);

/// Random split of group labels; every row follows its group.
std::pair<Dataset, Dataset> split_by_groups(const Dataset& data, const SplitSpec& spec);

/// Two-means clustering (Lloyd, farthest-pair start) of per-group feature
/// centroids; the cluster holding the alphabetically first group becomes
/// the training side.  Optionally reports the cluster of each group.
std::pair<Dataset, Dataset> split_two_means(const Dataset& data, const SplitSpec& spec,
                                            std::map<std::string, int>* cluster_of_group = nullptr);

}  // namespace shifterr
