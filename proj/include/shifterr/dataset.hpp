#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "shifterr/errors.hpp"

namespace shifterr {

/// A design matrix with outcomes and optional group labels.
///
/// Column names are carried along so datasets read from CSV survive a
/// split/save round trip with their headers intact.  Names are optional;
/// synthetic data leaves them empty.
struct Dataset {
  Eigen::MatrixXd X;  // n x p
  Eigen::VectorXd y;  // n
  std::vector<std::string> groups;  // empty or size n

  std::vector<std::string> feature_names;  // empty or size p
  std::string y_name;
  std::string group_name;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
  bool has_y() const { return y.size() > 0; }
  bool has_groups() const { return !groups.empty(); }

  /// Checks internal consistency.  `require_rows` is enforced by fitting
  /// code; structural operations (splits) tolerate empty pieces.  y may be
  /// absent entirely (unlabeled test data) but never partially sized.
  void validate(bool require_rows = true) const {
    if (y.size() != 0 && y.size() != X.rows())
      throw ShapeMismatch("y has " + std::to_string(y.size()) + " entries but X has " +
                          std::to_string(X.rows()) + " rows");
    if (!groups.empty() && static_cast<Eigen::Index>(groups.size()) != X.rows())
      throw ShapeMismatch("group labels have " + std::to_string(groups.size()) +
                          " entries but X has " + std::to_string(X.rows()) + " rows");
    if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != X.cols())
      throw ShapeMismatch("feature names have " + std::to_string(feature_names.size()) +
                          " entries but X has " + std::to_string(X.cols()) + " columns");
    if (require_rows && X.rows() < 1) throw ShapeMismatch("dataset has no rows");
  }

  /// Copies the rows listed in `idx`, preserving metadata.
  Dataset subset(const std::vector<Eigen::Index>& idx) const {
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
    if (has_y()) out.y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.X.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
      if (has_y()) out.y(static_cast<Eigen::Index>(i)) = y(idx[i]);
    }
    if (!groups.empty()) {
      out.groups.reserve(idx.size());
      for (auto i : idx) out.groups.push_back(groups[static_cast<std::size_t>(i)]);
    }
    out.feature_names = feature_names;
    out.y_name = y_name;
    out.group_name = group_name;
    return out;
  }
};

}  // namespace shifterr
