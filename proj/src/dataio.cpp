#include "shifterr/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "shifterr/errors.hpp"
#include "shifterr/rng.hpp"

namespace shifterr {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool to_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> sorted_distinct_groups(const Dataset& data) {
  if (!data.has_groups()) throw MissingGroups("this split scheme needs a group column");
  std::set<std::string> distinct(data.groups.begin(), data.groups.end());
  if (distinct.size() < 2) throw MissingGroups("need at least 2 distinct groups");
  return {distinct.begin(), distinct.end()};
}

std::pair<Dataset, Dataset> split_rows_by_membership(const Dataset& data,
                                                     const std::set<std::string>& train_groups) {
  std::vector<Eigen::Index> tr, te;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    (train_groups.count(data.groups[static_cast<std::size_t>(i)]) ? tr : te).push_back(i);
  return {data.subset(tr), data.subset(te)};
}

}  // namespace

std::vector<std::string> csv_columns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw ParseError(path + " is empty");
  return split_fields(header);
}

Dataset load_csv(const std::string& path, const std::string& outcome_column,
                 const std::string& group_column) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + " is empty");
  const std::vector<std::string> header = split_fields(line);

  int outcome_idx = -1, group_idx = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!outcome_column.empty() && header[c] == outcome_column) outcome_idx = static_cast<int>(c);
    if (!group_column.empty() && header[c] == group_column) group_idx = static_cast<int>(c);
  }
  if (!outcome_column.empty() && outcome_idx < 0)
    throw MissingColumn("outcome column '" + outcome_column + "' not in " + path);
  if (!group_column.empty() && group_idx < 0)
    throw MissingColumn("group column '" + group_column + "' not in " + path);

  std::vector<int> feature_idx;
  Dataset data;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<int>(c) == outcome_idx || static_cast<int>(c) == group_idx) continue;
    feature_idx.push_back(static_cast<int>(c));
    data.feature_names.push_back(header[c]);
  }
  data.y_name = outcome_column;
  data.group_name = group_column;

  std::vector<std::vector<double>> feat_rows;
  std::vector<double> y_rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size())
      throw ParseError(path + " row " + std::to_string(lineno) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    std::vector<double> row(feature_idx.size());
    for (std::size_t j = 0; j < feature_idx.size(); ++j) {
      const std::string& cell = fields[static_cast<std::size_t>(feature_idx[j])];
      if (!to_double(cell, row[j]))
        throw NonNumericFeature("'" + cell + "' at " + path + " row " + std::to_string(lineno) +
                                ", column " + header[static_cast<std::size_t>(feature_idx[j])]);
    }
    feat_rows.push_back(std::move(row));
    if (outcome_idx >= 0) {
      double y;
      if (!to_double(fields[static_cast<std::size_t>(outcome_idx)], y))
        throw ParseError("bad outcome value at " + path + " row " + std::to_string(lineno));
      y_rows.push_back(y);
    }
    if (group_idx >= 0) data.groups.push_back(fields[static_cast<std::size_t>(group_idx)]);
  }
  if (feat_rows.empty()) throw ParseError(path + " has a header but no data rows");

  data.X.resize(static_cast<Eigen::Index>(feat_rows.size()),
                static_cast<Eigen::Index>(feature_idx.size()));
  for (std::size_t i = 0; i < feat_rows.size(); ++i)
    for (std::size_t j = 0; j < feature_idx.size(); ++j)
      data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = feat_rows[i][j];
  if (outcome_idx >= 0) {
    data.y.resize(static_cast<Eigen::Index>(y_rows.size()));
    for (std::size_t i = 0; i < y_rows.size(); ++i)
      data.y(static_cast<Eigen::Index>(i)) = y_rows[i];
  }
  data.validate();
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  data.validate(false);
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);

  std::vector<std::string> cols;
  if (data.has_groups()) cols.push_back(data.group_name.empty() ? "group" : data.group_name);
  for (Eigen::Index j = 0; j < data.p(); ++j)
    cols.push_back(data.feature_names.empty() ? "x" + std::to_string(j + 1)
                                              : data.feature_names[static_cast<std::size_t>(j)]);
  if (data.has_y()) cols.push_back(data.y_name.empty() ? "y" : data.y_name);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << "\n";

  for (Eigen::Index i = 0; i < data.n(); ++i) {
    bool first = true;
    if (data.has_groups()) {
      out << data.groups[static_cast<std::size_t>(i)];
      first = false;
    }
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      out << (first ? "" : ",") << fmt_double(data.X(i, j));
      first = false;
    }
    if (data.has_y()) out << (first ? "" : ",") << fmt_double(data.y(i));
    out << "\n";
  }
}

std::pair<Dataset, Dataset> split_random_half(const Dataset& data, const SplitSpec& spec) {
  data.validate();
  const Eigen::Index n = data.n();
  if (n < 2) throw ShapeMismatch("need at least 2 rows to split");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  auto gen = rng::engine(spec.seed, rng::kTagSplit, 0);
  std::shuffle(order.begin(), order.end(), gen);
  const auto n_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(n)));
  std::vector<Eigen::Index> tr(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<Eigen::Index> te(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(tr.begin(), tr.end());
  std::sort(te.begin(), te.end());
  return {data.subset(tr), data.subset(te)};
}

std::pair<Dataset, Dataset> split_by_groups(const Dataset& data, const SplitSpec& spec) {
  data.validate();
  std::vector<std::string> labels = sorted_distinct_groups(data);
  auto gen = rng::engine(spec.seed, rng::kTagSplit, 1);
  std::shuffle(labels.begin(), labels.end(), gen);
  const auto n_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(labels.size())));
  const std::set<std::string> train_groups(labels.begin(),
                                           labels.begin() + static_cast<std::ptrdiff_t>(n_train));
  return split_rows_by_membership(data, train_groups);
}

std::pair<Dataset, Dataset> split_two_means(const Dataset& data, const SplitSpec& spec,
                                            std::map<std::string, int>* cluster_of_group) {
  (void)spec;  // deterministic scheme; no randomness involved
  data.validate();
  const std::vector<std::string> labels = sorted_distinct_groups(data);
  const std::size_t G = labels.size();

  // Per-group feature centroids, in sorted label order.
  std::map<std::string, std::size_t> index_of;
  for (std::size_t g = 0; g < G; ++g) index_of[labels[g]] = g;
  Eigen::MatrixXd centroid = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(G), data.p());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(G));
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const auto g = static_cast<Eigen::Index>(index_of[data.groups[static_cast<std::size_t>(i)]]);
    centroid.row(g) += data.X.row(i);
    count(g) += 1.0;
  }
  for (Eigen::Index g = 0; g < centroid.rows(); ++g) centroid.row(g) /= count(g);

  // Farthest pair of centroids seeds the two centers.
  std::size_t seed_a = 0, seed_b = 1;
  double best = -1.0;
  for (std::size_t a = 0; a < G; ++a)
    for (std::size_t b = a + 1; b < G; ++b) {
      const double d = (centroid.row(static_cast<Eigen::Index>(a)) -
                        centroid.row(static_cast<Eigen::Index>(b)))
                           .squaredNorm();
      if (d > best) {
        best = d;
        seed_a = a;
        seed_b = b;
      }
    }

  Eigen::RowVectorXd c0 = centroid.row(static_cast<Eigen::Index>(seed_a));
  Eigen::RowVectorXd c1 = centroid.row(static_cast<Eigen::Index>(seed_b));
  std::vector<int> cluster(G, 0);
  const int max_iter = std::max<int>(50, 10 * static_cast<int>(G));
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (std::size_t g = 0; g < G; ++g) {
      const auto row = centroid.row(static_cast<Eigen::Index>(g));
      const int assign = (row - c0).squaredNorm() <= (row - c1).squaredNorm() ? 0 : 1;
      if (assign != cluster[g]) {
        cluster[g] = assign;
        changed = true;
      }
    }
    if (!changed && it > 0) break;
    Eigen::RowVectorXd s0 = Eigen::RowVectorXd::Zero(data.p());
    Eigen::RowVectorXd s1 = Eigen::RowVectorXd::Zero(data.p());
    int n0 = 0, n1 = 0;
    for (std::size_t g = 0; g < G; ++g) {
      if (cluster[g] == 0) {
        s0 += centroid.row(static_cast<Eigen::Index>(g));
        ++n0;
      } else {
        s1 += centroid.row(static_cast<Eigen::Index>(g));
        ++n1;
      }
    }
    if (n0 == 0 || n1 == 0) break;
    c0 = s0 / n0;
    c1 = s1 / n1;
  }

  if (cluster_of_group) {
    cluster_of_group->clear();
    for (std::size_t g = 0; g < G; ++g) (*cluster_of_group)[labels[g]] = cluster[g];
  }

  const int train_cluster = cluster[0];  // side of the first label in sorted order
  std::set<std::string> train_groups;
  for (std::size_t g = 0; g < G; ++g)
    if (cluster[g] == train_cluster) train_groups.insert(labels[g]);
  return split_rows_by_membership(data, train_groups);
}

}  // namespace shifterr
