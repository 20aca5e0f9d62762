#include "shifterr/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "shifterr/baselines.hpp"
#include "shifterr/errors.hpp"
#include "shifterr/errx.hpp"
#include "shifterr/metrics.hpp"
#include "shifterr/parallel.hpp"
#include "shifterr/rng.hpp"
#include "shifterr/version.hpp"

namespace shifterr {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void bad_name(const std::string& what, const std::string& got) {
  throw ConfigError("unknown " + what + " '" + got + "'");
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::OLS: return "ols";
    case Algorithm::LassoCV: return "lasso_cv";
    case Algorithm::RelaxedLasso: return "relaxed_lasso";
    case Algorithm::LogisticL1: return "logistic_l1";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "ols") return Algorithm::OLS;
  if (s == "lasso_cv") return Algorithm::LassoCV;
  if (s == "relaxed_lasso") return Algorithm::RelaxedLasso;
  if (s == "logistic_l1") return Algorithm::LogisticL1;
  bad_name("algorithm", s);
}

const char* loss_name(LossKind l) {
  return l == LossKind::SquaredError ? "squared" : "counting";
}

LossKind parse_loss(const std::string& s) {
  if (s == "squared") return LossKind::SquaredError;
  if (s == "counting") return LossKind::CountingError;
  bad_name("loss", s);
}

const char* correction_name(Correction c) {
  switch (c) {
    case Correction::None: return "none";
    case Correction::Multiplicative: return "multiplicative";
    case Correction::RelaxedLasso: return "relaxed_lasso";
  }
  return "?";
}

Correction parse_correction(const std::string& s) {
  if (s == "none") return Correction::None;
  if (s == "multiplicative") return Correction::Multiplicative;
  if (s == "relaxed_lasso") return Correction::RelaxedLasso;
  bad_name("correction", s);
}

const char* insample_name(InSampleMethod m) {
  switch (m) {
    case InSampleMethod::CpOLS: return "cp_ols";
    case InSampleMethod::CpLasso: return "cp_lasso";
    case InSampleMethod::CovPenaltyBootstrap: return "cov_penalty";
    case InSampleMethod::CountingPenaltyLogistic: return "counting_penalty";
  }
  return "?";
}

InSampleMethod parse_insample(const std::string& s) {
  if (s == "cp_ols") return InSampleMethod::CpOLS;
  if (s == "cp_lasso") return InSampleMethod::CpLasso;
  if (s == "cov_penalty") return InSampleMethod::CovPenaltyBootstrap;
  if (s == "counting_penalty") return InSampleMethod::CountingPenaltyLogistic;
  bad_name("insample_method", s);
}

const char* misspec_name(MisspecKind k) {
  switch (k) {
    case MisspecKind::None: return "none";
    case MisspecKind::Quadratic: return "quadratic";
    case MisspecKind::Power: return "power";
  }
  return "?";
}

MisspecKind parse_misspec(const std::string& s) {
  if (s == "none") return MisspecKind::None;
  if (s == "quadratic") return MisspecKind::Quadratic;
  if (s == "power") return MisspecKind::Power;
  bad_name("misspec kind", s);
}

EstimatorKind parse_estimator(const std::string& s) {
  if (s == "cv") return EstimatorKind::CV;
  if (s == "errx_dir") return EstimatorKind::ErrXdir;
  if (s == "errx_dec") return EstimatorKind::ErrXdec;
  bad_name("estimator", s);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

DGPSpec parse_dgp(const json& d) {
  check_keys(d, "dgp",
             {"n", "n_test", "p", "coef_count", "coef_strength", "alternate_signs", "train", "test",
              "sigma", "misspec", "imbalance_ratio"});
  DGPSpec s;
  s.n = d.value("n", static_cast<std::int64_t>(s.n));
  s.n_test = d.value("n_test", static_cast<std::int64_t>(s.n_test));
  s.p = d.value("p", static_cast<std::int64_t>(s.p));
  s.coef_count = d.value("coef_count", s.coef_count);
  s.coef_strength = d.value("coef_strength", s.coef_strength);
  s.alternate_signs = d.value("alternate_signs", s.alternate_signs);
  if (d.contains("train")) {
    check_keys(d.at("train"), "dgp.train", {"mean", "variance"});
    s.train_law.mean = d.at("train").value("mean", s.train_law.mean);
    s.train_law.variance = d.at("train").value("variance", s.train_law.variance);
  }
  if (d.contains("test")) {
    check_keys(d.at("test"), "dgp.test", {"mean", "variance"});
    s.test_law.mean = d.at("test").value("mean", s.test_law.mean);
    s.test_law.variance = d.at("test").value("variance", s.test_law.variance);
  }
  if (d.contains("sigma")) s.sigma = d.at("sigma").get<double>();
  if (d.contains("misspec")) {
    check_keys(d.at("misspec"), "dgp.misspec", {"kind", "exponent", "fraction"});
    s.misspec.kind = parse_misspec(d.at("misspec").value("kind", std::string("none")));
    s.misspec.exponent = d.at("misspec").value("exponent", s.misspec.exponent);
    s.misspec.fraction = d.at("misspec").value("fraction", s.misspec.fraction);
  }
  if (d.contains("imbalance_ratio")) s.imbalance_ratio = d.at("imbalance_ratio").get<double>();
  return s;
}

CsvSource parse_source(const json& d) {
  check_keys(d, "data", {"csv", "outcome", "group", "split"});
  CsvSource s;
  // csv may stay empty for the estimate command, whose files come from the
  // command line; simulate insists on it below.
  s.path = d.value("csv", s.path);
  s.outcome_column = d.value("outcome", s.outcome_column);
  s.group_column = d.value("group", s.group_column);
  if (d.contains("split")) {
    const json& sp = d.at("split");
    check_keys(sp, "data.split", {"scheme", "seed", "train_fraction"});
    s.split.scheme = parse_scheme(sp.value("scheme", std::string("random-half")));
    s.split.seed = sp.value("seed", s.split.seed);
    s.split.train_fraction = sp.value("train_fraction", s.split.train_fraction);
  }
  return s;
}

std::pair<Dataset, Dataset> apply_split(const Dataset& data, const SplitSpec& split,
                                        std::map<std::string, int>* clusters = nullptr) {
  switch (split.scheme) {
    case SplitScheme::RandomHalf: return split_random_half(data, split);
    case SplitScheme::GroupHalf: return split_by_groups(data, split);
    case SplitScheme::TwoMeansGroups: return split_two_means(data, split, clusters);
  }
  throw ConfigError("unhandled split scheme");
}

struct RepResult {
  std::vector<double> estimates;
  double truth = 0.0;
  bool failed = false;
  int code = 0;
  std::string message;
};

int find_estimator(const ExperimentConfig& config, EstimatorKind kind) {
  for (std::size_t k = 0; k < config.estimators.size(); ++k)
    if (config.estimators[k] == kind) return static_cast<int>(k);
  return -1;
}

const std::vector<std::string> kNoGroups;

RepResult run_one_rep(const ExperimentConfig& config, std::size_t rep, const Dataset* full) {
  RepResult out;
  out.estimates.assign(config.estimators.size(), 0.0);
  const std::uint64_t rep_seed = rng::mix(config.seed, static_cast<std::uint64_t>(rep));
  std::string stage = "data generation";
  try {
    Dataset train, test;
    if (config.dgp) {
      DGPSpec dgp = *config.dgp;
      dgp.seed = rep_seed;
      SimInstance inst = dgp.sigma ? gen_linear(dgp) : gen_logistic(dgp);
      train = std::move(inst.train);
      test = std::move(inst.test);
    } else {
      SplitSpec split = config.source->split;
      split.seed = rep_seed;
      std::tie(train, test) = apply_split(*full, split);
    }
    if (!test.has_y())
      throw ConfigError("simulation scoring needs outcomes on the held-out side");

    stage = "fit";
    const FitResult base = fit_model(train, config.fit);
    check_loss_compat(base.model.kind, config.loss);
    out.truth = true_test_error(base.model, test, config.loss);

    BootstrapConfig boot = config.bootstrap;
    boot.seed = rep_seed;
    boot.jobs = 1;  // parallelism lives at the replication level here
    const InSampleMethod method =
        config.insample ? *config.insample : default_insample_method(config.fit.algorithm, config.loss);

    const int i_dir = find_estimator(config, EstimatorKind::ErrXdir);
    const int i_dec = find_estimator(config, EstimatorKind::ErrXdec);
    const int i_cv = find_estimator(config, EstimatorKind::CV);

    if (i_dir >= 0 && i_dec >= 0) {
      stage = "errx";
      const ErrxPair pair = errx_pair(train, test.X, config.fit, config.loss, boot, method);
      out.estimates[static_cast<std::size_t>(i_dir)] = pair.dir.value;
      out.estimates[static_cast<std::size_t>(i_dec)] = pair.dec.value;
    } else if (i_dir >= 0) {
      stage = "errx_dir";
      out.estimates[static_cast<std::size_t>(i_dir)] =
          errx_dir(train, test.X, config.fit, config.loss, boot).value;
    } else if (i_dec >= 0) {
      stage = "errx_dec";
      out.estimates[static_cast<std::size_t>(i_dec)] =
          errx_dec(train, test.X, config.fit, config.loss, boot, method).value;
    }
    if (i_cv >= 0) {
      stage = "cv";
      const FoldPlan plan = make_folds(train.n(), config.cv.folds,
                                       config.cv.grouped ? train.groups : kNoGroups, rep_seed);
      out.estimates[static_cast<std::size_t>(i_cv)] = cv_error(train, config.fit, config.loss, plan).value;
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.code = exit_code_for(e);
    out.message = "rep " + std::to_string(rep) + ", " + stage + ": " + e.what();
  }
  return out;
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

/// Standardized deviation (estimate - truth)/mean(truth) per estimator as a
/// box plot with the per-rep points overlaid.
void write_bias_svg(const std::string& path, const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& devs) {
  const double slot_w = 110.0, box_w = 46.0, left = 70.0, top = 20.0, plot_h = 240.0;
  const double width = left + slot_w * static_cast<double>(names.size()) + 20.0;
  const double height = top + plot_h + 45.0;

  double lo = 0.0, hi = 0.0;
  for (const auto& v : devs)
    for (double d : v) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double pad = 0.06 * (hi - lo);
  lo -= pad;
  hi += pad;
  const auto yc = [&](double v) { return top + (hi - v) / (hi - lo) * plot_h; };

  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(width) << "\" height=\""
      << svg_num(height) << "\" viewBox=\"0 0 " << svg_num(width) << " " << svg_num(height)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<line x1=\"" << svg_num(left - 8) << "\" y1=\"" << svg_num(top) << "\" x2=\""
      << svg_num(left - 8) << "\" y2=\"" << svg_num(top + plot_h) << "\" stroke=\"black\"/>\n";
  for (double tick : {lo + pad, 0.0, hi - pad}) {
    const double y = yc(tick);
    out << "<line x1=\"" << svg_num(left - 12) << "\" y1=\"" << svg_num(y) << "\" x2=\""
        << svg_num(left - 8) << "\" y2=\"" << svg_num(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << svg_num(left - 16) << "\" y=\"" << svg_num(y + 4)
        << "\" text-anchor=\"end\">" << svg_num(tick) << "</text>\n";
  }
  out << "<line x1=\"" << svg_num(left - 8) << "\" y1=\"" << svg_num(yc(0.0)) << "\" x2=\""
      << svg_num(width - 10) << "\" y2=\"" << svg_num(yc(0.0))
      << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";

  for (std::size_t k = 0; k < names.size(); ++k) {
    std::vector<double> sorted = devs[k];
    std::sort(sorted.begin(), sorted.end());
    const double cx = left + slot_w * (static_cast<double>(k) + 0.5);
    const double q1 = quantile_sorted(sorted, 0.25);
    const double q2 = quantile_sorted(sorted, 0.5);
    const double q3 = quantile_sorted(sorted, 0.75);
    out << "<line x1=\"" << svg_num(cx) << "\" y1=\"" << svg_num(yc(sorted.front())) << "\" x2=\""
        << svg_num(cx) << "\" y2=\"" << svg_num(yc(sorted.back())) << "\" stroke=\"black\"/>\n";
    out << "<rect x=\"" << svg_num(cx - box_w / 2) << "\" y=\"" << svg_num(yc(q3)) << "\" width=\""
        << svg_num(box_w) << "\" height=\"" << svg_num(yc(q1) - yc(q3))
        << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << svg_num(cx - box_w / 2) << "\" y1=\"" << svg_num(yc(q2)) << "\" x2=\""
        << svg_num(cx + box_w / 2) << "\" y2=\"" << svg_num(yc(q2))
        << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    const std::size_t n = devs[k].size();
    for (std::size_t i = 0; i < n; ++i) {
      const double fx = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.5;
      const double px = cx - box_w / 2 + fx * box_w;
      out << "<circle cx=\"" << svg_num(px) << "\" cy=\"" << svg_num(yc(devs[k][i]))
          << "\" r=\"2\" fill=\"#08519c\" fill-opacity=\"0.35\"/>\n";
    }
    out << "<text x=\"" << svg_num(cx) << "\" y=\"" << svg_num(top + plot_h + 18)
        << "\" text-anchor=\"middle\">" << names[k] << "</text>\n";
  }
  out << "</svg>\n";
}

void write_manifest(const std::filesystem::path& path, const char* command,
                    const ExperimentConfig& config, const json& extra) {
  json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;
  manifest["seed"] = config.seed;
  manifest["config"] = resolved_config_json(config);
  for (auto it = extra.begin(); it != extra.end(); ++it) manifest[it.key()] = it.value();
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << manifest.dump(2) << "\n";
}

}  // namespace

const char* estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::CV: return "cv";
    case EstimatorKind::ErrXdir: return "errx_dir";
    case EstimatorKind::ErrXdec: return "errx_dec";
    case EstimatorKind::ClosedFormOLS: return "closed_form";
  }
  return "?";
}

const char* scheme_name(SplitScheme scheme) {
  switch (scheme) {
    case SplitScheme::RandomHalf: return "random-half";
    case SplitScheme::GroupHalf: return "group-half";
    case SplitScheme::TwoMeansGroups: return "two-means";
  }
  return "?";
}

SplitScheme parse_scheme(const std::string& name) {
  if (name == "random-half") return SplitScheme::RandomHalf;
  if (name == "group-half") return SplitScheme::GroupHalf;
  if (name == "two-means") return SplitScheme::TwoMeansGroups;
  bad_name("split scheme", name);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const MissingColumn*>(&e) || dynamic_cast<const NonNumericFeature*>(&e) ||
      dynamic_cast<const MissingGroups*>(&e) || dynamic_cast<const TooFewGroups*>(&e) ||
      dynamic_cast<const ShapeMismatch*>(&e) || dynamic_cast<const IncompatibleLoss*>(&e) ||
      dynamic_cast<const MissingSigma*>(&e) || dynamic_cast<const InfeasibleImbalance*>(&e) ||
      dynamic_cast<const nlohmann::json::exception*>(&e))
    return 2;
  return 3;
}

ExperimentConfig validate_config(ExperimentConfig config) {
  if (config.reps < 1) throw ConfigError("reps must be >= 1");
  if (config.estimators.empty()) throw ConfigError("need at least one estimator");
  std::set<EstimatorKind> seen;
  for (EstimatorKind e : config.estimators) {
    if (e == EstimatorKind::ClosedFormOLS)
      throw ConfigError("closed_form is not a runnable estimator");
    if (!seen.insert(e).second)
      throw ConfigError(std::string("estimator '") + estimator_name(e) + "' listed twice");
  }
  if (config.dgp.has_value() && config.source.has_value())
    throw ConfigError("config cannot name both 'dgp' and 'data'");
  if (config.cv.folds < 2) throw ConfigError("cv.folds must be >= 2");
  if (config.bootstrap.B < 2) throw ConfigError("bootstrap.B must be >= 2");
  if (config.bootstrap.cap_c < 1.0) throw ConfigError("bootstrap.cap_c must be >= 1");
  return config;
}

ExperimentConfig parse_config(const json& j) {
  try {
    check_keys(j, "config", {"seed", "reps", "output", "loss", "fit", "estimators", "bootstrap",
                             "insample_method", "cv", "dgp", "data"});
    ExperimentConfig c;
    c.seed = j.value("seed", c.seed);
    c.reps = j.value("reps", c.reps);
    c.output = j.value("output", c.output);
    c.loss = parse_loss(j.value("loss", std::string("squared")));
    if (j.contains("fit")) {
      const json& f = j.at("fit");
      check_keys(f, "fit", {"algorithm", "cv_folds", "lambda_grid", "tolerance", "max_iter"});
      c.fit.algorithm = parse_algorithm(f.value("algorithm", std::string("ols")));
      c.fit.cv_folds = f.value("cv_folds", c.fit.cv_folds);
      c.fit.tolerance = f.value("tolerance", c.fit.tolerance);
      c.fit.max_iter = f.value("max_iter", c.fit.max_iter);
      if (f.contains("lambda_grid"))
        for (const auto& v : f.at("lambda_grid")) c.fit.lambda_grid.push_back(v.get<double>());
    }
    if (j.contains("estimators"))
      for (const auto& e : j.at("estimators")) c.estimators.push_back(parse_estimator(e.get<std::string>()));
    else
      c.estimators = {EstimatorKind::CV, EstimatorKind::ErrXdir, EstimatorKind::ErrXdec};
    if (j.contains("bootstrap")) {
      const json& b = j.at("bootstrap");
      check_keys(b, "bootstrap", {"B", "correction", "cap_c"});
      c.bootstrap.B = b.value("B", c.bootstrap.B);
      c.bootstrap.correction = parse_correction(b.value("correction", std::string("none")));
      c.bootstrap.cap_c = b.value("cap_c", c.bootstrap.cap_c);
    }
    if (j.contains("insample_method")) {
      const std::string m = j.at("insample_method").get<std::string>();
      if (m != "auto") c.insample = parse_insample(m);
    }
    if (j.contains("cv")) {
      const json& v = j.at("cv");
      check_keys(v, "cv", {"folds", "grouped"});
      c.cv.folds = v.value("folds", c.cv.folds);
      c.cv.grouped = v.value("grouped", c.cv.grouped);
    }
    if (j.contains("dgp")) c.dgp = parse_dgp(j.at("dgp"));
    if (j.contains("data")) c.source = parse_source(j.at("data"));
    return validate_config(std::move(c));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  ExperimentConfig config = parse_config(j);
  if (const char* env = std::getenv("SHIFTERR_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ConfigError("SHIFTERR_SEED must be an integer");
    config.seed = v;
  }
  return config;
}

json resolved_config_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["reps"] = c.reps;
  j["output"] = c.output;
  j["loss"] = loss_name(c.loss);
  j["fit"] = {{"algorithm", algorithm_name(c.fit.algorithm)},
              {"cv_folds", c.fit.cv_folds},
              {"lambda_grid", c.fit.lambda_grid},
              {"tolerance", c.fit.tolerance},
              {"max_iter", c.fit.max_iter}};
  json names = json::array();
  for (EstimatorKind e : c.estimators) names.push_back(estimator_name(e));
  j["estimators"] = names;
  j["bootstrap"] = {{"B", c.bootstrap.B},
                    {"correction", correction_name(c.bootstrap.correction)},
                    {"cap_c", c.bootstrap.cap_c}};
  j["insample_method"] = c.insample ? insample_name(*c.insample) : "auto";
  j["cv"] = {{"folds", c.cv.folds}, {"grouped", c.cv.grouped}};
  if (c.dgp) {
    const DGPSpec& d = *c.dgp;
    json g;
    g["n"] = static_cast<std::int64_t>(d.n);
    g["n_test"] = static_cast<std::int64_t>(d.n_test);
    g["p"] = static_cast<std::int64_t>(d.p);
    g["coef_count"] = d.coef_count;
    g["coef_strength"] = d.coef_strength;
    g["alternate_signs"] = d.alternate_signs;
    g["train"] = {{"mean", d.train_law.mean}, {"variance", d.train_law.variance}};
    g["test"] = {{"mean", d.test_law.mean}, {"variance", d.test_law.variance}};
    if (d.sigma) g["sigma"] = *d.sigma;
    g["misspec"] = {{"kind", misspec_name(d.misspec.kind)},
                    {"exponent", d.misspec.exponent},
                    {"fraction", d.misspec.fraction}};
    if (d.imbalance_ratio) g["imbalance_ratio"] = *d.imbalance_ratio;
    j["dgp"] = g;
  }
  if (c.source) {
    j["data"] = {{"csv", c.source->path},
                 {"outcome", c.source->outcome_column},
                 {"group", c.source->group_column},
                 {"split",
                  {{"scheme", scheme_name(c.source->split.scheme)},
                   {"seed", c.source->split.seed},
                   {"train_fraction", c.source->split.train_fraction}}}};
  }
  return j;
}

int cmd_simulate(const ExperimentConfig& config0, int jobs, std::ostream& err) {
  try {
    const ExperimentConfig config = validate_config(config0);
    if (!config.dgp && !config.source)
      throw ConfigError("simulate needs a 'dgp' or 'data' block");
    if (config.source && config.source->path.empty())
      throw ConfigError("simulate needs data.csv");
    Dataset full;
    const Dataset* full_ptr = nullptr;
    if (config.source) {
      full = load_csv(config.source->path, config.source->outcome_column,
                      config.source->group_column);
      full_ptr = &full;
    }

    std::vector<RepResult> reps(static_cast<std::size_t>(config.reps));
    parallel_for_each(reps.size(), jobs,
                      [&](std::size_t r) { reps[r] = run_one_rep(config, r, full_ptr); });
    for (const RepResult& r : reps)
      if (r.failed) {
        err << r.message << "\n";
        return r.code;
      }

    namespace fs = std::filesystem;
    const fs::path dir(config.output);
    fs::create_directories(dir);

    std::ofstream res(dir / "results.csv");
    if (!res) throw ParseError("cannot write " + (dir / "results.csv").string());
    res << "rep,estimator,estimate,true_test_error\n";
    for (std::size_t r = 0; r < reps.size(); ++r)
      for (std::size_t k = 0; k < config.estimators.size(); ++k)
        res << r << "," << estimator_name(config.estimators[k]) << ","
            << fmt_double(reps[r].estimates[k]) << "," << fmt_double(reps[r].truth) << "\n";
    res.close();

    std::vector<double> truths(reps.size());
    for (std::size_t r = 0; r < reps.size(); ++r) truths[r] = reps[r].truth;
    const double truth_mean =
        std::accumulate(truths.begin(), truths.end(), 0.0) / static_cast<double>(truths.size());

    std::ofstream sum(dir / "summary.csv");
    if (!sum) throw ParseError("cannot write " + (dir / "summary.csv").string());
    sum << "estimator,signed_bias_std,mse_std,mad_std,n_reps\n";
    std::vector<std::string> names;
    std::vector<std::vector<double>> devs;
    for (std::size_t k = 0; k < config.estimators.size(); ++k) {
      std::vector<double> est(reps.size());
      for (std::size_t r = 0; r < reps.size(); ++r) est[r] = reps[r].estimates[k];
      ComparisonRow row;
      row.estimator = estimator_name(config.estimators[k]);
      row.n_reps = static_cast<int>(reps.size());
      try {
        row.signed_bias = signed_bias_std(est, truths);
        row.mse_std = mse_std(est, truths);
        row.mad_std = mad_std(est, truths);
      } catch (const ZeroTruth&) {
        // degenerate run (mean truth not positive): leave the cells as nan
        row.signed_bias = row.mse_std = row.mad_std = std::nan("");
      }
      sum << row.estimator << "," << fmt_double(row.signed_bias) << "," << fmt_double(row.mse_std)
          << "," << fmt_double(row.mad_std) << "," << row.n_reps << "\n";
      names.push_back(row.estimator);
      std::vector<double> d(reps.size());
      for (std::size_t r = 0; r < reps.size(); ++r)
        d[r] = truth_mean > 0.0 ? (est[r] - truths[r]) / truth_mean : est[r] - truths[r];
      devs.push_back(std::move(d));
    }
    sum.close();

    write_bias_svg((dir / "plot.svg").string(), names, devs);
    write_manifest(dir / "manifest.json", "simulate", config, json{{"jobs", jobs}});
    return 0;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_estimate(const std::string& train_csv, const std::string& test_csv,
                 const ExperimentConfig& config0, const std::string& output_json, std::ostream& out,
                 std::ostream& err) {
  try {
    const ExperimentConfig config = validate_config(config0);
    std::string outcome = "y", group;
    if (config.source) {
      outcome = config.source->outcome_column;
      group = config.source->group_column;
    }
    const Dataset train = load_csv(train_csv, outcome, group);

    const std::vector<std::string> test_cols = csv_columns(test_csv);
    const bool test_has_y =
        std::find(test_cols.begin(), test_cols.end(), outcome) != test_cols.end();
    const bool test_has_group =
        !group.empty() && std::find(test_cols.begin(), test_cols.end(), group) != test_cols.end();
    const Dataset test =
        load_csv(test_csv, test_has_y ? outcome : std::string(), test_has_group ? group : std::string());
    if (test.p() != train.p())
      throw ShapeMismatch("train has " + std::to_string(train.p()) + " feature columns, test has " +
                          std::to_string(test.p()));
    if (!train.feature_names.empty() && train.feature_names != test.feature_names)
      throw ConfigError("train and test feature columns differ");

    const FitResult base = fit_model(train, config.fit);
    check_loss_compat(base.model.kind, config.loss);
    BootstrapConfig boot = config.bootstrap;
    boot.seed = config.seed;
    const InSampleMethod method =
        config.insample ? *config.insample : default_insample_method(config.fit.algorithm, config.loss);

    json values;
    const int i_dir = find_estimator(config, EstimatorKind::ErrXdir);
    const int i_dec = find_estimator(config, EstimatorKind::ErrXdec);
    if (i_dir >= 0 && i_dec >= 0) {
      const ErrxPair pair = errx_pair(train, test.X, config.fit, config.loss, boot, method);
      values["errx_dir"] = pair.dir.value;
      values["errx_dec"] = pair.dec.value;
    } else if (i_dir >= 0) {
      values["errx_dir"] = errx_dir(train, test.X, config.fit, config.loss, boot).value;
    } else if (i_dec >= 0) {
      values["errx_dec"] = errx_dec(train, test.X, config.fit, config.loss, boot, method).value;
    }
    if (find_estimator(config, EstimatorKind::CV) >= 0) {
      const FoldPlan plan = make_folds(train.n(), config.cv.folds,
                                       config.cv.grouped ? train.groups : kNoGroups, config.seed);
      values["cv"] = cv_error(train, config.fit, config.loss, plan).value;
    }

    json report;
    report["estimators"] = values;
    report["B"] = boot.B;
    report["correction"] = correction_name(boot.correction);
    report["seed"] = config.seed;
    report["version"] = kVersion;
    report["config"] = resolved_config_json(config);
    if (test.has_y()) {
      const double truth = true_test_error(base.model, test, config.loss);
      report["true_test_error"] = truth;
      json m;
      for (auto it = values.begin(); it != values.end(); ++it) {
        const std::vector<double> est{it.value().get<double>()};
        const std::vector<double> tru{truth};
        try {
          m[it.key()] = {{"signed_bias_std", signed_bias_std(est, tru)},
                         {"mse_std", mse_std(est, tru)},
                         {"mad_std", mad_std(est, tru)}};
        } catch (const ZeroTruth&) {
          m[it.key()] = nullptr;
        }
      }
      report["metrics"] = m;
    }

    out << report.dump(2) << "\n";
    if (!output_json.empty()) {
      std::ofstream f(output_json);
      if (!f) throw ParseError("cannot write " + output_json);
      f << report.dump(2) << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_split(const std::string& input_csv, const std::string& outcome_column,
              const std::string& group_column, const SplitSpec& split, const std::string& out_dir,
              std::ostream& err) {
  try {
    const Dataset data = load_csv(input_csv, outcome_column, group_column);
    std::map<std::string, int> clusters;
    const std::pair<Dataset, Dataset> parts = apply_split(data, split, &clusters);

    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    save_csv(parts.first, (dir / "train.csv").string());
    save_csv(parts.second, (dir / "test.csv").string());

    json extra;
    extra["input"] = input_csv;
    extra["scheme"] = scheme_name(split.scheme);
    extra["split_seed"] = split.seed;
    extra["train_fraction"] = split.train_fraction;
    extra["outcome_column"] = outcome_column;
    extra["group_column"] = group_column;
    extra["n_train"] = static_cast<std::int64_t>(parts.first.n());
    extra["n_test"] = static_cast<std::int64_t>(parts.second.n());
    if (split.scheme != SplitScheme::RandomHalf) {
      std::set<std::string> train_groups(parts.first.groups.begin(), parts.first.groups.end());
      std::set<std::string> all_groups(data.groups.begin(), data.groups.end());
      json assignment;
      for (const std::string& g : all_groups) {
        json entry;
        entry["side"] = train_groups.count(g) ? "train" : "test";
        if (split.scheme == SplitScheme::TwoMeansGroups) entry["cluster"] = clusters.at(g);
        assignment[g] = entry;
      }
      extra["group_assignment"] = assignment;
    }

    ExperimentConfig stub;
    stub.estimators = {EstimatorKind::CV};
    stub.seed = split.seed;
    CsvSource src;
    src.path = input_csv;
    src.outcome_column = outcome_column;
    src.group_column = group_column;
    src.split = split;
    stub.source = src;
    write_manifest(dir / "manifest.json", "split", stub, extra);
    return 0;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace shifterr
