#pragma once

#include <cstdint>
#include <vector>

namespace shifterr {

/// Bias-correction mode for bootstrap error estimation.  Multiplicative
/// rescales the final estimate by ||theta_hat||^2 / mean_b ||theta^(b)||^2;
/// RelaxedLasso swaps the outcome-generating model for an unpenalized refit
/// on the selected support.
enum class Correction { None, Multiplicative, RelaxedLasso };

struct BootstrapConfig {
  int B = 500;
  std::uint64_t seed = 0;
  Correction correction = Correction::None;
  double cap_c = 5.0;
  // Worker threads for the replicate loop; results are bit-identical for
  // any value (per-replicate RNG substreams, fixed-order reduction).
  int jobs = 1;
};

enum class EstimatorKind { ErrXdir, ErrXdec, CV, ClosedFormOLS };

struct ErrorEstimate {
  double value = 0.0;
  std::vector<double> replicate_values;
  EstimatorKind estimator = EstimatorKind::ErrXdir;
  double correction_factor = 1.0;
};

}  // namespace shifterr
