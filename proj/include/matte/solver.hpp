#pragma once

#include <cstdint>
#include <vector>

#include "matte/losses.hpp"
#include "matte/neighbors.hpp"

namespace matte {

/// Cosine decays η to 0 over max_iters, which settles the subgradient jitter.
enum class StepSchedule { Constant, Cosine };

struct SolverConfig {
  int window = 11;
  double lambda = 10.0;
  double step_size = 0.05;
  double momentum = 0.9;
  StepSchedule schedule = StepSchedule::Cosine;
  int max_iters = 2000;
  double convergence_tol = 1e-7;
  int trace_every = 10;
  Padding padding = Padding::Valid;
  Normalization normalization = Normalization::Reference;
  KnownLossSpec known;
  /// Recorded for reproducibility; the solve itself draws no random numbers.
  std::uint64_t seed = 0;

  void validate() const;
};

struct TracePoint {
  int iteration = 0;
  double total = 0.0;
  double known = 0.0;
  /// Affinity, DC or DDC loss depending on the policy (0 for Known).
  double regularizer = 0.0;
  double max_gradient = 0.0;
};

using SolveTrace = std::vector<TracePoint>;

struct SolveResult {
  AlphaMatte alpha;
  SolveTrace trace;
  int iterations = 0;
  bool converged = false;
  /// The trimap had no known pixels, so only the regularizer acted.
  bool unanchored = false;
};

/// 1 on Foreground, 0 on Background, 0.5 on Unknown.
AlphaMatte init_alpha(const Trimap& trimap);

/// Projected subgradient descent with Nesterov-style momentum on
/// known + λ·regularizer, starting from init_alpha. Every pixel is optimized.
/// Throws NumericalError if the loss or gradient stops being finite.
SolveResult solve(const ImagePlane& image, const Trimap& trimap, const SolverConfig& config,
                  LossPolicy policy = LossPolicy::KnownDDC);

}  // namespace matte
