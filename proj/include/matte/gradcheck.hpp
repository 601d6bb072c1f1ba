#pragma once

#include <functional>
#include <span>

#include "matte/losses.hpp"

namespace matte {

struct GradientCheck {
  double max_relative_error = 0.0;
  Eigen::Index checked = 0;
  /// Coordinates within 10h of a subgradient kink.
  Eigen::Index skipped = 0;
};

using Objective = std::function<LossResult(const Field&)>;

/// Compares the analytical gradient against central differences
/// (L(α+h·e_i) − L(α−h·e_i)) / 2h. Coordinates whose `kink_margin` is below
/// 10h are skipped. Relative error is |g − fd| / max(|g|, |fd|, 1e-6).
/// Throws ParameterError unless 1e-8 < h < 1e-3.
GradientCheck check_gradient(const Objective& objective, const Field& alpha, double h,
                             const Field* kink_margin = nullptr);

enum class LossKind { Known, Affinity, DC, DDC };

struct LossInputs {
  const Trimap* trimap = nullptr;
  const NeighborField* field = nullptr;
  std::span<const double> weights;
  Normalization normalization = Normalization::Reference;
  KnownLossSpec known;
};

/// Per-coordinate distance to the nearest kink: the smallest |residual| over
/// every absolute-value term that reads the coordinate.
Field kink_margin(LossKind kind, const Field& alpha, const LossInputs& inputs);

Objective make_objective(LossKind kind, const LossInputs& inputs);

GradientCheck check_gradient(LossKind kind, const Field& alpha, const LossInputs& inputs, double h);

}  // namespace matte
