#include "matte/solver.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

namespace matte {

namespace {

constexpr int kConvergenceWindow = 10;

TracePoint trace_point(int iteration, const TotalLoss& loss) {
  return {iteration, loss.value, loss.known, loss.regularizer, loss.gradient.abs().maxCoeff()};
}

double step_at(const SolverConfig& config, int it) {
  if (config.schedule == StepSchedule::Constant) return config.step_size;
  return config.step_size * 0.5 * (1.0 + std::cos(std::numbers::pi * it / config.max_iters));
}

}  // namespace

void SolverConfig::validate() const {
  if (window < 3 || window % 2 == 0) throw ParameterError("window must be an odd integer >= 3");
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  if (!(step_size > 0.0)) throw ParameterError("step size must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ParameterError("momentum must lie in [0, 1)");
  if (max_iters < 0) throw ParameterError("max_iters must be non-negative");
  if (!(convergence_tol > 0.0)) throw ParameterError("convergence tolerance must be positive");
  if (trace_every < 1) throw ParameterError("trace_every must be >= 1");
  known.validate();
}

AlphaMatte init_alpha(const Trimap& trimap) {
  Field a(trimap.height(), trimap.width());
  for (Eigen::Index i = 0; i < trimap.size(); ++i) a.data()[i] = label_value(trimap[i]);
  return AlphaMatte(std::move(a));
}

SolveResult solve(const ImagePlane& image, const Trimap& trimap, const SolverConfig& config, LossPolicy policy) {
  config.validate();
  if (image.height() != trimap.height() || image.width() != trimap.width())
    throw ParameterError("image and trimap dimensions differ");

  const NeighborField field = build_neighbor_field(image, config.window, config.padding);
  const std::vector<double> weights =
      policy == LossPolicy::KnownAffinity ? affinity_weights(field) : std::vector<double>{};
  const TotalLossSpec spec{config.lambda, policy, config.normalization, config.known};

  Field alpha = init_alpha(trimap).values();
  Field velocity = Field::Zero(alpha.rows(), alpha.cols());
  std::deque<double> recent;

  SolveResult result;
  int it = 0;
  for (;; ++it) {
    TotalLoss loss = total_loss(alpha, trimap, field, spec, weights);
    if (!std::isfinite(loss.value) || !loss.gradient.isFinite().all())
      throw NumericalError("non-finite loss or gradient at iteration " + std::to_string(it));
    result.unanchored = loss.unanchored;

    const bool last = it == config.max_iters;
    if (it % config.trace_every == 0 || last || loss.value == 0.0) result.trace.push_back(trace_point(it, loss));

    if (loss.value == 0.0) {
      result.converged = true;
      break;
    }
    recent.push_back(loss.value);
    if (static_cast<int>(recent.size()) > kConvergenceWindow) {
      const double before = recent.front();
      recent.pop_front();
      if (std::abs(before - loss.value) < config.convergence_tol * std::max(std::abs(before), std::numeric_limits<double>::min())) {
        result.converged = true;
        if (result.trace.back().iteration != it) result.trace.push_back(trace_point(it, loss));
        break;
      }
    }
    if (last) break;

    velocity = config.momentum * velocity + loss.gradient;
    const double eta = step_at(config, it);
    alpha = (alpha - eta * (config.momentum * velocity + loss.gradient)).cwiseMax(0.0).cwiseMin(1.0);
  }
  result.iterations = it;
  result.alpha = AlphaMatte(std::move(alpha));
  return result;
}

}  // namespace matte
