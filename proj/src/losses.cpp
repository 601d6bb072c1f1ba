#include "matte/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "matte/parallel.hpp"

namespace matte {

namespace {

constexpr double sign(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

void require_matches(const Field& alpha, int height, int width, const char* what) {
  if (alpha.rows() != height || alpha.cols() != width)
    throw ParameterError(std::string("alpha dimensions do not match the ") + what);
}

double neighbor_alpha(const double* a, std::int32_t j) {
  return j == NeighborField::kPadded ? 0.0 : a[j];
}

double chunk_sum(const std::vector<double>& partial) {
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

// Shared driver for the two pairwise losses. `term(ai, aj, d)` returns the
// term value and its derivative with respect to ai; the derivative with
// respect to aj is the negation.
template <typename Term>
LossResult pairwise_loss(const Field& alpha, const NeighborField& field, Normalization mode, Term term) {
  require_matches(alpha, field.height(), field.width(), "neighbor field");
  const double* a = alpha.data();
  const int height = field.height();
  const int width = field.width();
  const std::size_t chunks = row_chunks(height);

  std::vector<double> coef(static_cast<std::size_t>(field.terms()));
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    const Eigen::Index p0 = static_cast<Eigen::Index>(c) * kRowsPerChunk * width;
    const Eigen::Index p1 = std::min<Eigen::Index>(field.pixels(), p0 + static_cast<Eigen::Index>(kRowsPerChunk) * width);
    double acc = 0.0;
    for (Eigen::Index i = p0; i < p1; ++i) {
      for (Eigen::Index t = field.begin(i); t < field.end(i); ++t) {
        const auto [v, g] = term(a[i], neighbor_alpha(a, field.neighbor(t)), field.distance(t));
        coef[static_cast<std::size_t>(t)] = g;
        acc += v;
      }
    }
    partial[c] = acc;
  });

  const double norm = mode == Normalization::Reference ? static_cast<double>(field.terms())
                                                       : static_cast<double>(field.pixels());
  LossResult out;
  out.value = chunk_sum(partial) / norm;
  out.gradient = Field::Zero(height, width);
  double* g = out.gradient.data();
  parallel_for(chunks, [&](std::size_t c) {
    const Eigen::Index p0 = static_cast<Eigen::Index>(c) * kRowsPerChunk * width;
    const Eigen::Index p1 = std::min<Eigen::Index>(field.pixels(), p0 + static_cast<Eigen::Index>(kRowsPerChunk) * width);
    for (Eigen::Index k = p0; k < p1; ++k) {
      double acc = 0.0;
      for (Eigen::Index t = field.begin(k); t < field.end(k); ++t) acc += coef[static_cast<std::size_t>(t)];
      for (std::int64_t t : field.referencing(k)) acc -= coef[static_cast<std::size_t>(t)];
      g[k] = acc / norm;
    }
  });
  return out;
}

}  // namespace

void KnownLossSpec::validate() const {
  if (!(bce_epsilon > 0.0 && bce_epsilon < 0.5)) throw ParameterError("BCE epsilon must lie in (0, 0.5)");
}

void TotalLossSpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be a positive finite number");
  known.validate();
}

LossResult known_loss(const Field& alpha, const Trimap& trimap, const KnownLossSpec& spec) {
  spec.validate();
  require_matches(alpha, trimap.height(), trimap.width(), "trimap");
  const bool all_pixels = spec.labels == LabelMode::MaskAllPixels;
  const double eps = spec.bce_epsilon;

  LossResult out;
  out.gradient = Field::Zero(alpha.rows(), alpha.cols());
  const Eigen::Index count = all_pixels ? trimap.size() : trimap.known_count();
  if (count == 0) {
    out.degenerate = true;
    return out;
  }

  const double* a = alpha.data();
  double* g = out.gradient.data();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < trimap.size(); ++i) {
    const Label l = trimap[i];
    if (l == Label::Unknown && !all_pixels) continue;
    const double target = l == Label::Background ? 0.0 : 1.0;
    if (spec.penalty == KnownPenalty::L1) {
      sum += std::abs(a[i] - target);
      g[i] = sign(a[i] - target);
    } else {
      const double clamped = std::clamp(a[i], eps, 1.0 - eps);
      sum -= target * std::log(clamped) + (1.0 - target) * std::log(1.0 - clamped);
      g[i] = (a[i] > eps && a[i] < 1.0 - eps) ? (clamped - target) / (clamped * (1.0 - clamped)) : 0.0;
    }
  }
  const double scale = 1.0 / static_cast<double>(count);
  out.value = sum * scale;
  out.gradient *= scale;
  return out;
}

LossResult affinity_loss(const Field& alpha, const NeighborField& field, std::span<const double> weights,
                         Normalization /*mode*/) {
  require_matches(alpha, field.height(), field.width(), "neighbor field");
  if (static_cast<Eigen::Index>(weights.size()) != field.terms())
    throw ParameterError("affinity weights do not match the neighbor field");
  const double* a = alpha.data();
  const int width = field.width();
  const std::size_t chunks = row_chunks(field.height());
  const Eigen::Index n = field.pixels();

  std::vector<double> residual_sign(static_cast<std::size_t>(n));
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    const Eigen::Index p0 = static_cast<Eigen::Index>(c) * kRowsPerChunk * width;
    const Eigen::Index p1 = std::min<Eigen::Index>(n, p0 + static_cast<Eigen::Index>(kRowsPerChunk) * width);
    double acc = 0.0;
    for (Eigen::Index i = p0; i < p1; ++i) {
      double mix = 0.0;
      for (Eigen::Index t = field.begin(i); t < field.end(i); ++t)
        mix += weights[static_cast<std::size_t>(t)] * neighbor_alpha(a, field.neighbor(t));
      const double r = mix - a[i];
      residual_sign[static_cast<std::size_t>(i)] = sign(r);
      acc += std::abs(r);
    }
    partial[c] = acc;
  });

  const double norm = static_cast<double>(n);
  LossResult out;
  out.value = chunk_sum(partial) / norm;
  out.gradient = Field::Zero(field.height(), width);
  double* g = out.gradient.data();
  parallel_for(chunks, [&](std::size_t c) {
    const Eigen::Index p0 = static_cast<Eigen::Index>(c) * kRowsPerChunk * width;
    const Eigen::Index p1 = std::min<Eigen::Index>(n, p0 + static_cast<Eigen::Index>(kRowsPerChunk) * width);
    for (Eigen::Index k = p0; k < p1; ++k) {
      double acc = -residual_sign[static_cast<std::size_t>(k)];
      for (std::int64_t t : field.referencing(k))
        acc += residual_sign[static_cast<std::size_t>(field.owner(t))] * weights[static_cast<std::size_t>(t)];
      g[k] = acc / norm;
    }
  });
  return out;
}

LossResult dc_loss(const Field& alpha, const NeighborField& field, Normalization mode) {
  return pairwise_loss(alpha, field, mode, [](double ai, double aj, double d) {
    const double delta = ai - aj;
    const double r = std::abs(delta) - d;
    return std::pair{std::abs(r), sign(r) * sign(delta)};
  });
}

LossResult ddc_loss(const Field& alpha, const NeighborField& field, Normalization mode) {
  return pairwise_loss(alpha, field, mode, [](double ai, double aj, double d) {
    const double r = ai - aj - d;
    return std::pair{std::abs(r), sign(r)};
  });
}

TotalLoss total_loss(const Field& alpha, const Trimap& trimap, const NeighborField& field, const TotalLossSpec& spec,
                     std::span<const double> weights) {
  spec.validate();
  LossResult known = known_loss(alpha, trimap, spec.known);

  TotalLoss out;
  out.known = known.value;
  out.unanchored = known.degenerate;
  out.gradient = std::move(known.gradient);

  LossResult reg;
  switch (spec.policy) {
    case LossPolicy::Known:
      require_matches(alpha, field.height(), field.width(), "neighbor field");
      out.value = out.known;
      return out;
    case LossPolicy::KnownAffinity:
      if (weights.empty()) {
        const auto w = affinity_weights(field);
        reg = affinity_loss(alpha, field, w, spec.normalization);
      } else {
        reg = affinity_loss(alpha, field, weights, spec.normalization);
      }
      break;
    case LossPolicy::KnownDC:
      reg = dc_loss(alpha, field, spec.normalization);
      break;
    case LossPolicy::KnownDDC:
      reg = ddc_loss(alpha, field, spec.normalization);
      break;
  }
  out.regularizer = reg.value;
  out.value = out.known + spec.lambda * reg.value;
  out.gradient += spec.lambda * reg.gradient;
  return out;
}

}  // namespace matte
