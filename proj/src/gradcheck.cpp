#include "matte/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace matte {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(const void* p, const char* what) {
  if (p == nullptr) throw ParameterError(std::string("gradient check needs ") + what);
}

double neighbor_alpha(const Field& alpha, std::int32_t j) {
  return j == NeighborField::kPadded ? 0.0 : alpha.data()[j];
}

}  // namespace

GradientCheck check_gradient(const Objective& objective, const Field& alpha, double h, const Field* kink_margin) {
  if (!(h > 1e-8 && h < 1e-3)) throw ParameterError("finite-difference step must lie in (1e-8, 1e-3)");
  const LossResult base = objective(alpha);
  require_same_shape(alpha, base.gradient, "gradient");
  if (kink_margin) require_same_shape(alpha, *kink_margin, "kink margin");

  GradientCheck out;
  Field probe = alpha;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (kink_margin && kink_margin->data()[i] < 10.0 * h) {
      ++out.skipped;
      continue;
    }
    const double saved = probe.data()[i];
    probe.data()[i] = saved + h;
    const double up = objective(probe).value;
    probe.data()[i] = saved - h;
    const double down = objective(probe).value;
    probe.data()[i] = saved;

    const double fd = (up - down) / (2.0 * h);
    const double g = base.gradient.data()[i];
    const double denom = std::max({std::abs(g), std::abs(fd), 1e-6});
    out.max_relative_error = std::max(out.max_relative_error, std::abs(g - fd) / denom);
    ++out.checked;
  }
  return out;
}

Field kink_margin(LossKind kind, const Field& alpha, const LossInputs& inputs) {
  Field margin = Field::Constant(alpha.rows(), alpha.cols(), kInf);
  double* m = margin.data();
  const double* a = alpha.data();
  auto touch = [&](Eigen::Index i, std::int32_t j, double r) {
    m[i] = std::min(m[i], r);
    if (j != NeighborField::kPadded) m[j] = std::min(m[j], r);
  };

  switch (kind) {
    case LossKind::Known: {
      require(inputs.trimap, "a trimap");
      const bool all = inputs.known.labels == LabelMode::MaskAllPixels;
      const double eps = inputs.known.bce_epsilon;
      for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        const Label l = (*inputs.trimap)[i];
        if (l == Label::Unknown && !all) continue;
        if (inputs.known.penalty == KnownPenalty::L1) {
          m[i] = std::abs(a[i] - (l == Label::Background ? 0.0 : 1.0));
        } else {
          m[i] = std::min(std::abs(a[i] - eps), std::abs(a[i] - (1.0 - eps)));
        }
      }
      break;
    }
    case LossKind::Affinity: {
      require(inputs.field, "a neighbor field");
      const auto& f = *inputs.field;
      for (Eigen::Index i = 0; i < f.pixels(); ++i) {
        double r = -a[i];
        for (Eigen::Index t = f.begin(i); t < f.end(i); ++t)
          r += inputs.weights[static_cast<std::size_t>(t)] * neighbor_alpha(alpha, f.neighbor(t));
        m[i] = std::min(m[i], std::abs(r));
        for (Eigen::Index t = f.begin(i); t < f.end(i); ++t) touch(i, f.neighbor(t), std::abs(r));
      }
      break;
    }
    case LossKind::DC:
    case LossKind::DDC: {
      require(inputs.field, "a neighbor field");
      const auto& f = *inputs.field;
      for (Eigen::Index i = 0; i < f.pixels(); ++i) {
        for (Eigen::Index t = f.begin(i); t < f.end(i); ++t) {
          const std::int32_t j = f.neighbor(t);
          if (j == i) continue;  // self terms are identically zero
          const double delta = a[i] - neighbor_alpha(alpha, j);
          const double d = f.distance(t);
          const double r = kind == LossKind::DDC ? std::abs(delta - d)
                                                 : std::min(std::abs(delta), std::abs(std::abs(delta) - d));
          touch(i, j, r);
        }
      }
      break;
    }
  }
  return margin;
}

Objective make_objective(LossKind kind, const LossInputs& inputs) {
  switch (kind) {
    case LossKind::Known:
      require(inputs.trimap, "a trimap");
      return [inputs](const Field& a) { return known_loss(a, *inputs.trimap, inputs.known); };
    case LossKind::Affinity:
      require(inputs.field, "a neighbor field");
      return [inputs](const Field& a) {
        return affinity_loss(a, *inputs.field, inputs.weights, inputs.normalization);
      };
    case LossKind::DC:
      require(inputs.field, "a neighbor field");
      return [inputs](const Field& a) { return dc_loss(a, *inputs.field, inputs.normalization); };
    case LossKind::DDC:
      require(inputs.field, "a neighbor field");
      return [inputs](const Field& a) { return ddc_loss(a, *inputs.field, inputs.normalization); };
  }
  throw ParameterError("unknown loss kind");
}

GradientCheck check_gradient(LossKind kind, const Field& alpha, const LossInputs& inputs, double h) {
  const Field margin = kink_margin(kind, alpha, inputs);
  return check_gradient(make_objective(kind, inputs), alpha, h, &margin);
}

}  // namespace matte
