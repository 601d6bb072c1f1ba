#include "matte/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include <json.hpp>

namespace matte {

namespace {

Eigen::Index reflect(Eigen::Index i, Eigen::Index n) {
  // Symmetric reflection (d c b a | a b c d | d c b a), folded until in range.
  const Eigen::Index period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

// Correlation with the 2-D kernel col_taps(dy)·row_taps(dx).
Field separable_filter(const Field& f, const Eigen::ArrayXd& row_taps, const Eigen::ArrayXd& col_taps) {
  const Eigen::Index r = row_taps.size() / 2;
  const Eigen::Index rows = f.rows();
  const Eigen::Index cols = f.cols();
  Field tmp(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y)
    for (Eigen::Index x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (Eigen::Index k = -r; k <= r; ++k) acc += row_taps(k + r) * f(y, reflect(x + k, cols));
      tmp(y, x) = acc;
    }
  Field out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y)
    for (Eigen::Index x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (Eigen::Index k = -r; k <= r; ++k) acc += col_taps(k + r) * tmp(reflect(y + k, rows), x);
      out(y, x) = acc;
    }
  return out;
}

struct Taps {
  Eigen::ArrayXd gauss;
  Eigen::ArrayXd deriv;
};

Taps derivative_taps(double sigma) {
  const int r = grad_filter_radius(sigma);
  Taps t{Eigen::ArrayXd(2 * r + 1), Eigen::ArrayXd(2 * r + 1)};
  for (int k = -r; k <= r; ++k) {
    const double g = std::exp(-k * k / (2.0 * sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    t.gauss(k + r) = g;
    t.deriv(k + r) = -k * g / (sigma * sigma);
  }
  // Unit L2 norm of the 2-D kernel gauss(y)·deriv(x).
  const double norm = std::sqrt(t.gauss.square().sum() * t.deriv.square().sum());
  t.deriv /= norm;
  return t;
}

Field gradient_magnitude(const Field& f, const Taps& taps) {
  const Field gx = separable_filter(f, taps.deriv, taps.gauss);
  const Field gy = separable_filter(f, taps.gauss, taps.deriv);
  return (gx.square() + gy.square()).sqrt();
}

// Largest 4-connected component of `mask`; ties go to the component found
// first in scan order, i.e. the one with the smallest minimum index.
Mask largest_component(const Mask& mask) {
  const Eigen::Index rows = mask.rows();
  const Eigen::Index cols = mask.cols();
  std::vector<int> label(static_cast<std::size_t>(mask.size()), -1);
  std::vector<Eigen::Index> stack;
  int best = -1;
  std::size_t best_size = 0;
  int next = 0;
  for (Eigen::Index s = 0; s < mask.size(); ++s) {
    if (!mask.data()[s] || label[static_cast<std::size_t>(s)] >= 0) continue;
    std::size_t size = 0;
    stack.assign(1, s);
    label[static_cast<std::size_t>(s)] = next;
    while (!stack.empty()) {
      const Eigen::Index p = stack.back();
      stack.pop_back();
      ++size;
      const Eigen::Index y = p / cols;
      const Eigen::Index x = p % cols;
      const Eigen::Index nbrs[4] = {y > 0 ? p - cols : -1, y + 1 < rows ? p + cols : -1, x > 0 ? p - 1 : -1,
                                    x + 1 < cols ? p + 1 : -1};
      for (Eigen::Index q : nbrs) {
        if (q < 0 || !mask.data()[q] || label[static_cast<std::size_t>(q)] >= 0) continue;
        label[static_cast<std::size_t>(q)] = next;
        stack.push_back(q);
      }
    }
    if (size > best_size) {
      best_size = size;
      best = next;
    }
    ++next;
  }
  Mask out = Mask::Constant(rows, cols, false);
  for (Eigen::Index i = 0; i < mask.size(); ++i) out.data()[i] = best >= 0 && label[static_cast<std::size_t>(i)] == best;
  return out;
}

}  // namespace

PixelMetrics pixel_metrics(const Field& pred, const Field& gt, const Mask* region) {
  require_same_shape(pred, gt, "prediction vs ground truth");
  const Field diff = pred - gt;
  PixelMetrics m;
  if (region == nullptr) {
    m.pixels = diff.size();
    m.sad = diff.abs().sum() / 1000.0;
    m.mad = diff.abs().mean();
    m.mse = diff.square().mean();
    return m;
  }
  if (region->rows() != pred.rows() || region->cols() != pred.cols())
    throw ParameterError("dimension mismatch: region mask");
  m.pixels = region->count();
  if (m.pixels == 0) throw DegenerateInputError("metric region is empty");
  const double abs_sum = region->select(diff.abs(), 0.0).sum();
  m.sad = abs_sum / 1000.0;
  m.mad = abs_sum / static_cast<double>(m.pixels);
  m.mse = region->select(diff.square(), 0.0).sum() / static_cast<double>(m.pixels);
  return m;
}

int grad_filter_radius(double sigma) { return static_cast<int>(std::ceil(3.0 * sigma)); }

Field gaussian_derivative_kernel(double sigma) {
  const Taps t = derivative_taps(sigma);
  return (t.gauss.matrix() * t.deriv.matrix().transpose()).array();
}

double grad_metric(const Field& pred, const Field& gt, double sigma) {
  require_same_shape(pred, gt, "prediction vs ground truth");
  const int support = 2 * grad_filter_radius(sigma) + 1;
  if (pred.rows() < support || pred.cols() < support)
    throw DegenerateInputError("image is smaller than the " + std::to_string(support) + "-pixel gradient filter support");
  const Taps taps = derivative_taps(sigma);
  return (gradient_magnitude(pred, taps) - gradient_magnitude(gt, taps)).square().sum() / 1000.0;
}

double conn_metric(const Field& pred, const Field& gt) {
  require_same_shape(pred, gt, "prediction vs ground truth");
  Field level = Field::Zero(pred.rows(), pred.cols());
  for (int k = 1; k <= 10; ++k) {
    const double theta = k / 10.0;
    const Mask omega = largest_component((pred >= theta) && (gt >= theta));
    level = omega.select(theta, level);
  }
  auto phi = [&](const Field& v) -> Field {
    const Field d = v - level;
    return (d >= 0.15).select(1.0 - d, 1.0);
  };
  // Row-major accumulation keeps the value independent of vectorization width.
  const Field diff = (phi(pred) - phi(gt)).abs();
  return std::accumulate(diff.data(), diff.data() + diff.size(), 0.0) / 1000.0;
}

MetricReport evaluate(const Field& pred, const Field& gt, const Trimap& trimap) {
  require_same_shape(pred, gt, "prediction vs ground truth");
  if (trimap.height() != pred.rows() || trimap.width() != pred.cols())
    throw ParameterError("dimension mismatch: trimap");

  MetricReport r;
  const PixelMetrics whole = pixel_metrics(pred, gt);
  r.sad = whole.sad;
  r.mad = whole.mad;
  r.mse = whole.mse;
  r.pixels = whole.pixels;
  try {
    r.grad = grad_metric(pred, gt);
  } catch (const DegenerateInputError&) {
    r.grad.reset();
  }
  r.conn = conn_metric(pred, gt);

  const RegionMasks masks = region_masks(trimap);
  r.unknown_pixels = masks.unknown.count();
  if (r.unknown_pixels > 0) {
    const PixelMetrics t = pixel_metrics(pred, gt, &masks.unknown);
    r.sad_t = t.sad;
    r.mse_t = t.mse;
  }
  return r;
}

std::string to_json(const MetricReport& report) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  const nlohmann::json j = {
      {"sad", report.sad},       {"mad", report.mad},
      {"mse", report.mse},       {"grad", opt(report.grad)},
      {"conn", report.conn},     {"sad_t", opt(report.sad_t)},
      {"mse_t", opt(report.mse_t)}, {"pixels", report.pixels},
      {"unknown_pixels", report.unknown_pixels},
  };
  return j.dump(2);
}

MetricReport report_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  auto opt = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  MetricReport r;
  r.sad = j.at("sad").get<double>();
  r.mad = j.at("mad").get<double>();
  r.mse = j.at("mse").get<double>();
  r.grad = opt("grad");
  r.conn = j.at("conn").get<double>();
  r.sad_t = opt("sad_t");
  r.mse_t = opt("mse_t");
  r.pixels = j.at("pixels").get<Eigen::Index>();
  r.unknown_pixels = j.at("unknown_pixels").get<Eigen::Index>();
  return r;
}

}  // namespace matte
