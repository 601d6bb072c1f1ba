#pragma once

#include <optional>
#include <string>

#include "matte/core.hpp"

namespace matte {

struct PixelMetrics {
  double sad = 0.0;  ///< Σ|p − g| / 1000
  double mad = 0.0;
  double mse = 0.0;
  Eigen::Index pixels = 0;
};

/// SAD/MAD/MSE over `region` (all pixels when null). Throws
/// DegenerateInputError on an empty region.
PixelMetrics pixel_metrics(const Field& pred, const Field& gt, const Mask* region = nullptr);

inline constexpr double kGradSigma = 1.4;

/// Radius of the Gaussian-derivative filters, ceil(3σ).
int grad_filter_radius(double sigma = kGradSigma);

/// First-order Gaussian-derivative filter with unit L2 norm, indexed
/// [dy + r][dx + r], differentiating along x. Transpose for y.
Field gaussian_derivative_kernel(double sigma = kGradSigma);

/// Σ(|∇pred| − |∇gt|)² / 1000 with symmetric-reflect borders. Throws
/// DegenerateInputError if either side is smaller than the 2r+1 support.
double grad_metric(const Field& pred, const Field& gt, double sigma = kGradSigma);

/// Thresholded-connectivity error over θ = 0.1, 0.2, …, 1.0 with
/// 4-connectivity, ϕ threshold 0.15, divided by 1000.
double conn_metric(const Field& pred, const Field& gt);

struct MetricReport {
  double sad = 0.0;
  double mad = 0.0;
  double mse = 0.0;
  /// Absent when the image is smaller than the filter support.
  std::optional<double> grad;
  double conn = 0.0;
  /// Absent when the trimap has no Unknown pixels.
  std::optional<double> sad_t;
  std::optional<double> mse_t;
  Eigen::Index pixels = 0;
  Eigen::Index unknown_pixels = 0;

  bool operator==(const MetricReport&) const = default;
};

MetricReport evaluate(const Field& pred, const Field& gt, const Trimap& trimap);

/// JSON object with the seven metric fields (null when absent) and counts.
std::string to_json(const MetricReport& report);
MetricReport report_from_json(const std::string& text);

}  // namespace matte
