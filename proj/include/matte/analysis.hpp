#pragma once

#include <span>
#include <variant>
#include <vector>

#include "matte/core.hpp"
#include "matte/neighbors.hpp"

namespace matte {

/// I = α·F + (1 − α)·B per pixel and channel.
ImagePlane composite(const AlphaMatte& alpha, const ImagePlane& fg, const ImagePlane& bg);

/// Foreground columns on the left, a linear 1 → 0 alpha ramp across `width`
/// columns, background on the right.
struct RampScene {
  int width = 6;
};

/// Solid foreground block on the left with a straight hair of `length`
/// pixels running right along the middle rows, colored exactly like the block.
struct HairScene {
  int length = 20;
  int thickness = 1;
};

/// Opaque foreground on the left half carrying a tiled pattern of
/// period×period distinct intensity levels spanning `amplitude` peak to peak;
/// hard boundary to the background.
struct TextureScene {
  double amplitude = 0.1;
  int period = 8;
};

struct SceneSpec {
  std::variant<RampScene, HairScene, TextureScene> kind = RampScene{};
  /// 0 selects the per-kind default canvas.
  int height = 0;
  int width = 0;
  /// 1 or 3 channels, equal length, distinct. Empty selects the per-kind
  /// default: gray 1/0 for ramps, yellow on blue for hair and texture.
  std::vector<double> fg_color;
  std::vector<double> bg_color;
  /// Chebyshev radius of the Unknown band around transitions and hair.
  int band = 1;

  void validate() const;
};

struct Scene {
  ImagePlane image;
  AlphaMatte alpha;
  Trimap trimap;
};

Scene make_scene(const SceneSpec& spec);

/// Affinely maps a sequence onto [0,1]; constant sequences become all ones.
std::vector<double> rescale_unit(std::span<const double> values);

/// values[t-1] = Σ_k coeffs[k]·t^k for t = 1..length, rescaled into [0,1].
std::vector<double> polynomial_sequence(std::span<const double> coeffs, int length);

struct BrakingReport {
  /// r_t = α_t − α_{t−K} − K(α_{t−(K−1)/2} − α_{t−(K+1)/2}), t = K+1..T.
  std::vector<double> residuals;
  /// Window-mean form (S_t − S_{t−K})/K − α_{t−(K−1)/2}, t = K..T.
  std::vector<double> window_residuals;
  double max_abs_residual = 0.0;
  /// max_t |K·(e_t − e_{t−1}) − r_t|: agreement between the two forms.
  double max_form_gap = 0.0;
};

/// Evaluates the braking recursion for a hair whose pixels average uniformly
/// over windows of size K. α is 1-indexed as in t = 1..T.
/// Throws ParameterError unless K is odd and T > K.
BrakingReport braking_residual(std::span<const double> values, int window);

struct PairBoundReport {
  Eigen::Index mutual_pairs = 0;
  /// Pairs with |α_i−α_j−d| + |α_j−α_i−d| < 2d − 1e-12.
  Eigen::Index violations = 0;
  /// Pairs with |α_i − α_j| > d + tight_tol.
  Eigen::Index non_tight = 0;
  /// min over pairs of (sum − 2d); +inf with no pairs.
  double worst_slack = 0.0;
};

/// Checks the two-sided DDC lower bound over every mutually selected pair
/// (each in the other's list). With `region`, only pairs touching it count.
PairBoundReport pair_bound_check(const ImagePlane& image, const Field& alpha, const NeighborField& field,
                                 double tight_tol = 0.0, const Mask* region = nullptr);

/// Builds the 1×2K ramp I_x = a·x + b, takes the affinity weights of the
/// pixel at x = K and returns max |w(−o) − w(+o)| over window offsets o.
double symmetry_check(int window, double slope, double offset);

}  // namespace matte
