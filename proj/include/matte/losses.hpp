#pragma once

#include <span>
#include <vector>

#include "matte/core.hpp"
#include "matte/neighbors.hpp"

namespace matte {

/// How pairwise losses are averaged.
enum class Normalization {
  Reference,  ///< mean over every (pixel, neighbor) term
  PerPixel,   ///< (1/N) · Σ_i Σ_j, per-pixel sums averaged over pixels
};

enum class KnownPenalty { L1, BCE };

enum class LabelMode {
  TrimapKnownOnly,  ///< supervise only Foreground/Background pixels
  MaskAllPixels,    ///< supervise every pixel; Unknown binarizes to Foreground
};

struct KnownLossSpec {
  KnownPenalty penalty = KnownPenalty::L1;
  LabelMode labels = LabelMode::TrimapKnownOnly;
  double bce_epsilon = 1e-6;

  void validate() const;
};

struct LossResult {
  double value = 0.0;
  Field gradient;
  /// Set when the loss had nothing to supervise (all-Unknown trimap).
  bool degenerate = false;
};

/// Mean penalty over supervised pixels. With L1 on known pixels this is the
/// whole-image mean scaled by N / N_known.
LossResult known_loss(const Field& alpha, const Trimap& trimap, const KnownLossSpec& spec = {});

/// Mean of |Σ_j w_ij α_j − α_i|. Both modes divide by N.
LossResult affinity_loss(const Field& alpha, const NeighborField& field, std::span<const double> weights,
                         Normalization mode = Normalization::Reference);

/// Terms | |α_i − α_j| − d_ij |.
LossResult dc_loss(const Field& alpha, const NeighborField& field, Normalization mode = Normalization::Reference);

/// Terms |α_i − α_j − d_ij|, i the window center.
LossResult ddc_loss(const Field& alpha, const NeighborField& field, Normalization mode = Normalization::Reference);

enum class LossPolicy { Known, KnownAffinity, KnownDC, KnownDDC };

struct TotalLossSpec {
  double lambda = 10.0;
  LossPolicy policy = LossPolicy::KnownDDC;
  Normalization normalization = Normalization::Reference;
  KnownLossSpec known;

  void validate() const;
};

struct TotalLoss {
  double value = 0.0;
  double known = 0.0;
  double regularizer = 0.0;
  Field gradient;
  bool unanchored = false;
};

/// known + λ·regularizer, the regularizer chosen by `spec.policy` and applied
/// to the whole matte. `weights` is only read for the affinity policy; pass an
/// empty span to have it computed from the field.
TotalLoss total_loss(const Field& alpha, const Trimap& trimap, const NeighborField& field, const TotalLossSpec& spec,
                     std::span<const double> weights = {});

}  // namespace matte
