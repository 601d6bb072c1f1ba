#pragma once

#include <cstdint>
#include <variant>

#include "matte/core.hpp"

namespace matte {

struct FixedKernel {
  int size = 1;
};

/// Kernel size drawn uniformly from the odd values in [min, max].
struct RandomKernel {
  int min = 1;
  int max = 30;
};

struct ErosionSpec {
  std::variant<FixedKernel, RandomKernel> kernel = FixedKernel{};
  /// Alpha at or below delta seeds background, at or above 1 - delta foreground.
  double delta = 1.0 / 255.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Square k×k erosion; positions outside the image count as set, so the frame
/// never erodes inward. k must be odd; k = 1 is the identity.
Mask erode_mask(const Mask& mask, int k);

/// Kernel size for one call: the fixed size, or one seeded draw.
int draw_kernel(const ErosionSpec& spec);

Trimap trimap_from_alpha(const AlphaMatte& alpha, const ErosionSpec& spec);

}  // namespace matte
