#include "matte/trimap.hpp"

#include <algorithm>
#include <random>

namespace matte {

void ErosionSpec::validate() const {
  if (!(delta > 0.0 && delta < 0.5)) throw ParameterError("binarize delta must lie in (0, 0.5)");
  if (const auto* f = std::get_if<FixedKernel>(&kernel)) {
    if (f->size < 1) throw ParameterError("erosion kernel size must be >= 1");
    if (f->size % 2 == 0) throw ParameterError("erosion kernel size must be odd, got " + std::to_string(f->size));
  } else {
    const auto& r = std::get<RandomKernel>(kernel);
    if (r.min < 1 || r.min > r.max) throw ParameterError("erosion kernel range must satisfy 1 <= min <= max");
    if (r.min == r.max && r.min % 2 == 0) throw ParameterError("erosion kernel range contains no odd size");
  }
}

Mask erode_mask(const Mask& mask, int k) {
  if (k < 1 || k % 2 == 0) throw ParameterError("erosion kernel size must be odd and >= 1, got " + std::to_string(k));
  const int half = k / 2;
  const Eigen::Index rows = mask.rows();
  const Eigen::Index cols = mask.cols();

  // Separable: a square window is all-set iff every row segment is.
  Mask horizontal(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Eigen::Index c0 = std::max<Eigen::Index>(0, c - half);
      const Eigen::Index c1 = std::min<Eigen::Index>(cols - 1, c + half);
      horizontal(r, c) = mask.row(r).segment(c0, c1 - c0 + 1).all();
    }
  }
  Mask out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index r0 = std::max<Eigen::Index>(0, r - half);
    const Eigen::Index r1 = std::min<Eigen::Index>(rows - 1, r + half);
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = horizontal.col(c).segment(r0, r1 - r0 + 1).all();
  }
  return out;
}

int draw_kernel(const ErosionSpec& spec) {
  spec.validate();
  if (const auto* f = std::get_if<FixedKernel>(&spec.kernel)) return f->size;
  const auto& r = std::get<RandomKernel>(spec.kernel);
  const int first = r.min % 2 == 1 ? r.min : r.min + 1;
  const int last = r.max % 2 == 1 ? r.max : r.max - 1;
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> pick(0, (last - first) / 2);
  return first + 2 * pick(rng);
}

Trimap trimap_from_alpha(const AlphaMatte& alpha, const ErosionSpec& spec) {
  const int k = draw_kernel(spec);
  const Field& a = alpha.values();
  const Mask fg = erode_mask(a >= 1.0 - spec.delta, k);
  const Mask bg = erode_mask(a <= spec.delta, k);

  std::vector<Label> labels(static_cast<std::size_t>(a.size()), Label::Unknown);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (fg.data()[i]) labels[static_cast<std::size_t>(i)] = Label::Foreground;
    else if (bg.data()[i]) labels[static_cast<std::size_t>(i)] = Label::Background;
  }
  return Trimap(alpha.height(), alpha.width(), std::move(labels));
}

}  // namespace matte
