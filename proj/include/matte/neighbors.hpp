#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "matte/core.hpp"

namespace matte {

enum class Padding {
  Valid,    ///< out-of-image window positions are not candidates
  ZeroPad,  ///< out-of-image positions are candidates with zero color and zero alpha
};

/// Per-pixel top-K most similar pixels inside the K×K window centered at the
/// pixel. Entries are stored as one flat list of terms; term t of pixel i
/// lives in [begin(i), end(i)).
class NeighborField {
 public:
  /// Neighbor index of a zero-padded, out-of-image candidate.
  static constexpr std::int32_t kPadded = -1;

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  int window() const { return window_; }
  Padding padding() const { return padding_; }
  Eigen::Index pixels() const { return static_cast<Eigen::Index>(offsets_.size()) - 1; }
  Eigen::Index terms() const { return static_cast<Eigen::Index>(index_.size()); }

  Eigen::Index begin(Eigen::Index i) const { return offsets_[static_cast<std::size_t>(i)]; }
  Eigen::Index end(Eigen::Index i) const { return offsets_[static_cast<std::size_t>(i) + 1]; }
  Eigen::Index length(Eigen::Index i) const { return end(i) - begin(i); }

  std::int32_t neighbor(Eigen::Index t) const { return index_[static_cast<std::size_t>(t)]; }
  double distance(Eigen::Index t) const { return distance_[static_cast<std::size_t>(t)]; }

  std::span<const std::int32_t> neighbors_of(Eigen::Index i) const {
    return {index_.data() + begin(i), static_cast<std::size_t>(length(i))};
  }
  std::span<const double> distances_of(Eigen::Index i) const {
    return {distance_.data() + begin(i), static_cast<std::size_t>(length(i))};
  }

  /// Terms whose neighbor is pixel j, ascending by term id (padded terms excluded).
  std::span<const std::int64_t> referencing(Eigen::Index j) const {
    const auto b = rev_offsets_[static_cast<std::size_t>(j)];
    const auto e = rev_offsets_[static_cast<std::size_t>(j) + 1];
    return {rev_terms_.data() + b, static_cast<std::size_t>(e - b)};
  }
  /// Pixel that owns term t.
  Eigen::Index owner(Eigen::Index t) const { return owner_[static_cast<std::size_t>(t)]; }

  /// True when j appears in i's list.
  bool selects(Eigen::Index i, Eigen::Index j) const;

 private:
  friend NeighborField build_neighbor_field(const ImagePlane&, int, Padding);

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  int window_ = 0;
  Padding padding_ = Padding::Valid;
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int32_t> index_;
  std::vector<double> distance_;
  std::vector<std::int32_t> owner_;
  std::vector<std::int64_t> rev_offsets_;
  std::vector<std::int64_t> rev_terms_;
};

/// Keeps the min(K, #candidates) smallest color distances in each window;
/// ties (distances equal to within 2^-32) go to the earlier position in
/// row-major window scan order.
/// Throws ParameterError unless `window` is odd and at least 3.
NeighborField build_neighbor_field(const ImagePlane& image, int window, Padding padding = Padding::Valid);

/// Row-normalized affinity weights aligned with the field's terms:
/// w = (1 - d / sqrt(channels)) / row sum.
std::vector<double> affinity_weights(const NeighborField& field, int channels);
inline std::vector<double> affinity_weights(const NeighborField& field) {
  return affinity_weights(field, field.channels());
}

}  // namespace matte
