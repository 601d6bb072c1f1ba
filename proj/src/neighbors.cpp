#include "matte/neighbors.hpp"

#include <algorithm>
#include <cmath>

#include "matte/parallel.hpp"

namespace matte {

namespace {

struct Candidate {
  double distance;
  std::int64_t rank;
  int scan;
  std::int32_t index;
};

// Distances are ranked on a 2^-32 grid so rounding noise (e.g. from an 8-bit
// round trip) reads as a tie and falls back to scan order.
std::int64_t distance_rank(double d) { return std::llround(std::ldexp(d, 32)); }

int candidate_count(int row, int col, int height, int width, int half, Padding padding) {
  if (padding == Padding::ZeroPad) return (2 * half + 1) * (2 * half + 1);
  const int rows = std::min(row + half, height - 1) - std::max(row - half, 0) + 1;
  const int cols = std::min(col + half, width - 1) - std::max(col - half, 0) + 1;
  return rows * cols;
}

}  // namespace

bool NeighborField::selects(Eigen::Index i, Eigen::Index j) const {
  const auto list = neighbors_of(i);
  return std::find(list.begin(), list.end(), static_cast<std::int32_t>(j)) != list.end();
}

NeighborField build_neighbor_field(const ImagePlane& image, int window, Padding padding) {
  if (window < 3 || window % 2 == 0)
    throw ParameterError("window size must be an odd integer >= 3, got " + std::to_string(window));

  const int height = image.height();
  const int width = image.width();
  const int half = window / 2;
  const Eigen::Index n = image.size();

  NeighborField f;
  f.height_ = height;
  f.width_ = width;
  f.channels_ = image.channels();
  f.window_ = window;
  f.padding_ = padding;

  f.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const auto i = static_cast<std::size_t>(r) * width + c;
      f.offsets_[i + 1] =
          f.offsets_[i] + std::min(window, candidate_count(r, c, height, width, half, padding));
    }
  }
  const auto total = static_cast<std::size_t>(f.offsets_.back());
  f.index_.resize(total);
  f.distance_.resize(total);
  f.owner_.resize(total);

  const auto& px = image.pixels();
  parallel_for(row_chunks(height), [&](std::size_t chunk) {
    std::vector<Candidate> cands;
    cands.reserve(static_cast<std::size_t>(window) * window);
    const int r0 = static_cast<int>(chunk) * kRowsPerChunk;
    const int r1 = std::min(height, r0 + kRowsPerChunk);
    for (int r = r0; r < r1; ++r) {
      for (int c = 0; c < width; ++c) {
        const Eigen::Index i = static_cast<Eigen::Index>(r) * width + c;
        cands.clear();
        int scan = 0;
        for (int dy = -half; dy <= half; ++dy) {
          for (int dx = -half; dx <= half; ++dx, ++scan) {
            const int rr = r + dy;
            const int cc = c + dx;
            const bool inside = rr >= 0 && rr < height && cc >= 0 && cc < width;
            if (inside) {
              const Eigen::Index j = static_cast<Eigen::Index>(rr) * width + cc;
              const double d = (px.row(i) - px.row(j)).matrix().norm();
              cands.push_back({d, distance_rank(d), scan, static_cast<std::int32_t>(j)});
            } else if (padding == Padding::ZeroPad) {
              const double d = px.row(i).matrix().norm();
              cands.push_back({d, distance_rank(d), scan, NeighborField::kPadded});
            }
          }
        }
        const auto keep = static_cast<std::size_t>(f.offsets_[i + 1] - f.offsets_[i]);
        std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(),
                          [](const Candidate& a, const Candidate& b) {
                            return a.rank < b.rank || (a.rank == b.rank && a.scan < b.scan);
                          });
        auto t = static_cast<std::size_t>(f.offsets_[i]);
        for (std::size_t k = 0; k < keep; ++k, ++t) {
          f.index_[t] = cands[k].index;
          f.distance_[t] = cands[k].distance;
          f.owner_[t] = static_cast<std::int32_t>(i);
        }
      }
    }
  });

  f.rev_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (std::int32_t j : f.index_) {
    if (j != NeighborField::kPadded) ++f.rev_offsets_[static_cast<std::size_t>(j) + 1];
  }
  for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) f.rev_offsets_[j + 1] += f.rev_offsets_[j];
  f.rev_terms_.resize(static_cast<std::size_t>(f.rev_offsets_.back()));
  std::vector<std::int64_t> cursor(f.rev_offsets_.begin(), f.rev_offsets_.end() - 1);
  for (std::size_t t = 0; t < total; ++t) {
    const std::int32_t j = f.index_[t];
    if (j != NeighborField::kPadded) f.rev_terms_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(j)]++)] = static_cast<std::int64_t>(t);
  }
  return f;
}

std::vector<double> affinity_weights(const NeighborField& field, int channels) {
  const double scale = std::sqrt(static_cast<double>(channels));
  std::vector<double> w(static_cast<std::size_t>(field.terms()));
  for (Eigen::Index i = 0; i < field.pixels(); ++i) {
    double sum = 0.0;
    for (Eigen::Index t = field.begin(i); t < field.end(i); ++t) {
      const double raw = std::max(0.0, 1.0 - field.distance(t) / scale);
      w[static_cast<std::size_t>(t)] = raw;
      sum += raw;
    }
    // The self entry contributes a raw weight of 1, so sum >= 1.
    for (Eigen::Index t = field.begin(i); t < field.end(i); ++t) w[static_cast<std::size_t>(t)] /= sum;
  }
  return w;
}

}  // namespace matte
