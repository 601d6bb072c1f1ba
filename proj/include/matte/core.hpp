#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace matte {

/// Row-major H×W scalar grid. The whole library evaluates in double; the
/// alias stays generic so oracles and tests can instantiate other scalars.
template <typename Scalar>
using FieldT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Field = FieldT<double>;
using Mask = FieldT<bool>;
using ByteGrid = FieldT<std::uint8_t>;

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// H×W×C image with values in [0,1]. Stored as an N×C row-major array so a
/// pixel's color is one contiguous row.
class ImagePlane {
 public:
  using Pixels = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  ImagePlane() = default;
  /// `pixels` has height·width rows and `channels` columns.
  ImagePlane(int height, int width, Pixels pixels);

  /// Single-channel image from an H×W grid.
  static ImagePlane from_gray(const Field& gray);
  /// Three-channel image from per-channel grids of equal shape.
  static ImagePlane from_rgb(const Field& r, const Field& g, const Field& b);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return static_cast<int>(pixels_.cols()); }
  Eigen::Index size() const { return pixels_.rows(); }

  const Pixels& pixels() const { return pixels_; }
  auto pixel(Eigen::Index i) const { return pixels_.row(i); }
  double at(int row, int col, int channel = 0) const {
    return pixels_(static_cast<Eigen::Index>(row) * width_ + col, channel);
  }
  /// One channel as an H×W grid.
  Field channel(int c) const;

 private:
  int height_ = 0;
  int width_ = 0;
  Pixels pixels_;
};

/// H×W opacity field with values in [0,1].
class AlphaMatte {
 public:
  AlphaMatte() = default;
  explicit AlphaMatte(Field values);

  int height() const { return static_cast<int>(values_.rows()); }
  int width() const { return static_cast<int>(values_.cols()); }
  const Field& values() const { return values_; }

 private:
  Field values_;
};

enum class Label : std::uint8_t { Background = 0, Unknown = 1, Foreground = 2 };

/// Target opacity encoded by a label: 0, 0.5 or 1.
constexpr double label_value(Label l) {
  switch (l) {
    case Label::Background: return 0.0;
    case Label::Foreground: return 1.0;
    case Label::Unknown: break;
  }
  return 0.5;
}

class Trimap {
 public:
  Trimap() = default;
  Trimap(int height, int width, std::vector<Label> labels);
  Trimap(int height, int width, Label fill);

  int height() const { return height_; }
  int width() const { return width_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(labels_.size()); }
  const std::vector<Label>& labels() const { return labels_; }
  Label operator[](Eigen::Index i) const { return labels_[static_cast<std::size_t>(i)]; }
  Label at(int row, int col) const { return labels_[static_cast<std::size_t>(row) * width_ + col]; }

  Eigen::Index known_count() const;
  Eigen::Index unknown_count() const { return size() - known_count(); }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<Label> labels_;
};

struct RegionMasks {
  Mask fg;
  Mask bg;
  Mask unknown;
};

RegionMasks region_masks(const Trimap& trimap);

/// round-half-up of v·255.
ByteGrid quantize_alpha(const AlphaMatte& matte);
Field dequantize_alpha(const ByteGrid& bytes);

void require_same_shape(const Field& a, const Field& b, const char* what);

}  // namespace matte
