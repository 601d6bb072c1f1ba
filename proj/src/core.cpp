#include "matte/core.hpp"

#include <algorithm>
#include <cmath>

namespace matte {

namespace {

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

ImagePlane::ImagePlane(int height, int width, Pixels pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  if (height <= 0 || width <= 0) throw ParameterError("image dimensions must be positive");
  if (pixels_.rows() != static_cast<Eigen::Index>(height) * width)
    throw ParameterError("image data length does not match height x width");
  if (pixels_.cols() != 1 && pixels_.cols() != 3)
    throw ParameterError("image must have 1 or 3 channels, got " + std::to_string(pixels_.cols()));
  if (!pixels_.unaryExpr([](double v) { return in_unit_interval(v); }).all())
    throw ParameterError("image values must lie in [0,1]");
}

ImagePlane ImagePlane::from_gray(const Field& gray) {
  Pixels px(gray.size(), 1);
  px.col(0) = gray.reshaped<Eigen::RowMajor>();
  return ImagePlane(static_cast<int>(gray.rows()), static_cast<int>(gray.cols()), std::move(px));
}

ImagePlane ImagePlane::from_rgb(const Field& r, const Field& g, const Field& b) {
  require_same_shape(r, g, "rgb planes");
  require_same_shape(r, b, "rgb planes");
  Pixels px(r.size(), 3);
  px.col(0) = r.reshaped<Eigen::RowMajor>();
  px.col(1) = g.reshaped<Eigen::RowMajor>();
  px.col(2) = b.reshaped<Eigen::RowMajor>();
  return ImagePlane(static_cast<int>(r.rows()), static_cast<int>(r.cols()), std::move(px));
}

Field ImagePlane::channel(int c) const {
  Field out(height_, width_);
  out.reshaped<Eigen::RowMajor>() = pixels_.col(c);
  return out;
}

AlphaMatte::AlphaMatte(Field values) : values_(std::move(values)) {
  if (values_.size() == 0) throw ParameterError("alpha matte must be non-empty");
  if (!values_.unaryExpr([](double v) { return in_unit_interval(v); }).all())
    throw ParameterError("alpha values must lie in [0,1]");
}

Trimap::Trimap(int height, int width, std::vector<Label> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
  if (height <= 0 || width <= 0) throw ParameterError("trimap dimensions must be positive");
  if (labels_.size() != static_cast<std::size_t>(height) * width)
    throw ParameterError("trimap label count does not match height x width");
  for (Label l : labels_) {
    if (l != Label::Background && l != Label::Unknown && l != Label::Foreground)
      throw ParameterError("invalid trimap label");
  }
}

Trimap::Trimap(int height, int width, Label fill)
    : Trimap(height, width, std::vector<Label>(static_cast<std::size_t>(std::max(height, 0)) * std::max(width, 0), fill)) {}

Eigen::Index Trimap::known_count() const {
  return std::count_if(labels_.begin(), labels_.end(), [](Label l) { return l != Label::Unknown; });
}

RegionMasks region_masks(const Trimap& trimap) {
  RegionMasks m{Mask(trimap.height(), trimap.width()), Mask(trimap.height(), trimap.width()),
                Mask(trimap.height(), trimap.width())};
  for (Eigen::Index i = 0; i < trimap.size(); ++i) {
    const Label l = trimap[i];
    m.fg.reshaped<Eigen::RowMajor>()(i) = l == Label::Foreground;
    m.bg.reshaped<Eigen::RowMajor>()(i) = l == Label::Background;
    m.unknown.reshaped<Eigen::RowMajor>()(i) = l == Label::Unknown;
  }
  return m;
}

ByteGrid quantize_alpha(const AlphaMatte& matte) {
  return matte.values().unaryExpr([](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v * 255.0 + 0.5), 0.0, 255.0));
  });
}

Field dequantize_alpha(const ByteGrid& bytes) {
  return bytes.cast<double>() / 255.0;
}

void require_same_shape(const Field& a, const Field& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ParameterError(std::string("dimension mismatch: ") + what);
}

}  // namespace matte
