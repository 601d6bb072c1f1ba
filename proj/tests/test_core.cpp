#include <gtest/gtest.h>

#include "matte/core.hpp"

namespace matte {
namespace {

Trimap row_trimap(std::vector<Label> labels) {
  const int w = static_cast<int>(labels.size());
  return Trimap(1, w, std::move(labels));
}

TEST(Quantize, Endpoints) {
  Field f(1, 3);
  f << 0.0, 1.0, 0.5;
  const ByteGrid b = quantize_alpha(AlphaMatte(f));
  EXPECT_EQ(b(0, 0), 0);
  EXPECT_EQ(b(0, 1), 255);
  EXPECT_EQ(b(0, 2), 128);  // 127.5 rounds half up
}

TEST(Quantize, RoundTripWithinHalfStep) {
  Field f(1, 256);
  for (int i = 0; i < 256; ++i) f(0, i) = i / 255.0 + (i % 7 - 3) * 1e-4;
  f = f.cwiseMax(0.0).cwiseMin(1.0);
  const Field back = dequantize_alpha(quantize_alpha(AlphaMatte(f)));
  EXPECT_LE((back - f).abs().maxCoeff(), 1.0 / 510.0 + 1e-15);
}

TEST(RegionMasks, AllForeground) {
  const auto m = region_masks(Trimap(3, 4, Label::Foreground));
  EXPECT_TRUE(m.fg.all());
  EXPECT_FALSE(m.bg.any());
  EXPECT_FALSE(m.unknown.any());
}

TEST(RegionMasks, AllUnknown) {
  const auto m = region_masks(Trimap(2, 2, Label::Unknown));
  EXPECT_TRUE(m.unknown.all());
}

TEST(RegionMasks, RowExample) {
  const auto m = region_masks(row_trimap({Label::Foreground, Label::Unknown, Label::Background}));
  EXPECT_EQ(m.fg(0, 0) + 2 * m.fg(0, 1) + 4 * m.fg(0, 2), 1);
  EXPECT_EQ(m.unknown(0, 0) + 2 * m.unknown(0, 1) + 4 * m.unknown(0, 2), 2);
  EXPECT_EQ(m.bg(0, 0) + 2 * m.bg(0, 1) + 4 * m.bg(0, 2), 4);
}

TEST(RegionMasks, Partition) {
  std::vector<Label> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(static_cast<Label>(i * 7 % 3));
  const Trimap t(5, 6, labels);
  const auto m = region_masks(t);
  const auto count = m.fg.cast<int>() + m.bg.cast<int>() + m.unknown.cast<int>();
  EXPECT_TRUE((count == 1).all());
  EXPECT_EQ(t.known_count() + t.unknown_count(), 30);
}

TEST(Validation, ImageRejectsOutOfRange) {
  ImagePlane::Pixels px(2, 1);
  px << 0.5, 1.5;
  EXPECT_THROW(ImagePlane(1, 2, px), ParameterError);
}

TEST(Validation, ImageRejectsChannelCount) {
  EXPECT_THROW(ImagePlane(1, 2, ImagePlane::Pixels::Zero(2, 2)), ParameterError);
  EXPECT_THROW(ImagePlane(1, 2, ImagePlane::Pixels::Zero(3, 1)), ParameterError);
}

TEST(Validation, AlphaRejectsOutOfRange) {
  Field f(1, 2);
  f << -0.1, 0.5;
  EXPECT_THROW(AlphaMatte{f}, ParameterError);
}

TEST(Validation, TrimapLengthAndLabels) {
  EXPECT_THROW(Trimap(2, 2, std::vector<Label>(3, Label::Unknown)), ParameterError);
  EXPECT_THROW(Trimap(1, 1, std::vector<Label>{static_cast<Label>(7)}), ParameterError);
}

TEST(ImagePlane, ChannelAccess) {
  Field r = Field::Constant(2, 3, 0.1), g = Field::Constant(2, 3, 0.2), b = Field::Constant(2, 3, 0.3);
  b(1, 2) = 0.9;
  const ImagePlane img = ImagePlane::from_rgb(r, g, b);
  EXPECT_EQ(img.channels(), 3);
  EXPECT_DOUBLE_EQ(img.at(1, 2, 2), 0.9);
  EXPECT_TRUE((img.channel(2) == b).all());
}

TEST(LabelValue, Encoding) {
  EXPECT_EQ(label_value(Label::Background), 0.0);
  EXPECT_EQ(label_value(Label::Unknown), 0.5);
  EXPECT_EQ(label_value(Label::Foreground), 1.0);
}

}  // namespace
}  // namespace matte
