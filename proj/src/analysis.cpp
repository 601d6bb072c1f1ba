#include "matte/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace matte {

namespace {

struct Defaults {
  int height;
  int width;
  std::vector<double> fg;
  std::vector<double> bg;
};

Defaults defaults_for(const SceneSpec& spec) {
  return std::visit(
      [&](const auto& k) -> Defaults {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, HairScene>)
          return {15, k.length + spec.band + 10, {1.0, 0.8, 0.1}, {0.1, 0.3, 0.9}};
        else if constexpr (std::is_same_v<K, TextureScene>)
          return {16, 16, {0.85, 0.65, 0.25}, {0.2, 0.35, 0.8}};
        else
          return {16, 16, {1.0}, {0.0}};
      },
      spec.kind);
}

// Fills unset canvas size and colors with the per-kind defaults.
SceneSpec resolved(const SceneSpec& spec) {
  SceneSpec s = spec;
  const Defaults d = defaults_for(spec);
  if (s.height == 0) s.height = d.height;
  if (s.width == 0) s.width = d.width;
  if (s.fg_color.empty()) s.fg_color = d.fg;
  if (s.bg_color.empty()) s.bg_color = d.bg;
  return s;
}

ImagePlane constant_plane(int height, int width, const std::vector<double>& color) {
  ImagePlane::Pixels px(static_cast<Eigen::Index>(height) * width, static_cast<Eigen::Index>(color.size()));
  for (std::size_t c = 0; c < color.size(); ++c) px.col(static_cast<Eigen::Index>(c)).setConstant(color[c]);
  return ImagePlane(height, width, std::move(px));
}

// Distinct levels in [0,1) over one period×period tile, spread by the
// golden-ratio sequence so similar levels sit far apart spatially.
double texture_level(int x, int y, int period) {
  const int cell = (x % period) + period * (y % period);
  const double v = cell * 0.6180339887498949;
  return v - std::floor(v);
}

void check_geometry(bool ok, const char* what) {
  if (!ok) throw ParameterError(std::string("scene geometry does not fit the canvas: ") + what);
}

}  // namespace

ImagePlane composite(const AlphaMatte& alpha, const ImagePlane& fg, const ImagePlane& bg) {
  if (fg.height() != alpha.height() || fg.width() != alpha.width() || bg.height() != alpha.height() ||
      bg.width() != alpha.width() || fg.channels() != bg.channels())
    throw ParameterError("composite inputs have mismatched dimensions");
  const auto a = alpha.values().reshaped<Eigen::RowMajor>();
  ImagePlane::Pixels px(fg.size(), fg.channels());
  for (int c = 0; c < fg.channels(); ++c)
    px.col(c) = a * fg.pixels().col(c) + (1.0 - a) * bg.pixels().col(c);
  // Rounding can leave values a hair outside [0,1].
  return ImagePlane(fg.height(), fg.width(), px.cwiseMax(0.0).cwiseMin(1.0));
}

void SceneSpec::validate() const {
  const SceneSpec s = resolved(*this);
  if (s.height < 1 || s.width < 1) throw ParameterError("scene canvas must be non-empty");
  if (s.band < 0) throw ParameterError("unknown band radius must be non-negative");
  if (s.fg_color.size() != s.bg_color.size() || (s.fg_color.size() != 1 && s.fg_color.size() != 3))
    throw ParameterError("scene colors must both have 1 or 3 channels");
  if (s.fg_color == s.bg_color) throw ParameterError("foreground and background colors must differ");
  for (double v : s.fg_color) if (v < 0.0 || v > 1.0) throw ParameterError("scene colors must lie in [0,1]");
  for (double v : s.bg_color) if (v < 0.0 || v > 1.0) throw ParameterError("scene colors must lie in [0,1]");

  if (const auto* r = std::get_if<RampScene>(&s.kind)) {
    check_geometry(r->width >= 2, "ramp width must be >= 2");
    const int x0 = (s.width - r->width) / 2;
    check_geometry(x0 - s.band >= 1 && x0 + r->width - 1 + s.band <= s.width - 2, "ramp plus band needs known columns on both sides");
  } else if (const auto* h = std::get_if<HairScene>(&s.kind)) {
    check_geometry(h->length >= 1 && h->thickness >= 1, "hair length and thickness must be >= 1");
    const int block = s.width - h->length - s.band - 2;
    const int y0 = (s.height - h->thickness) / 2;
    check_geometry(block >= 2, "hair is too long for the canvas width");
    check_geometry(y0 - s.band >= 1 && y0 + h->thickness - 1 + s.band <= s.height - 2, "hair band exceeds canvas height");
  } else {
    const auto& t = std::get<TextureScene>(s.kind);
    check_geometry(t.period >= 1, "texture period must be >= 1");
    check_geometry(t.amplitude >= 0.0, "texture amplitude must be non-negative");
    const int xb = s.width / 2;
    check_geometry(xb - s.band >= 1 && xb + s.band <= s.width - 1, "texture band needs known columns on both sides");
    for (double v : s.fg_color)
      if (v - t.amplitude / 2 < 0.0 || v + t.amplitude / 2 > 1.0)
        throw ParameterError("texture amplitude pushes the foreground outside [0,1]");
  }
}

Scene make_scene(const SceneSpec& spec) {
  spec.validate();
  const SceneSpec s = resolved(spec);
  const int H = s.height;
  const int W = s.width;
  Field alpha = Field::Zero(H, W);
  std::vector<Label> labels(static_cast<std::size_t>(H) * W, Label::Background);
  auto label = [&](int y, int x) -> Label& { return labels[static_cast<std::size_t>(y) * W + x]; };
  ImagePlane fg = constant_plane(H, W, s.fg_color);
  const ImagePlane bg = constant_plane(H, W, s.bg_color);

  if (const auto* r = std::get_if<RampScene>(&s.kind)) {
    const int x0 = (W - r->width) / 2;
    for (int x = 0; x < W; ++x) {
      double a = 0.0;
      if (x < x0) a = 1.0;
      else if (x < x0 + r->width) a = 1.0 - static_cast<double>(x - x0) / (r->width - 1);
      alpha.col(x).setConstant(a);
      const Label l = x < x0 - s.band ? Label::Foreground
                      : x <= x0 + r->width - 1 + s.band ? Label::Unknown
                                                        : Label::Background;
      for (int y = 0; y < H; ++y) label(y, x) = l;
    }
  } else if (const auto* h = std::get_if<HairScene>(&s.kind)) {
    const int block = W - h->length - s.band - 2;
    const int y0 = (H - h->thickness) / 2;
    const int y1 = y0 + h->thickness - 1;
    alpha.leftCols(block).setOnes();
    alpha.block(y0, block, h->thickness, h->length).setOnes();
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        if (x < block) {
          label(y, x) = Label::Foreground;
          continue;
        }
        const int dy = y < y0 ? y0 - y : (y > y1 ? y - y1 : 0);
        const int dx = x >= block + h->length ? x - (block + h->length - 1) : 0;
        if (std::max(dx, dy) <= s.band) label(y, x) = Label::Unknown;
      }
  } else {
    const auto& t = std::get<TextureScene>(s.kind);
    const int xb = W / 2;
    alpha.leftCols(xb).setOnes();
    ImagePlane::Pixels px = fg.pixels();
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        px.row(static_cast<Eigen::Index>(y) * W + x) += t.amplitude * (texture_level(x, y, t.period) - 0.5);
        label(y, x) = x < xb - s.band ? Label::Foreground : x < xb + s.band ? Label::Unknown : Label::Background;
      }
    fg = ImagePlane(H, W, std::move(px));
  }

  AlphaMatte gt(std::move(alpha));
  ImagePlane image = composite(gt, fg, bg);
  return {std::move(image), std::move(gt), Trimap(H, W, std::move(labels))};
}

std::vector<double> rescale_unit(std::span<const double> values) {
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double span = *hi - *lo;
  std::vector<double> out(values.size(), 1.0);
  if (span > 0.0)
    std::transform(values.begin(), values.end(), out.begin(), [&](double v) { return (v - *lo) / span; });
  return out;
}

std::vector<double> polynomial_sequence(std::span<const double> coeffs, int length) {
  std::vector<double> raw(static_cast<std::size_t>(std::max(length, 0)));
  for (int t = 1; t <= length; ++t) {
    double v = 0.0;
    for (auto c = coeffs.rbegin(); c != coeffs.rend(); ++c) v = v * t + *c;
    raw[static_cast<std::size_t>(t - 1)] = v;
  }
  return rescale_unit(raw);
}

BrakingReport braking_residual(std::span<const double> values, int window) {
  const int K = window;
  const int T = static_cast<int>(values.size());
  if (K < 1 || K % 2 == 0) throw ParameterError("braking window must be odd");
  if (T <= K) throw ParameterError("sequence length must exceed the window size");

  auto alpha = [&](int t) { return values[static_cast<std::size_t>(t - 1)]; };
  std::vector<double> prefix(static_cast<std::size_t>(T) + 1, 0.0);
  for (int t = 1; t <= T; ++t) prefix[static_cast<std::size_t>(t)] = prefix[static_cast<std::size_t>(t - 1)] + alpha(t);
  auto S = [&](int t) { return prefix[static_cast<std::size_t>(t)]; };

  BrakingReport r;
  const int lead = (K - 1) / 2;
  for (int t = K; t <= T; ++t)
    r.window_residuals.push_back((S(t - 1) - S(t - K) + alpha(t)) / K - alpha(t - lead));
  for (int t = K + 1; t <= T; ++t) {
    const double res = alpha(t) - alpha(t - K) - K * (alpha(t - lead) - alpha(t - lead - 1));
    r.residuals.push_back(res);
    r.max_abs_residual = std::max(r.max_abs_residual, std::abs(res));
    const double e_t = r.window_residuals[static_cast<std::size_t>(t - K)];
    const double e_prev = r.window_residuals[static_cast<std::size_t>(t - K - 1)];
    r.max_form_gap = std::max(r.max_form_gap, std::abs(K * (e_t - e_prev) - res));
  }
  return r;
}

PairBoundReport pair_bound_check(const ImagePlane& image, const Field& alpha, const NeighborField& field,
                                 double tight_tol, const Mask* region) {
  if (image.height() != field.height() || image.width() != field.width() || alpha.rows() != field.height() ||
      alpha.cols() != field.width())
    throw ParameterError("image, alpha and neighbor field dimensions differ");
  if (region && (region->rows() != alpha.rows() || region->cols() != alpha.cols()))
    throw ParameterError("region mask dimensions differ");

  PairBoundReport r;
  r.worst_slack = std::numeric_limits<double>::infinity();
  const double* a = alpha.data();
  for (Eigen::Index i = 0; i < field.pixels(); ++i) {
    for (Eigen::Index t = field.begin(i); t < field.end(i); ++t) {
      const std::int32_t j = field.neighbor(t);
      if (j == NeighborField::kPadded || j <= i || !field.selects(j, i)) continue;
      if (region && !region->data()[i] && !region->data()[j]) continue;
      const double d = field.distance(t);
      const double sum = std::abs(a[i] - a[j] - d) + std::abs(a[j] - a[i] - d);
      const double slack = sum - 2.0 * d;
      ++r.mutual_pairs;
      if (slack < -1e-12) ++r.violations;
      if (std::abs(a[i] - a[j]) > d + tight_tol) ++r.non_tight;
      r.worst_slack = std::min(r.worst_slack, slack);
    }
  }
  return r;
}

double symmetry_check(int window, double slope, double offset) {
  if (window < 3 || window % 2 == 0) throw ParameterError("window must be an odd integer >= 3");
  const int K = window;
  const int half = K / 2;
  Field ramp(1, 2 * K);
  for (int x = 0; x < 2 * K; ++x) {
    const double v = slope * x + offset;
    if (std::abs(x - K) <= half && (v < 0.0 || v > 1.0))
      throw ParameterError("ramp leaves [0,1] inside the probed window");
    ramp(0, x) = std::clamp(v, 0.0, 1.0);
  }
  const NeighborField field = build_neighbor_field(ImagePlane::from_gray(ramp), K, Padding::Valid);
  const std::vector<double> w = affinity_weights(field);

  // Weight per window offset -half..half for the probed pixel x = K.
  std::vector<double> by_offset(static_cast<std::size_t>(K), 0.0);
  for (Eigen::Index t = field.begin(K); t < field.end(K); ++t)
    by_offset[static_cast<std::size_t>(field.neighbor(t) - K + half)] = w[static_cast<std::size_t>(t)];
  double worst = 0.0;
  for (int o = 1; o <= half; ++o)
    worst = std::max(worst, std::abs(by_offset[static_cast<std::size_t>(half - o)] - by_offset[static_cast<std::size_t>(half + o)]));
  return worst;
}

}  // namespace matte
