#include "matte/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <random>
#include <string>

namespace matte {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

std::string describe(const std::filesystem::path& path) { return "'" + path.string() + "'"; }

void on_png_warning(png_structp, png_const_charp) {}

// Runs the libpng read after setjmp; returns an error message or empty.
std::string decode(std::FILE* fp, Raster& out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, on_png_warning);
  if (!png) return "out of memory";
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return "out of memory";
  }
  std::vector<png_bytep> rows;
  std::vector<png_byte> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return "corrupt PNG data";
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color & PNG_COLOR_MASK_ALPHA) {
    png_destroy_read_struct(&png, &info, nullptr);
    return "images with an alpha channel are not supported (need 1 or 3 channels)";
  }
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  buffer.resize(stride * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[static_cast<std::size_t>(y)] = buffer.data() + stride * static_cast<std::size_t>(y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t count = static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.samples[i] = out.bit_depth == 16 ? static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1])
                                         : buffer[i];
  }
  return {};
}

std::string encode(std::FILE* fp, const Raster& r) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, on_png_warning);
  if (!png) return "out of memory";
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return "out of memory";
  }
  const std::size_t bytes = r.bit_depth == 16 ? 2 : 1;
  const std::size_t stride = static_cast<std::size_t>(r.width) * r.channels * bytes;
  std::vector<png_byte> buffer(stride * static_cast<std::size_t>(r.height));
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    if (bytes == 2) {
      buffer[2 * i] = static_cast<png_byte>(r.samples[i] >> 8);
      buffer[2 * i + 1] = static_cast<png_byte>(r.samples[i] & 0xff);
    } else {
      buffer[i] = static_cast<png_byte>(r.samples[i]);
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(r.height));
  for (int y = 0; y < r.height; ++y) rows[static_cast<std::size_t>(y)] = buffer.data() + stride * static_cast<std::size_t>(y);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return "PNG encoding failed";
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(r.width), static_cast<png_uint_32>(r.height), r.bit_depth,
               r.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return {};
}

std::uint16_t to_sample(double v, double max) {
  return static_cast<std::uint16_t>(std::clamp(std::floor(v * max + 0.5), 0.0, max));
}

}  // namespace

Raster read_png(const std::filesystem::path& path) {
  File fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + describe(path));
  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw IoError(describe(path) + " is not a PNG file");
  std::rewind(fp.get());
  Raster r;
  if (const std::string err = decode(fp.get(), r); !err.empty()) throw IoError(describe(path) + ": " + err);
  return r;
}

void write_png(const std::filesystem::path& path, const Raster& raster) {
  if (raster.channels != 1 && raster.channels != 3) throw IoError("PNG output needs 1 or 3 channels");
  if (raster.samples.size() != static_cast<std::size_t>(raster.width) * raster.height * raster.channels)
    throw IoError("raster sample count does not match its dimensions");
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(rng());
  {
    File fp(std::fopen(tmp.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + describe(path));
    if (const std::string err = encode(fp.get(), raster); !err.empty()) {
      fp.reset();
      std::filesystem::remove(tmp);
      throw IoError(describe(path) + ": " + err);
    }
    if (std::fflush(fp.get()) != 0) {
      fp.reset();
      std::filesystem::remove(tmp);
      throw IoError("cannot write " + describe(path));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move output into place at " + describe(path) + ": " + ec.message());
  }
}

ImagePlane read_image(const std::filesystem::path& path) {
  const Raster r = read_png(path);
  ImagePlane::Pixels px(static_cast<Eigen::Index>(r.height) * r.width, r.channels);
  const double max = r.max_value();
  for (Eigen::Index i = 0; i < px.rows(); ++i)
    for (int c = 0; c < r.channels; ++c) px(i, c) = r.samples[static_cast<std::size_t>(i * r.channels + c)] / max;
  return ImagePlane(r.height, r.width, std::move(px));
}

Field read_alpha(const std::filesystem::path& path) {
  const Raster r = read_png(path);
  if (r.channels != 1) throw IoError(describe(path) + ": alpha mattes must be single-channel");
  Field a(r.height, r.width);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = r.samples[static_cast<std::size_t>(i)] / r.max_value();
  return a;
}

Trimap read_trimap(const std::filesystem::path& path) {
  const Raster r = read_png(path);
  if (r.channels != 1 || r.bit_depth != 8) throw IoError(describe(path) + ": trimaps must be 8-bit single-channel");
  std::vector<Label> labels(r.samples.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (r.samples[i]) {
      case 0: labels[i] = Label::Background; break;
      case 128: labels[i] = Label::Unknown; break;
      case 255: labels[i] = Label::Foreground; break;
      default:
        throw IoError(describe(path) + ": trimap byte " + std::to_string(r.samples[i]) + " at pixel " +
                      std::to_string(i) + " is not one of 0, 128, 255");
    }
  }
  return Trimap(r.height, r.width, std::move(labels));
}

void write_image(const std::filesystem::path& path, const ImagePlane& image) {
  Raster r{image.height(), image.width(), image.channels(), 8, {}};
  r.samples.reserve(static_cast<std::size_t>(image.pixels().size()));
  for (Eigen::Index i = 0; i < image.size(); ++i)
    for (int c = 0; c < image.channels(); ++c) r.samples.push_back(to_sample(image.pixels()(i, c), 255.0));
  write_png(path, r);
}

void write_alpha(const std::filesystem::path& path, const AlphaMatte& alpha, bool deep) {
  Raster r{alpha.height(), alpha.width(), 1, deep ? 16 : 8, {}};
  const double max = r.max_value();
  r.samples.resize(static_cast<std::size_t>(alpha.values().size()));
  for (Eigen::Index i = 0; i < alpha.values().size(); ++i)
    r.samples[static_cast<std::size_t>(i)] = to_sample(alpha.values().data()[i], max);
  write_png(path, r);
}

std::uint8_t trimap_byte(Label l) {
  switch (l) {
    case Label::Background: return 0;
    case Label::Unknown: return 128;
    case Label::Foreground: return 255;
  }
  return 128;
}

void write_trimap(const std::filesystem::path& path, const Trimap& trimap) {
  Raster r{trimap.height(), trimap.width(), 1, 8, {}};
  r.samples.reserve(static_cast<std::size_t>(trimap.size()));
  for (Label l : trimap.labels()) r.samples.push_back(trimap_byte(l));
  write_png(path, r);
}

}  // namespace matte
