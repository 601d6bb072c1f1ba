#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "matte/core.hpp"

namespace matte {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decoded PNG samples, row-major and channel-interleaved.
struct Raster {
  int height = 0;
  int width = 0;
  int channels = 0;
  int bit_depth = 8;  ///< 8 or 16
  std::vector<std::uint16_t> samples;

  double max_value() const { return bit_depth == 16 ? 65535.0 : 255.0; }
};

/// Reads gray or RGB PNGs (palette and sub-byte gray are expanded). Images
/// with an alpha channel are rejected.
Raster read_png(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory, then renames.
void write_png(const std::filesystem::path& path, const Raster& raster);

ImagePlane read_image(const std::filesystem::path& path);
Field read_alpha(const std::filesystem::path& path);
/// 8-bit gray with bytes exactly 0 (Background), 128 (Unknown), 255 (Foreground).
Trimap read_trimap(const std::filesystem::path& path);

void write_image(const std::filesystem::path& path, const ImagePlane& image);
/// 8-bit by default, 16-bit gray when `deep`.
void write_alpha(const std::filesystem::path& path, const AlphaMatte& alpha, bool deep = false);
void write_trimap(const std::filesystem::path& path, const Trimap& trimap);

std::uint8_t trimap_byte(Label l);

}  // namespace matte
