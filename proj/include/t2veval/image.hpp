#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace t2veval {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 8-bit interleaved RGB image, row-major. Plain value type.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h, Rgb fill = {});

  bool empty() const { return width <= 0 || height <= 0; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

  std::uint8_t& at(int x, int y, int c) { return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const { return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

  void set(int x, int y, Rgb color);
  void fill_rect(int x0, int y0, int w, int h, Rgb color);

  friend bool operator==(const Image&, const Image&) = default;
};

/// FNV-1a over dimensions and pixel bytes.
std::uint64_t content_hash(const Image& image);

/// Area-average downsample to a `cols` x `rows` grid; returns per-cell RGB means in [0, 1].
std::vector<double> grid_means(const Image& image, int cols, int rows);

Image read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Image& image);

}  // namespace t2veval
