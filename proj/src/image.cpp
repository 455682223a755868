#include "t2veval/image.hpp"

#include <algorithm>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "t2veval/error.hpp"
#include "t2veval/hash.hpp"

namespace t2veval {

Image::Image(int w, int h, Rgb fill) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    rgb[i * 3] = fill.r;
    rgb[i * 3 + 1] = fill.g;
    rgb[i * 3 + 2] = fill.b;
  }
}

void Image::set(int x, int y, Rgb color) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  at(x, y, 0) = color.r;
  at(x, y, 1) = color.g;
  at(x, y, 2) = color.b;
}

void Image::fill_rect(int x0, int y0, int w, int h, Rgb color) {
  for (int y = std::max(0, y0); y < std::min(height, y0 + h); ++y)
    for (int x = std::max(0, x0); x < std::min(width, x0 + w); ++x) set(x, y, color);
}

std::uint64_t content_hash(const Image& image) {
  std::uint64_t h = mix(kFnvOffset, static_cast<std::uint64_t>(image.width));
  h = mix(h, static_cast<std::uint64_t>(image.height));
  return fnv1a(image.rgb, h);
}

std::vector<double> grid_means(const Image& image, int cols, int rows) {
  std::vector<double> out(static_cast<std::size_t>(cols) * rows * 3, 0.0);
  if (image.empty()) return out;
  for (int gy = 0; gy < rows; ++gy) {
    const int y0 = gy * image.height / rows;
    const int y1 = std::max(y0 + 1, (gy + 1) * image.height / rows);
    for (int gx = 0; gx < cols; ++gx) {
      const int x0 = gx * image.width / cols;
      const int x1 = std::max(x0 + 1, (gx + 1) * image.width / cols);
      double sum[3] = {0, 0, 0};
      int n = 0;
      for (int y = y0; y < std::min(y1, image.height); ++y)
        for (int x = x0; x < std::min(x1, image.width); ++x) {
          for (int c = 0; c < 3; ++c) sum[c] += image.at(x, y, c);
          ++n;
        }
      for (int c = 0; c < 3; ++c)
        out[(static_cast<std::size_t>(gy) * cols + gx) * 3 + c] = n ? sum[c] / (255.0 * n) : 0.0;
    }
  }
  return out;
}

Image read_image(const std::filesystem::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw MediaError("cannot read image " + path.string());
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  Image out(rgb.cols, rgb.rows);
  for (int y = 0; y < rgb.rows; ++y)
    std::copy_n(rgb.ptr<std::uint8_t>(y), static_cast<std::size_t>(rgb.cols) * 3,
                out.rgb.begin() + static_cast<std::ptrdiff_t>(y) * rgb.cols * 3);
  return out;
}

void write_image(const std::filesystem::path& path, const Image& image) {
  cv::Mat rgb(image.height, image.width, CV_8UC3, const_cast<std::uint8_t*>(image.rgb.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path.string(), bgr)) throw MediaError("cannot write image " + path.string());
}

}  // namespace t2veval
