#include "t2veval/video_ops.hpp"

#include <algorithm>
#include <cmath>

#include "t2veval/error.hpp"

namespace t2veval {

FloatImage to_float(const Image& image) {
  FloatImage out{image.width, image.height, 3, std::vector<double>(image.rgb.begin(), image.rgb.end())};
  return out;
}

double sample_bilinear(const FloatImage& im, double x, double y, int c) {
  x = std::clamp(x, 0.0, static_cast<double>(im.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(im.height - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, im.width - 1);
  const int y1 = std::min(y0 + 1, im.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1 - fx) * im.at(x0, y0, c) + fx * im.at(x1, y0, c);
  const double bottom = (1 - fx) * im.at(x0, y1, c) + fx * im.at(x1, y1, c);
  return (1 - fy) * top + fy * bottom;
}

FloatImage warp_forward(const FloatImage& source, const FlowField& flow) {
  if (flow.width != source.width || flow.height != source.height)
    throw Error("flow field shape does not match the frame");
  FloatImage out{source.width, source.height, source.channels, std::vector<double>(source.data.size())};
  for (int y = 0; y < source.height; ++y)
    for (int x = 0; x < source.width; ++x) {
      const double sx = x - static_cast<double>(flow.dx(x, y));
      const double sy = y - static_cast<double>(flow.dy(x, y));
      for (int c = 0; c < source.channels; ++c) out.at(x, y, c) = sample_bilinear(source, sx, sy, c);
    }
  return out;
}

double warping_mse(const FloatImage& source, const FloatImage& next, const FlowField& flow, int margin) {
  if (source.width != next.width || source.height != next.height || source.channels != next.channels)
    throw Error("warping error needs frames of equal shape");
  const FloatImage warped = warp_forward(source, flow);
  double sum = 0;
  std::size_t n = 0;
  for (int y = margin; y < source.height - margin; ++y)
    for (int x = margin; x < source.width - margin; ++x)
      for (int c = 0; c < source.channels; ++c) {
        const double d = warped.at(x, y, c) - next.at(x, y, c);
        sum += d * d;
        ++n;
      }
  if (n == 0) throw Error("warping margin leaves no pixels");
  return sum / static_cast<double>(n);
}

double warping_mse(const Image& source, const Image& next, const FlowField& flow, int margin) {
  return warping_mse(to_float(source), to_float(next), flow, margin);
}

double mean_flow_magnitude(const FlowField& flow) {
  const std::size_t n = static_cast<std::size_t>(flow.width) * flow.height;
  if (n == 0) throw Error("empty flow field");
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) sum += std::hypot(flow.uv[2 * i], flow.uv[2 * i + 1]);
  return sum / static_cast<double>(n);
}

void check_probability_vector(std::span<const double> p) {
  double sum = 0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0) throw Error("class probability vector has a negative or non-finite entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw Error("class probability vector sums to " + std::to_string(sum) + ", expected 1 +/- 1e-6");
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  double kl = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0) kl += p[i] * std::log(p[i] / q[i]);
  return kl;
}

double inception_score(std::span<const std::vector<double>> samples, int splits) {
  if (samples.empty()) throw Error("inception score needs at least one sample");
  if (splits < 1 || static_cast<std::size_t>(splits) > samples.size())
    throw ConfigError("inception score splits must be in [1, sample count]");
  const std::size_t k = samples.front().size();
  for (const auto& s : samples) {
    if (s.size() != k) throw Error("class probability vectors differ in length");
    check_probability_vector(s);
  }
  double total = 0;
  for (int part = 0; part < splits; ++part) {
    const std::size_t begin = samples.size() * static_cast<std::size_t>(part) / static_cast<std::size_t>(splits);
    const std::size_t end = samples.size() * static_cast<std::size_t>(part + 1) / static_cast<std::size_t>(splits);
    std::vector<double> marginal(k, 0.0);
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t c = 0; c < k; ++c) marginal[c] += samples[i][c];
    for (auto& m : marginal) m /= static_cast<double>(end - begin);
    double mean_kl = 0;
    for (std::size_t i = begin; i < end; ++i) mean_kl += kl_divergence(samples[i], marginal);
    mean_kl /= static_cast<double>(end - begin);
    total += std::exp(mean_kl);
  }
  return total / splits;
}

}  // namespace t2veval
