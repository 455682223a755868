#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "t2veval/backends.hpp"
#include "t2veval/image.hpp"

namespace t2veval {

/// Multi-channel float image, row-major interleaved.
struct FloatImage {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<double> data;

  double at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
};

FloatImage to_float(const Image& image);

/// Bilinear sample with border clamping.
double sample_bilinear(const FloatImage& image, double x, double y, int channel);

/// Warps `source` along the forward flow (source -> next): output(q) = source(q - flow(q)).
FloatImage warp_forward(const FloatImage& source, const FlowField& flow);

/// Mean squared difference between `source` warped along `flow` and `next`, averaged
/// over channels and over pixels at least `margin` away from every border.
double warping_mse(const FloatImage& source, const FloatImage& next, const FlowField& flow, int margin = 0);
double warping_mse(const Image& source, const Image& next, const FlowField& flow, int margin = 0);

/// Mean per-pixel Euclidean displacement.
double mean_flow_magnitude(const FlowField& flow);

/// exp(mean KL(p(y|x) || p(y))) over samples, split into `splits` contiguous chunks
/// whose scores are averaged. Throws Error when a row is not a probability vector
/// (sum 1 +/- 1e-6, non-negative) or rows differ in length.
double inception_score(std::span<const std::vector<double>> samples, int splits = 1);

/// KL(p || q) in nats; terms with p = 0 contribute 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

void check_probability_vector(std::span<const double> p);

}  // namespace t2veval
