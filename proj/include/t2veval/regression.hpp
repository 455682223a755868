#pragma once

#include <span>
#include <string>
#include <vector>

namespace t2veval {

struct OlsFit {
  std::vector<double> coefficients;
  double intercept = 0.0;
  double rss = 0.0;

  double predict(std::span<const double> x) const;
};

/// Ordinary least squares with intercept via Householder QR. `rows[i]` holds the
/// predictors of sample i; `names` labels the predictor columns. A rank-deficient
/// design throws Error naming the collinear columns.
OlsFit ols_fit(const std::vector<std::vector<double>>& rows, std::span<const double> y,
               const std::vector<std::string>& names);

}  // namespace t2veval
