#include "t2veval/regression.hpp"

#include <cmath>

#include "t2veval/error.hpp"

namespace t2veval {

double OlsFit::predict(std::span<const double> x) const {
  if (x.size() != coefficients.size()) throw Error("predictor count does not match the fitted model");
  double v = intercept;
  for (std::size_t j = 0; j < x.size(); ++j) v += coefficients[j] * x[j];
  return v;
}

OlsFit ols_fit(const std::vector<std::vector<double>>& rows, std::span<const double> y,
               const std::vector<std::string>& names) {
  const std::size_t n = rows.size();
  const std::size_t k = names.size();
  const std::size_t p = k + 1;
  if (y.size() != n) throw Error("regression has " + std::to_string(n) + " rows but " + std::to_string(y.size()) + " labels");
  if (n < p) throw Error("regression needs at least " + std::to_string(p) + " rows, got " + std::to_string(n));

  // Column-major design matrix; column 0 is the intercept.
  std::vector<double> a(n * p);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[j * n + i]; };
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != k) throw Error("regression row " + std::to_string(i) + " has the wrong width");
    at(i, 0) = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(rows[i][j])) throw Error("non-finite value in column '" + names[j] + "'");
      at(i, j + 1) = rows[i][j];
    }
    if (!std::isfinite(y[i])) throw Error("non-finite regression label");
  }
  std::vector<double> col_norm(p);
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += at(i, j) * at(i, j);
    col_norm[j] = std::sqrt(s);
  }
  std::vector<double> b(y.begin(), y.end());

  auto label = [&](std::size_t j) { return j == 0 ? std::string("intercept") : names[j - 1]; };
  for (std::size_t c = 0; c < p; ++c) {
    double norm = 0;
    for (std::size_t i = c; i < n; ++i) norm += at(i, c) * at(i, c);
    norm = std::sqrt(norm);
    if (norm <= 1e-10 * std::max(col_norm[c], 1e-300)) {
      std::string msg = "design matrix is rank deficient: '" + label(c) + "' is collinear with";
      for (std::size_t j = 0; j < c; ++j) msg += (j ? ", '" : " '") + label(j) + "'";
      if (c == 0) msg = "design matrix is rank deficient: intercept column vanishes";
      throw Error(msg);
    }
    const double alpha = at(c, c) > 0 ? -norm : norm;
    std::vector<double> v(n - c);
    for (std::size_t i = c; i < n; ++i) v[i - c] = at(i, c);
    v[0] -= alpha;
    double vnorm2 = 0;
    for (double e : v) vnorm2 += e * e;
    if (vnorm2 > 0) {
      for (std::size_t j = c; j < p; ++j) {
        double dot = 0;
        for (std::size_t i = c; i < n; ++i) dot += v[i - c] * at(i, j);
        const double f = 2 * dot / vnorm2;
        for (std::size_t i = c; i < n; ++i) at(i, j) -= f * v[i - c];
      }
      double dot = 0;
      for (std::size_t i = c; i < n; ++i) dot += v[i - c] * b[i];
      const double f = 2 * dot / vnorm2;
      for (std::size_t i = c; i < n; ++i) b[i] -= f * v[i - c];
    }
  }

  std::vector<double> beta(p);
  for (std::size_t c = p; c-- > 0;) {
    double s = b[c];
    for (std::size_t j = c + 1; j < p; ++j) s -= at(c, j) * beta[j];
    beta[c] = s / at(c, c);
  }

  OlsFit fit;
  fit.intercept = beta[0];
  fit.coefficients.assign(beta.begin() + 1, beta.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.predict(rows[i]);
    fit.rss += r * r;
  }
  return fit;
}

}  // namespace t2veval
