#pragma once

// Slow, obviously-correct reference implementations. Tests and the acceptance runner
// compare the library against these; nothing here shares code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

/// Occurrences of `gram` in `toks`, by linear scan.
inline int count_gram(const std::vector<std::string>& toks, const std::vector<std::string>& gram) {
  int c = 0;
  const std::size_t n = gram.size();
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    bool eq = true;
    for (std::size_t k = 0; k < n && eq; ++k) eq = toks[i + k] == gram[k];
    c += eq ? 1 : 0;
  }
  return c;
}

/// Sentence BLEU over pre-tokenized input: clipped n-gram precision for n up to
/// min(4, |hyp|), geometric mean, brevity penalty exp(1 - r/c) when c < r.
inline double bleu(const std::vector<std::string>& ref, const std::vector<std::string>& hyp, int max_order = 4) {
  if (ref.empty() || hyp.empty()) return 0.0;
  const int order = std::min<int>(max_order, static_cast<int>(hyp.size()));
  double log_sum = 0.0;
  for (int n = 1; n <= order; ++n) {
    // Walk distinct hypothesis n-grams: count each only at its first position.
    int matched = 0, total = 0;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
      std::vector<std::string> gram(hyp.begin() + static_cast<long>(i), hyp.begin() + static_cast<long>(i) + n);
      ++total;
      bool first = true;
      for (std::size_t j = 0; j < i && first; ++j)
        first = !std::equal(gram.begin(), gram.end(), hyp.begin() + static_cast<long>(j));
      if (!first) continue;
      matched += std::min(count_gram(hyp, gram), count_gram(ref, gram));
    }
    if (matched == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched) / total);
  }
  const double c = static_cast<double>(hyp.size()), r = static_cast<double>(ref.size());
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return bp * std::exp(log_sum / order);
}

/// Levenshtein distance with the full (|a|+1) x (|b|+1) table.
template <typename Seq>
std::size_t edit_distance(const Seq& a, const Seq& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
  return d[a.size()][b.size()];
}

/// Rank by counting: 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i] ? 1 : 0;
      equal += w == v[i] ? 1 : 0;
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

/// Tau-b from all n(n-1)/2 pairs.
inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double conc = 0, disc = 0, tie_x = 0, tie_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        ++tie_x;
      } else if (dy == 0) {
        ++tie_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++conc;
      } else {
        ++disc;
      }
    }
  return (conc - disc) / std::sqrt((conc + disc + tie_x) * (conc + disc + tie_y));
}

/// Solves (X'X) b = X'y with an intercept column first, by Gauss-Jordan elimination
/// with partial pivoting. Returns {intercept, coefficients...}.
inline std::vector<double> normal_equations(const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
  const std::size_t p = rows.front().size() + 1;
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> x{1.0};
    x.insert(x.end(), rows[i].begin(), rows[i].end());
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < p; ++c) a[r][c] += x[r] * x[c];
      a[r][p] += x[r] * y[i];
    }
  }
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    if (a[col][col] == 0.0) throw std::runtime_error("singular normal equations");
    for (std::size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= p; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> b(p);
  for (std::size_t r = 0; r < p; ++r) b[r] = a[r][p] / a[r][r];
  return b;
}

}  // namespace oracle
