#include "t2veval/text_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

namespace t2veval {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    auto is_punct = [](unsigned char c) { return std::ispunct(c) != 0; };
    std::size_t b = 0, e = cur.size();
    while (b < e && is_punct(static_cast<unsigned char>(cur[b]))) ++b;
    while (e > b && is_punct(static_cast<unsigned char>(cur[e - 1]))) --e;
    if (e > b) out.push_back(cur.substr(b, e - b));
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c))
      flush();
    else
      cur.push_back(static_cast<char>(std::tolower(c)));
  }
  flush();
  return out;
}

std::u32string utf8_codepoints(std::string_view s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 0;
    if (len == 0 || i + static_cast<std::size_t>(len) > s.size()) {
      out.push_back(0xfffd);
      ++i;
      continue;
    }
    char32_t cp = len == 1 ? c : c & (0x7f >> len);
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) ok = false;
      cp = (cp << 6) | (cc & 0x3f);
    }
    out.push_back(ok ? cp : 0xfffd);
    i += ok ? static_cast<std::size_t>(len) : 1;
  }
  return out;
}

template <typename T>
std::size_t edit_distance(std::span<const T> a, std::span<const T> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

template std::size_t edit_distance<std::string>(std::span<const std::string>, std::span<const std::string>);
template std::size_t edit_distance<char32_t>(std::span<const char32_t>, std::span<const char32_t>);
template std::size_t edit_distance<char>(std::span<const char>, std::span<const char>);

double sentence_bleu(std::string_view reference, std::string_view hypothesis, int max_order) {
  const auto ref = tokenize(reference);
  const auto hyp = tokenize(hypothesis);
  if (hyp.empty() || ref.empty()) return 0.0;

  using Gram = std::vector<std::string>;
  auto counts = [](const std::vector<std::string>& toks, std::size_t n) {
    std::map<Gram, int> m;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) ++m[Gram(toks.begin() + i, toks.begin() + i + n)];
    return m;
  };

  const int order = std::min<int>(max_order, static_cast<int>(hyp.size()));
  double log_sum = 0.0;
  for (int n = 1; n <= order; ++n) {
    const auto h = counts(hyp, n);
    const auto r = counts(ref, n);
    int matched = 0, total = 0;
    for (const auto& [gram, c] : h) {
      total += c;
      if (auto it = r.find(gram); it != r.end()) matched += std::min(c, it->second);
    }
    if (matched == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched) / total);
  }
  const double c = static_cast<double>(hyp.size());
  const double rl = static_cast<double>(ref.size());
  const double bp = c < rl ? std::exp(1.0 - rl / c) : 1.0;
  return bp * std::exp(log_sum / order);
}

double word_error_rate(std::string_view reference, std::string_view hypothesis) {
  const auto ref = tokenize(reference);
  const auto hyp = tokenize(hypothesis);
  if (ref.empty()) return hyp.empty() ? 0.0 : 1.0;
  return static_cast<double>(edit_distance<std::string>(ref, hyp)) / static_cast<double>(ref.size());
}

namespace {

/// Tokens re-joined with single spaces: case, edge punctuation and spacing are ignored.
std::u32string normalized_codepoints(std::string_view text) {
  std::string joined;
  for (const auto& t : tokenize(text)) {
    if (!joined.empty()) joined += ' ';
    joined += t;
  }
  return utf8_codepoints(joined);
}

}  // namespace

double char_error_rate(std::string_view reference, std::string_view hypothesis) {
  const auto ref = normalized_codepoints(reference);
  const auto hyp = normalized_codepoints(hypothesis);
  if (ref.empty()) return hyp.empty() ? 0.0 : 1.0;
  return static_cast<double>(edit_distance<char32_t>(ref, hyp)) / static_cast<double>(ref.size());
}

double normalized_edit_distance(std::string_view reference, std::string_view hypothesis) {
  const auto ref = normalized_codepoints(reference);
  const auto hyp = normalized_codepoints(hypothesis);
  const std::size_t longest = std::max(ref.size(), hyp.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(edit_distance<char32_t>(ref, hyp)) / static_cast<double>(longest);
}

OcrComponents ocr_components(std::string_view reference, std::string_view hypothesis) {
  if (tokenize(hypothesis).empty()) return {};
  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  return {clamp01(word_error_rate(reference, hypothesis)), clamp01(normalized_edit_distance(reference, hypothesis)),
          clamp01(char_error_rate(reference, hypothesis))};
}

}  // namespace t2veval
