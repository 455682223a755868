#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace t2veval {

/// Lower-cased whitespace tokens with leading/trailing punctuation stripped.
std::vector<std::string> tokenize(std::string_view text);

/// UTF-8 decode; invalid bytes map to U+FFFD.
std::u32string utf8_codepoints(std::string_view text);

/// Levenshtein distance with unit costs.
template <typename T>
std::size_t edit_distance(std::span<const T> a, std::span<const T> b);

/// Sentence BLEU of `hypothesis` against a single `reference`: uniform weights over
/// 1..4-grams, brevity penalty exp(1 - r/c) when c < r, no smoothing. Orders longer
/// than the hypothesis are dropped (effective order), so short exact matches score 1.
double sentence_bleu(std::string_view reference, std::string_view hypothesis, int max_order = 4);

/// Word error rate: word-level edit distance over reference word count.
double word_error_rate(std::string_view reference, std::string_view hypothesis);
/// Character error rate: code-point edit distance over reference length. Both strings
/// are normalized to their tokens joined by single spaces first (likewise for NED).
double char_error_rate(std::string_view reference, std::string_view hypothesis);
/// Normalized edit distance: code-point edit distance over the longer length.
double normalized_edit_distance(std::string_view reference, std::string_view hypothesis);

struct OcrComponents {
  double wer = 1.0;
  double ned = 1.0;
  double cer = 1.0;
  /// Mean of the three components.
  double combined() const { return (wer + ned + cer) / 3.0; }
};

/// Each component clamped to [0, 1]; an empty hypothesis yields 1 for all three.
OcrComponents ocr_components(std::string_view reference, std::string_view hypothesis);

}  // namespace t2veval
