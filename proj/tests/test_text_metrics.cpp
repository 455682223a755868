#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "t2veval/text_metrics.hpp"

using namespace t2veval;

namespace {

std::string random_sentence(std::mt19937_64& rng, int max_len) {
  static const char* words[] = {"a", "cat", "dog", "runs", "on", "the", "grass", "red", "ball", "fast"};
  std::uniform_int_distribution<int> len(0, max_len), pick(0, 9);
  std::string s;
  for (int i = len(rng); i > 0; --i) {
    if (!s.empty()) s += ' ';
    s += words[pick(rng)];
  }
  return s;
}

std::string random_chars(std::mt19937_64& rng, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), pick(0, 4);
  std::string s;
  for (int i = len(rng); i > 0; --i) s += "abcde"[pick(rng)];
  return s;
}

}  // namespace

TEST(Tokenize, LowercasesAndStripsEdgePunctuation) {
  EXPECT_EQ(tokenize("  Hello, WORLD!  it's"), (std::vector<std::string>{"hello", "world", "it's"}));
  EXPECT_TRUE(tokenize(" ... ").empty());
}

TEST(Bleu, ExactMatchIsOne) { EXPECT_DOUBLE_EQ(sentence_bleu("a cat on a mat", "a cat on a mat"), 1.0); }

TEST(Bleu, ShortExactMatchUsesEffectiveOrder) { EXPECT_DOUBLE_EQ(sentence_bleu("red ball", "red ball"), 1.0); }

TEST(Bleu, NoOverlapIsZero) { EXPECT_EQ(sentence_bleu("a cat", "big dogs run"), 0.0); }

TEST(Bleu, EmptyHypothesisIsZero) { EXPECT_EQ(sentence_bleu("a cat", ""), 0.0); }

TEST(Bleu, BrevityPenaltyHandComputed) {
  // hyp "the cat" vs ref "the cat sat down": p1 = p2 = 1, bp = exp(1 - 4/2).
  EXPECT_NEAR(sentence_bleu("the cat sat down", "the cat"), std::exp(-1.0), 1e-12);
}

TEST(Bleu, ClipsRepeatedUnigrams) {
  // "the the the" vs "the cat": p1 = 1/3, p2 = 0 -> 0.
  EXPECT_EQ(sentence_bleu("the cat", "the the the"), 0.0);
  // effective order 1: hyp "the the" vs ref "the" -> p1 = 1/2, no brevity penalty.
  EXPECT_NEAR(sentence_bleu("the", "the the", 1), 0.5, 1e-12);
}

TEST(Bleu, MatchesBruteForceOracle) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto ref = random_sentence(rng, 12), hyp = random_sentence(rng, 12);
    EXPECT_NEAR(sentence_bleu(ref, hyp), oracle::bleu(tokenize(ref), tokenize(hyp)), 1e-9) << ref << " | " << hyp;
  }
}

TEST(EditDistance, MatchesFullMatrixDp) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const auto a = utf8_codepoints(random_chars(rng, 15)), b = utf8_codepoints(random_chars(rng, 15));
    EXPECT_EQ(edit_distance<char32_t>(a, b), oracle::edit_distance(a, b));
  }
}

TEST(ErrorRates, HandComputed) {
  EXPECT_DOUBLE_EQ(word_error_rate("open the door", "open a door"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(char_error_rate("OPEN", "0PEN"), 0.25);
  EXPECT_DOUBLE_EQ(normalized_edit_distance("open", "opened"), 2.0 / 6.0);
  EXPECT_DOUBLE_EQ(word_error_rate("", ""), 0.0);
}

TEST(ErrorRates, MatchOracleOnRandomInput) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const auto ref = random_sentence(rng, 8), hyp = random_sentence(rng, 8);
    const auto rt = tokenize(ref), ht = tokenize(hyp);
    const double wer = rt.empty() ? (ht.empty() ? 0.0 : 1.0)
                                  : static_cast<double>(oracle::edit_distance(rt, ht)) / static_cast<double>(rt.size());
    EXPECT_NEAR(word_error_rate(ref, hyp), wer, 1e-12);
  }
}

TEST(Utf8, InvalidBytesBecomeReplacement) {
  EXPECT_EQ(utf8_codepoints("a\xff"), (std::u32string{U'a', 0xfffd}));
  EXPECT_EQ(utf8_codepoints("\xc3\xa9"), std::u32string{U'é'});
  EXPECT_EQ(char_error_rate("caf\xc3\xa9", "cafe"), 0.25);
}

TEST(OcrComponents, EmptyHypothesisIsWorst) {
  const auto c = ocr_components("OPEN", "");
  EXPECT_EQ(c.combined(), 1.0);
}

TEST(OcrComponents, ClampsAndCombines) {
  const auto exact = ocr_components("open", "OPEN");
  EXPECT_EQ(exact.combined(), 0.0);
  const auto c = ocr_components("a", "many extra words here");
  EXPECT_LE(c.wer, 1.0);
  EXPECT_LE(c.cer, 1.0);
}
