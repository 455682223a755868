#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "t2veval/benchmark.hpp"
#include "t2veval/fixtures.hpp"
#include "t2veval/vocabulary.hpp"

using namespace t2veval;
using testing_support::TempDir;

namespace {

const char* kGood =
    R"({"id":"p1","text":"two dogs running on a beach","meta_class":"animal","sub_type":"general","attributes":{"objects":[{"name":"dog","count":2}],"amplitude":"large"}})";

Benchmark parse(const std::string& text) {
  std::istringstream in(text);
  return parse_benchmark(in, "mem");
}

}  // namespace

TEST(Vocabulary, Sizes) {
  EXPECT_EQ(kinetics400_labels().size(), 400u);
  EXPECT_EQ(coco_classes().size(), 80u);
  EXPECT_EQ(basic_colors().size(), 11u);
  EXPECT_TRUE(Vocabulary::standard().actions.contains("playing guitar"));
}

TEST(Benchmark, ParsesValidRecord) {
  const Benchmark b = parse(std::string(kGood) + "\n");
  ASSERT_EQ(b.records.size(), 1u);
  EXPECT_EQ(b.records[0].meta_class, MetaClass::animal);
  EXPECT_EQ(b.records[0].attributes.objects[0].count, 2);
  EXPECT_EQ(b.records[0].attributes.amplitude, Amplitude::large);
}

TEST(Benchmark, UnknownEnumIsValidationErrorNamingField) {
  std::string bad = kGood;
  bad.replace(bad.find("\"animal\""), 8, "\"robot\"");
  try {
    parse(bad);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.record_id(), "p1");
    EXPECT_EQ(e.field(), "meta_class");
  }
}

TEST(Benchmark, StyleTagRequiredForStyleSubtype) {
  std::string bad = kGood;
  bad.replace(bad.find("\"general\""), 9, "\"style\"");
  try {
    parse(bad);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "style_tag");
  }
}

TEST(Benchmark, UnknownActionAndColorRejected) {
  PromptRecord r;
  r.id = "x";
  r.text = "someone doing a thing";
  r.attributes.action_label = "flying unaided";
  EXPECT_THROW(validate_record(r), ValidationError);
  r.attributes.action_label.reset();
  r.attributes.objects = {{"cup", std::nullopt, "teal"}};
  EXPECT_THROW(validate_record(r), ValidationError);
  r.attributes.objects = {{"cup", 0, std::nullopt}};
  EXPECT_THROW(validate_record(r), ValidationError);
}

TEST(Benchmark, MalformedLineReportsLineNumber) {
  try {
    parse(std::string(kGood) + "\n{not json\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Benchmark, DuplicateIdRejected) { EXPECT_THROW(parse(std::string(kGood) + "\n" + kGood + "\n"), Error); }

TEST(Benchmark, UnknownKeyRejected) {
  std::string bad = kGood;
  bad.insert(1, "\"extra\":1,");
  EXPECT_THROW(parse(bad), ValidationError);
}

TEST(Benchmark, RoundTripsThroughFile) {
  TempDir dir("bench");
  const Benchmark b = fixture_benchmark();
  save_benchmark(dir / "b.jsonl", b);
  EXPECT_EQ(load_benchmark(dir / "b.jsonl"), b);
}

TEST(Benchmark, MissingFileIsError) { EXPECT_THROW(load_benchmark("/nonexistent/bench.jsonl"), Error); }

TEST(Benchmark, FixtureCoversEveryCategoryAndAttribute) {
  const auto s = benchmark_stats(fixture_benchmark());
  EXPECT_EQ(s.total, 12u);
  for (auto m : {MetaClass::human, MetaClass::animal, MetaClass::object, MetaClass::landscape})
    EXPECT_EQ(s.per_meta_class.at(m), 3u);
  for (auto t : {SubType::general, SubType::style, SubType::camera_motion}) EXPECT_EQ(s.per_sub_type.at(t), 4u);
  EXPECT_GT(s.attributes.with_counts, 0u);
  EXPECT_GT(s.attributes.with_colors, 0u);
  EXPECT_GT(s.attributes.with_celebrity, 0u);
  EXPECT_GT(s.attributes.with_render_text, 0u);
  EXPECT_GT(s.attributes.with_action, 0u);
  EXPECT_GT(s.attributes.with_amplitude, 0u);
}

TEST(Benchmark, ShippedBenchmarkStatistics) {
  const Benchmark b = load_benchmark(T2VEVAL_SOURCE_DIR "/data/benchmark.jsonl");
  const auto s = benchmark_stats(b);
  EXPECT_GE(s.total, 500u);
  EXPECT_NEAR(s.mean_words, 12.5, 2.0);
  std::size_t meta_sum = 0, sub_sum = 0, hist_sum = 0;
  for (const auto& [k, n] : s.per_meta_class) meta_sum += n;
  for (const auto& [k, n] : s.per_sub_type) sub_sum += n;
  for (const auto& [k, n] : s.word_histogram) hist_sum += n;
  EXPECT_EQ(meta_sum, s.total);
  EXPECT_EQ(sub_sum, s.total);
  EXPECT_EQ(hist_sum, s.total);
  std::set<std::string> styles, cameras;
  for (const auto& r : b.records) {
    if (r.style_tag) styles.insert(*r.style_tag);
    if (r.camera_tag) cameras.insert(*r.camera_tag);
  }
  EXPECT_EQ(styles.size(), 50u);
  EXPECT_EQ(cameras.size(), 20u);
}

TEST(Benchmark, WordCount) {
  EXPECT_EQ(word_count("  a  b\tc\n"), 3u);
  EXPECT_EQ(word_count(""), 0u);
}
