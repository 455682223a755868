#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "support.hpp"
#include "synthetic.hpp"
#include "t2veval/alignment.hpp"
#include "t2veval/error.hpp"

using namespace t2veval;
using testing_support::TempDir;

namespace {

HumanRating rating(const std::string& rater, const std::string& model, const std::string& prompt, int s) {
  HumanRating r{rater, model, prompt, {}};
  for (Aspect a : kAllAspects) r.scores[a] = s;
  return r;
}

}  // namespace

TEST(Ratings, ValidationRequiresAllAspectsInRange) {
  HumanRating r = rating("r1", "m", "p", 3);
  EXPECT_NO_THROW(validate_rating(r));
  r.scores[Aspect::motion_quality] = 6;
  EXPECT_THROW(validate_rating(r), ValidationError);
  r.scores.erase(Aspect::motion_quality);
  EXPECT_THROW(validate_rating(r), ValidationError);
}

TEST(Ratings, ParseRejectsDuplicatesAndBadValues) {
  const std::string line = to_json(rating("r1", "m", "p", 4)).dump() + "\n";
  std::istringstream ok(line);
  EXPECT_EQ(parse_ratings(ok, "mem").size(), 1u);
  std::istringstream dup(line + line);
  EXPECT_THROW(parse_ratings(dup, "mem"), ParseError);
  std::istringstream bad(R"({"rater_id":"r","model_id":"m","prompt_id":"p","scores":{"visual_quality":2.5}})" "\n");
  EXPECT_THROW(parse_ratings(bad, "mem"), Error);
}

TEST(Ratings, WriteParseRoundTrip) {
  std::vector<HumanRating> rs = {rating("r2", "b", "p1", 2), rating("r1", "a", "p2", 5), rating("r1", "a", "p1", 1)};
  std::ostringstream out;
  write_ratings(out, rs, "study");
  std::istringstream in(out.str());
  const auto back = parse_ratings(in, "mem");
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0], rs[2]);
  EXPECT_EQ(back[2], rs[0]);
}

TEST(Ratings, AggregationNormalizesMeanScore) {
  const auto top = aggregate_ratings({rating("r1", "m", "p", 5), rating("r2", "m", "p", 5), rating("r3", "m", "p", 5)});
  ASSERT_EQ(top.size(), kAllAspects.size());
  for (const auto& l : top) EXPECT_DOUBLE_EQ(l.value, 1.0);
  const auto low = aggregate_ratings({rating("r1", "m", "p", 1), rating("r2", "m", "p", 1), rating("r3", "m", "p", 1)});
  for (const auto& l : low) EXPECT_DOUBLE_EQ(l.value, 0.0);
  const auto mixed = aggregate_ratings({rating("r1", "m", "p", 2), rating("r2", "m", "p", 3), rating("r3", "m", "p", 5)});
  EXPECT_DOUBLE_EQ(mixed[0].value, (10.0 / 3.0 - 1.0) / 4.0);
}

TEST(Split, DeterministicDisjointAndOrderFree) {
  std::vector<SampleKey> keys;
  for (int i = 0; i < 600; ++i) keys.push_back({"m" + std::to_string(i % 6), "p" + std::to_string(i)});
  const auto [train, hold] = split_samples(keys, 300, 200, 9);
  EXPECT_EQ(train.size(), 300u);
  EXPECT_EQ(hold.size(), 200u);
  std::set<SampleKey> seen(train.begin(), train.end());
  for (const auto& k : hold) EXPECT_FALSE(seen.count(k));
  std::reverse(keys.begin(), keys.end());
  const auto again = split_samples(keys, 300, 200, 9);
  EXPECT_EQ(again.first, train);
  EXPECT_EQ(again.second, hold);
  EXPECT_NE(split_samples(keys, 300, 200, 10).first, train);
}

TEST(Split, ShrinksProportionally) {
  std::vector<SampleKey> keys;
  for (int i = 0; i < 100; ++i) keys.push_back({"m", "p" + std::to_string(i)});
  const auto [train, hold] = split_samples(keys, 300, 200, 1);
  EXPECT_EQ(train.size(), 60u);
  EXPECT_EQ(hold.size(), 40u);
}

TEST(Fit, NoiselessBlendIsRecoveredExactly) {
  const auto d = synthetic::blend(3, 0.7, 0.3, 0.0);
  const AlignmentModel m = fit_alignment(d.labels, d.suites, synthetic::visual_only(3));
  const AspectModel* vq = m.find(Aspect::visual_quality);
  ASSERT_NE(vq, nullptr);
  EXPECT_NEAR(vq->intercept, 0.0, 1e-9);
  EXPECT_NEAR(vq->coefficients[0], 0.7, 1e-9);
  EXPECT_NEAR(vq->coefficients[1], 0.3, 1e-9);
  const auto report = evaluate_alignment(m, d.labels, d.suites);
  EXPECT_EQ(report.aspects.at(0).samples, 200u);
  EXPECT_DOUBLE_EQ(*synthetic::row(report, "ours").spearman, 1.0);
}

TEST(Fit, MatchesNormalEquationsOnTrainSplit) {
  const auto d = synthetic::blend(5, 0.4, 0.9, 0.05);
  const AlignmentModel m = fit_alignment(d.labels, d.suites, synthetic::visual_only(5));
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  std::map<SampleKey, double> label;
  for (const auto& l : d.labels) label[{l.model_id, l.prompt_id}] = l.value;
  for (const auto& key : m.fit_metadata.train) {
    const auto& s = d.suites.at(key.first);
    rows.push_back({s.metrics.at("vqa_a").per_video.at(key.second), s.metrics.at("vqa_t").per_video.at(key.second)});
    y.push_back(label.at(key));
  }
  const auto b = oracle::normal_equations(rows, y);
  const AspectModel& vq = *m.find(Aspect::visual_quality);
  EXPECT_NEAR(vq.intercept, b[0], 1e-9);
  EXPECT_NEAR(vq.coefficients[0], b[1], 1e-9);
  EXPECT_NEAR(vq.coefficients[1], b[2], 1e-9);
}

TEST(Fit, LowerBetterMetricsAreNegated) {
  auto d = synthetic::blend(2, 0.5, 0.5, 0.0);
  for (auto& [model, s] : d.suites) {
    std::map<std::string, double> w;
    for (const auto& [p, v] : s.metrics.at("vqa_t").per_video) w[p] = -v;
    s.metrics["warping_error"] = finish_metric("warping_error", w);
  }
  FitOptions o = synthetic::visual_only(2);
  o.aspect_metrics = {{Aspect::visual_quality, {"vqa_a", "warping_error"}}};
  const AlignmentModel m = fit_alignment(d.labels, d.suites, o);
  const AspectModel& vq = *m.find(Aspect::visual_quality);
  const std::size_t w = vq.metric_ids[0] == "warping_error" ? 0 : 1;
  ASSERT_EQ(vq.metric_ids[w], "warping_error");
  EXPECT_TRUE(vq.negated[w]);
  EXPECT_FALSE(vq.negated[1 - w]);
  EXPECT_NEAR(vq.coefficients[w], 0.5, 1e-9);
  std::vector<double> raw(2);
  raw[w] = -0.4;
  raw[1 - w] = 0.2;
  EXPECT_NEAR(vq.predict(raw), 0.3, 1e-9);
}

TEST(Fit, ModelJsonRoundTrip) {
  const auto d = synthetic::blend(4, 0.6, 0.2, 0.01);
  const AlignmentModel m = fit_alignment(d.labels, d.suites, synthetic::visual_only(4));
  TempDir dir("align");
  save_alignment(dir / "m.json", m);
  const AlignmentModel back = load_alignment(dir / "m.json");
  EXPECT_EQ(to_json(back), to_json(m));
  EXPECT_EQ(back.fit_metadata.holdout, m.fit_metadata.holdout);
}

TEST(Apply, UsesAggregatesAndMarksIncompleteScores) {
  const auto d = synthetic::blend(6, 0.7, 0.3, 0.0, 2, 10);
  const AlignmentModel m = fit_alignment(d.labels, d.suites, synthetic::visual_only(6));
  const auto scores = apply_alignment(m, d.suites);
  ASSERT_EQ(scores.size(), 2u);
  const auto& s0 = d.suites.at("model0");
  const double expect = 0.7 * s0.metrics.at("vqa_a").aggregate + 0.3 * s0.metrics.at("vqa_t").aggregate;
  EXPECT_NEAR(*scores[0].aspects.at(Aspect::visual_quality), expect, 1e-9);
  EXPECT_FALSE(scores[0].complete);

  TempDir dir("final");
  save_final_scores(dir / "f.json", scores);
  const auto back = load_final_scores(dir / "f.json");
  EXPECT_EQ(to_json(back), to_json(scores));
}
