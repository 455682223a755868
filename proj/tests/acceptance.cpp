// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "support.hpp"
#include "synthetic.hpp"
#include "t2veval/correlation.hpp"
#include "t2veval/fixtures.hpp"
#include "t2veval/metrics.hpp"
#include "t2veval/mock_backends.hpp"
#include "t2veval/regression.hpp"
#include "t2veval/reporting.hpp"
#include "t2veval/text_metrics.hpp"
#include "t2veval/video_ops.hpp"

using namespace t2veval;
using namespace testing_support;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Collects failed sub-checks of one criterion.
struct Checker {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream s;
      s.precision(17);
      s << what << ": got " << got << ", want " << want << " (tol " << tol << ")";
      failures.push_back(s.str());
    }
  }
};

int failed_criteria = 0;

void report(const std::string& name, const std::function<std::string(Checker&)>& body) {
  Checker c;
  std::string detail;
  try {
    detail = body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const bool ok = c.failures.empty();
  if (!ok) ++failed_criteria;
  std::printf("%s  %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.empty() ? "" : "  ", detail.c_str());
  for (std::size_t i = 0; i < c.failures.size() && i < 5; ++i) std::printf("      %s\n", c.failures[i].c_str());
  if (c.failures.size() > 5) std::printf("      ... %zu more\n", c.failures.size() - 5);
}

std::vector<std::string> random_words(SplitMix64& rng, std::size_t n, std::size_t vocab) {
  static const char* kWords[] = {"a", "red", "cup", "on", "the", "table", "dog", "runs", "blue", "sky", "over", "hill"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(kWords[rng.below(vocab)]);
  return out;
}

std::string join(const std::vector<std::string>& w) {
  std::string s;
  for (const auto& x : w) s += (s.empty() ? "" : " ") + x;
  return s;
}

std::u32string codepoints(const std::string& s) { return std::u32string(s.begin(), s.end()); }

constexpr int kCases = 60;
constexpr double kTol = 1e-9;

std::string kernel_oracles(Checker& c) {
  const auto t0 = Clock::now();
  SplitMix64 rng(20240101);
  for (int i = 0; i < kCases; ++i) {
    const auto ref = random_words(rng, 1 + rng.below(12), 4 + rng.below(8));
    auto hyp = random_words(rng, 1 + rng.below(12), 4 + rng.below(8));
    if (i % 4 == 0) hyp = ref;
    const std::string tag = "case " + std::to_string(i);
    c.near(sentence_bleu(join(ref), join(hyp)), oracle::bleu(ref, hyp), kTol, "BLEU " + tag);

    const std::string r = join(ref), h = join(hyp);
    const double ed_words = static_cast<double>(oracle::edit_distance(ref, hyp));
    const double ed_chars = static_cast<double>(oracle::edit_distance(codepoints(r), codepoints(h)));
    c.near(word_error_rate(r, h), ed_words / static_cast<double>(ref.size()), kTol, "WER " + tag);
    c.near(char_error_rate(r, h), ed_chars / static_cast<double>(r.size()), kTol, "CER " + tag);
    c.near(normalized_edit_distance(r, h), ed_chars / static_cast<double>(std::max(r.size(), h.size())), kTol,
           "NED " + tag);
  }
  for (int i = 0; i < kCases; ++i) {
    const std::size_t n = 5 + rng.below(40);
    std::vector<double> x(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = static_cast<double>(rng.below(i % 2 ? 6 : 1000));  // odd cases carry ties
      y[k] = static_cast<double>(rng.below(i % 3 ? 7 : 1000));
    }
    x[0] = -1;  // never constant
    y[1] = -1;
    const std::string tag = "case " + std::to_string(i);
    c.near(spearman(x, y), oracle::spearman(x, y), kTol, "Spearman " + tag);
    c.near(kendall_tau_b(x, y), oracle::kendall_tau_b(x, y), kTol, "Kendall " + tag);
  }
  for (int i = 0; i < kCases; ++i) {
    const std::size_t p = 1 + rng.below(4), n = 20 + rng.below(60);
    std::vector<std::vector<double>> rows(n, std::vector<double>(p));
    std::vector<double> y(n);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
    for (std::size_t k = 0; k < n; ++k) {
      for (auto& v : rows[k]) v = rng.uniform() * 2 - 1;
      y[k] = rng.normal();
    }
    const OlsFit fit = ols_fit(rows, y, names);
    const auto want = oracle::normal_equations(rows, y);
    const std::string tag = "case " + std::to_string(i);
    c.near(fit.intercept, want[0], kTol, "OLS intercept " + tag);
    for (std::size_t j = 0; j < p; ++j) c.near(fit.coefficients[j], want[j + 1], kTol, "OLS coef " + tag);
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 30.0, "runtime " + std::to_string(secs) + " s exceeds 30 s");
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%d cases per kernel family, %.2f s)", kCases, secs);
  return buf;
}

std::string equation_checks(Checker& c) {
  constexpr double exact = 1e-12;
  {  // text-video similarity over two frames
    TableEmbedder e;
    e.texts["p"] = {1, 0};
    e.images[content_hash(frame(0))] = {0.8, 0.6};
    e.images[content_hash(frame(1))] = {0.6, 0.8};
    c.near(clip_score(set_of({item(record("a", "p"), {frame(0), frame(1)})}), e).result.aggregate, 0.7, exact,
           "clip_score");
  }
  {  // similarity to reference images
    TableEmbedder e;
    e.images[content_hash(frame(0))] = {1, 0};
    e.images[content_hash(frame(1))] = {0, 1};
    e.images[content_hash(frame(9))] = {1, 1};
    e.images[content_hash(frame(10))] = {2, 0};
    e.images[content_hash(frame(11))] = {0, 3};
    InMemoryReferenceSource refs;
    refs.references["a"] = {frame(0), frame(1), frame(9), frame(10), frame(11)};
    c.near(sd_score(set_of({item(record("a"), {frame(0)})}), e, refs).result.aggregate,
           (2.0 + 1.0 / std::sqrt(2.0)) / 5.0, exact, "sd_score");
  }
  {  // caption BLEU, one exact caption and one disjoint
    ScriptedCaptioner cap;
    cap.captions_out = {"a red cup on a table", "nothing matches here"};
    c.near(blip_bleu(set_of({item(record("a"), {frame(0)})}), cap, 2).result.aggregate, 0.5, exact, "blip_bleu");
  }
  {  // detection, color and count over frames
    auto r = record("a");
    r.attributes.objects = {{"cup", std::nullopt, "red"}, {"dog", std::nullopt, std::nullopt}};
    ScriptedDetector d;
    d.table[{content_hash(frame(0)), "cup"}] = {true, 1, true};
    d.table[{content_hash(frame(0)), "dog"}] = {false, 0, std::nullopt};
    d.table[{content_hash(frame(1)), "cup"}] = {true, 1, false};
    d.table[{content_hash(frame(1)), "dog"}] = {true, 1, std::nullopt};
    const auto set = set_of({item(r, {frame(0), frame(1)})});
    c.near(detection_score(set, d).result.aggregate, 0.75, exact, "detection_score");
    c.near(color_score(set, d).result.aggregate, 0.5, exact, "color_score");

    auto counted = record("b");
    counted.attributes.objects = {{"cup", 2, std::nullopt}};
    ScriptedDetector cd;
    const int counts[] = {2, 2, 1, 2};
    std::vector<Image> frames;
    for (int t = 0; t < 4; ++t) {
      frames.push_back(frame(t));
      cd.table[{content_hash(frame(t)), "cup"}] = {true, counts[t], std::nullopt};
    }
    c.near(count_score(set_of({item(counted, frames)}), cd).result.aggregate, 0.875, exact,
           "count_score, expected 2, detected [2,2,1,2]");
  }
  {  // identity distance: per-frame minimum over the gallery, faceless frames skipped
    auto r = record("a", "Ada smiling");
    r.attributes.celebrity = "Ada";
    InMemoryReferenceSource g;
    g.galleries["Ada"] = {frame(20), frame(21)};
    ScriptedFaces f;
    const auto h = [](int i) { return content_hash(frame(i)); };
    f.table[{h(0), h(20)}] = 0.4;
    f.table[{h(0), h(21)}] = 0.2;
    f.table[{h(1), h(20)}] = std::nullopt;
    f.table[{h(1), h(21)}] = std::nullopt;
    f.table[{h(2), h(20)}] = 0.6;
    f.table[{h(2), h(21)}] = 0.8;
    c.near(celebrity_id_score(set_of({item(r, {frame(0), frame(1), frame(2)})}), f, g).result.aggregate, 0.4, exact,
           "celebrity_id_score");
  }
  {  // text rendering: exact read scores 0, empty read scores 1
    auto r = record("a", "a sign saying OPEN");
    r.attributes.render_text = "OPEN";
    ScriptedOcr o;
    o.table[content_hash(frame(0))] = "OPEN";
    o.table[content_hash(frame(1))] = "";
    c.near(ocr_score(set_of({item(r, {frame(0), frame(1)})}), o).result.aggregate, 0.5, exact, "ocr_score");
  }
  {  // action accuracy
    auto a = record("a");
    a.attributes.action_label = "playing guitar";
    auto b = record("b");
    b.attributes.action_label = "dancing ballet";
    ScriptedAction cl;
    cl.label = "playing guitar";
    c.near(action_score(set_of({item(a, {frame(0)}), item(b, {frame(1)})}), cl).result.aggregate, 0.5, exact,
           "action_score");
  }
  {  // temporal consistency over three frames
    TableEmbedder e;
    e.images[content_hash(frame(0))] = {1, 0};
    e.images[content_hash(frame(1))] = {0.6, 0.8};
    e.images[content_hash(frame(2))] = {0, 1};
    const auto set = set_of({item(record("a"), {frame(0), frame(1), frame(2)})});
    c.near(clip_temp(set, e).result.aggregate, 0.7, exact, "clip_temp");
    c.near(face_consistency(set, e).result.aggregate, 0.3, exact, "face_consistency");
  }
  {  // flow magnitude and amplitude classification
    auto big = record("big");
    big.attributes.amplitude = Amplitude::large;
    auto calm = record("calm");
    calm.attributes.amplitude = Amplitude::small;
    ScriptedFlow f;
    f.table[content_hash(frame(0))] = {3.f, 4.f};
    f.table[content_hash(frame(1))] = {0.f, 1.f};
    const auto set = set_of({item(big, {frame(0), frame(1), frame(2)}), item(calm, {frame(5), frame(6)})});
    const auto fs = flow_score(set, f).result;
    c.near(fs.per_video.at("big"), 3.0, exact, "flow_score large video");
    c.near(fs.per_video.at("calm"), 0.0, exact, "flow_score still video");
    c.near(motion_ac_score(set, f, MetricConfig{}).result.aggregate, 1.0, exact, "motion_ac_score");
  }
  {  // warping error: a one-pixel shift warped by the true flow
    Image a(6, 4), b(6, 4);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 6; ++x) {
        a.set(x, y, Rgb{static_cast<std::uint8_t>(40 * x), 0, 0});
        b.set(x, y, Rgb{static_cast<std::uint8_t>(40 * std::max(0, x - 1)), 0, 0});
      }
    const FlowField shift(6, 4, 1.f, 0.f);
    const FlowField none(6, 4);
    c.near(warping_mse(a, b, shift, 1), 0.0, exact, "warping_error with true flow");
    // Without flow every pixel but x=0 is off by 40 in one of three channels.
    c.near(warping_mse(a, b, none), 20.0 * 40.0 * 40.0 / (24.0 * 3.0), exact, "warping_error with zero flow");
  }
  return "";
}

std::string trivial_video(Checker& c) {
  Image still(32, 24);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 32; ++x)
      still.set(x, y, Rgb{static_cast<std::uint8_t>(x * 7), static_cast<std::uint8_t>(y * 9), 40});
  auto r = record("still");
  r.attributes.amplitude = Amplitude::small;
  const auto set = set_of({item(r, std::vector<Image>(6, still))});
  MockEmbedder emb;
  GlobalShiftFlow flow;
  constexpr double tol = 1e-6;
  c.near(warping_error(set, flow).result.aggregate, 0.0, tol, "warping_error");
  c.near(clip_temp(set, emb).result.aggregate, 1.0, tol, "clip_temp");
  c.near(face_consistency(set, emb).result.aggregate, 1.0, tol, "face_consistency");
  c.near(flow_score(set, flow).result.aggregate, 0.0, tol, "flow_score");
  const double large = flow_score(set, flow).result.aggregate;
  c.expect(!is_large_motion(large, MetricConfig{}.flow_threshold), "motion class is not small");
  c.near(motion_ac_score(set, flow, MetricConfig{}).result.aggregate, 1.0, tol, "motion_ac_score on small prompt");
  return "";
}

std::string inception_cases(Checker& c) {
  constexpr double tol = 1e-6;
  const std::vector<std::vector<double>> same(8, std::vector<double>{0.2, 0.5, 0.3});
  c.near(inception_score(same), 1.0, tol, "identical distributions");
  for (int k : {2, 5, 10}) {
    std::vector<std::vector<double>> onehot;
    for (int i = 0; i < k; ++i) {
      std::vector<double> p(static_cast<std::size_t>(k), 0.0);
      p[static_cast<std::size_t>(i)] = 1.0;
      onehot.push_back(p);
    }
    c.near(inception_score(onehot), static_cast<double>(k), tol, std::to_string(k) + " distinct one-hot samples");
  }
  return "";
}

std::string published_replay(Checker& c) {
  const std::filesystem::path root = std::filesystem::path(T2VEVAL_SOURCE_DIR) / "data" / "published";
  const auto lb = build_leaderboard(load_suite_dir(root / "results"), {}, true);
  struct Want {
    const char* metric;
    const char* model;
    const char* shown;
  };
  const Want wants[] = {{"vqa_t", "Gen2", "10.13"},       {"is", "ModelScope-XL", "15.99"},
                        {"clip_score", "Floor33", "21.15"}, {"color_score", "ZeroScope", "46.35"},
                        {"clip_temp", "PikaLab", "99.97"},  {"warping_error", "Gen2", "58.19"}};
  for (const auto& w : wants) {
    std::vector<std::string> best;
    for (const auto& row : lb.rows)
      if (row.marks.at(w.metric) == Mark::best) best.push_back(row.model_id);
    c.expect(best == std::vector<std::string>{w.model},
             std::string(w.metric) + ": best mark on " + (best.empty() ? "nobody" : best.front()) + ", want " + w.model);
    const auto* row = lb.find(w.model);
    c.expect(row && format_metric(w.metric, row->metrics.at(w.metric), true) == w.shown,
             std::string(w.metric) + ": rendered value differs from " + w.shown);
  }
  return "(6 marks)";
}

std::string alignment_property(Checker& c) {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto d = synthetic::blend(seed, 0.7, 0.3, 0.02);
    const AlignmentModel m = fit_alignment(d.labels, d.suites, synthetic::visual_only(seed));
    c.expect(m.fit_metadata.train.size() == 300 && m.fit_metadata.holdout.size() == 200, "split is not 300/200");
    const auto rep = evaluate_alignment(m, d.labels, d.suites);
    const auto ours = synthetic::row(rep, "ours").spearman, avg = synthetic::row(rep, "avg").spearman;
    if (ours && avg && *ours >= *avg) ++wins;
  }
  c.expect(wins >= 95, "fitted model beat the average in only " + std::to_string(wins) + " of 100 seeds");

  const auto d = synthetic::blend(7, 0.7, 0.3, 0.0);
  const AlignmentModel m = fit_alignment(d.labels, d.suites, synthetic::visual_only(7));
  const AspectModel& vq = *m.find(Aspect::visual_quality);
  c.near(vq.coefficients[0], 0.7, 1e-6, "noiseless coefficient of vqa_a");
  c.near(vq.coefficients[1], 0.3, 1e-6, "noiseless coefficient of vqa_t");
  c.near(vq.intercept, 0.0, 1e-6, "noiseless intercept");
  const auto rho = synthetic::row(evaluate_alignment(m, d.labels, d.suites), "ours").spearman;
  c.expect(rho && *rho == 1.0, "noiseless holdout rho is not 1");
  return "(" + std::to_string(wins) + "/100 seeds)";
}

std::string end_to_end(Checker& c) {
  const auto t0 = Clock::now();
  TempDir dir("acceptance");
  write_fixture(dir.path());
  const Benchmark bench = load_benchmark(dir / "benchmark.jsonl");

  std::set<MetaClass> metas;
  std::set<SubType> subs;
  std::map<MetaClass, int> per_meta;
  bool counts = false, colors = false, celeb = false, text = false, action = false, amplitude = false;
  for (const auto& r : bench.records) {
    ++per_meta[r.meta_class];
    subs.insert(r.sub_type);
    for (const auto& o : r.attributes.objects) {
      counts |= o.count.has_value();
      colors |= o.color.has_value();
    }
    celeb |= r.attributes.celebrity.has_value();
    text |= r.attributes.render_text.has_value();
    action |= r.attributes.action_label.has_value();
    amplitude |= r.attributes.amplitude.has_value();
  }
  c.expect(bench.records.size() == 12, "fixture does not have 12 prompts");
  for (const auto& [m, n] : per_meta) c.expect(n == 3, "meta class without 3 prompts");
  c.expect(per_meta.size() == 4 && subs.size() == 3, "fixture misses a meta class or sub-type");
  c.expect(counts && colors && celeb && text && action && amplitude, "fixture misses an attribute kind");

  std::ifstream cfg(dir / "config.json");
  const nlohmann::json bindings = nlohmann::json::parse(cfg).at("backends");
  const auto base = dir.path();
  const RegistryFactory factory = [bindings, base] { return make_registry(bindings, base); };

  auto run_once = [&](const std::string& out_dir, int workers) {
    std::filesystem::create_directories(dir / out_dir);
    for (const auto& model : FixtureOptions{}.models) {
      const IngestResult in = ingest(dir / "videos" / model, bench);
      SuiteOptions opt;
      opt.workers = workers;
      opt.benchmark_version = bench.version;
      SuiteResult r = run_suite(in.set, factory, opt);
      attach_ingest(r, in);
      c.expect(!r.partial(), model + " run is partial");
      c.expect(r.metrics.size() == metric_catalog().size(), model + " run is missing metrics");
      save_suite(dir / out_dir / (model + ".jsonl"), r);
    }
  };
  run_once("first", 1);
  run_once("second", 4);
  auto bytes = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  for (const auto& model : FixtureOptions{}.models) {
    const std::string a = bytes(dir / "first" / (model + ".jsonl")), b = bytes(dir / "second" / (model + ".jsonl"));
    c.expect(!a.empty() && a == b, model + " results differ between runs");
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 300.0, "runtime " + std::to_string(secs) + " s exceeds 5 minutes");
  char buf[64];
  std::snprintf(buf, sizeof buf, "(3 models, %.2f s)", secs);
  return buf;
}

}  // namespace

int main() {
  report("math kernels agree with brute-force oracles within 1e-9", kernel_oracles);
  report("metric aggregation matches hand arithmetic on 2/3/4-frame fixtures", equation_checks);
  report("constant video invariants within 1e-6", trivial_video);
  report("inception score analytic cases within 1e-6", inception_cases);
  report("published results replay with the reported best marks", published_replay);
  report("fitted alignment beats the plain average on synthetic ratings", alignment_property);
  report("two fixture runs produce byte-identical results", end_to_end);
  std::printf("%s: %d criteria failed\n", failed_criteria ? "FAIL" : "PASS", failed_criteria);
  return failed_criteria ? 1 : 0;
}
