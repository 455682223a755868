#include "t2veval/suite.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <set>
#include <tuple>
#include <unordered_map>

#include "t2veval/error.hpp"
#include "t2veval/image.hpp"
#include "t2veval/version.hpp"
#include "t2veval/video_ops.hpp"

namespace t2veval {

using nlohmann::json;

const MetricResult* SuiteResult::find(std::string_view metric_id) const {
  auto it = metrics.find(std::string(metric_id));
  return it == metrics.end() ? nullptr : &it->second;
}

namespace {

/// Memoizes embeddings of one video's frames and texts. Only wraps deterministic backends.
class CachingEmbedder : public TextImageEmbedder {
 public:
  explicit CachingEmbedder(TextImageEmbedder& inner) : inner_(inner) {}
  std::string name() const override { return inner_.name(); }
  bool deterministic() const override { return inner_.deterministic(); }
  Embedding embed_image(const Image& frame) override {
    if (!inner_.deterministic()) return inner_.embed_image(frame);
    const auto key = content_hash(frame);
    auto it = images_.find(key);
    if (it == images_.end()) it = images_.emplace(key, inner_.embed_image(frame)).first;
    return it->second;
  }
  Embedding embed_text(std::string_view text) override {
    if (!inner_.deterministic()) return inner_.embed_text(text);
    auto it = texts_.find(std::string(text));
    if (it == texts_.end()) it = texts_.emplace(std::string(text), inner_.embed_text(text)).first;
    return it->second;
  }

 private:
  TextImageEmbedder& inner_;
  std::unordered_map<std::uint64_t, Embedding> images_;
  std::map<std::string, Embedding> texts_;
};

/// Flow fields shared by Flow-Score and Warping Error within one video.
class CachingFlow : public FlowEstimator {
 public:
  explicit CachingFlow(FlowEstimator& inner) : inner_(inner) {}
  std::string name() const override { return inner_.name(); }
  bool deterministic() const override { return inner_.deterministic(); }
  FlowField estimate_flow(const Image& from, const Image& to) override {
    if (!inner_.deterministic()) return inner_.estimate_flow(from, to);
    const auto key = std::make_pair(content_hash(from), content_hash(to));
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, inner_.estimate_flow(from, to)).first;
    return it->second;
  }

 private:
  FlowEstimator& inner_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, FlowField> cache_;
};

struct Plan {
  std::set<std::string, std::less<>> enabled;
  MetricConfig config;
  bool face_uses_analyzer = false;
  bool on(std::string_view id) const { return enabled.count(id) > 0; }
};

struct Partial {
  std::map<std::string, std::map<std::string, double>> values;
  std::vector<ItemError> errors;
  std::map<std::string, std::vector<std::vector<double>>> is_samples;
};

void absorb(Partial& out, std::string_view id, PerVideo pv) {
  auto& dst = out.values[std::string(id)];
  dst.insert(pv.values.begin(), pv.values.end());
  out.errors.insert(out.errors.end(), pv.errors.begin(), pv.errors.end());
}

void evaluate_item(const EvaluationItem& item, const BackendRegistry& reg, const Plan& plan, Partial& out) {
  const std::span<const EvaluationItem> one(&item, 1);
  const MetricConfig& cfg = plan.config;

  if (plan.on("vqa_a") || plan.on("vqa_t")) {
    auto [a, t] = vqa_values(one, *reg.vqa_scorer);
    if (plan.on("vqa_a")) absorb(out, "vqa_a", std::move(a));
    if (plan.on("vqa_t")) absorb(out, "vqa_t", std::move(t));
  }
  if (plan.on("is")) {
    auto samples = class_prob_samples(one, *reg.inception_classifier, out.errors);
    out.is_samples.merge(samples);
  }

  std::optional<CachingEmbedder> emb;
  if (reg.text_image_embedder) emb.emplace(*reg.text_image_embedder);
  if (plan.on("clip_score")) absorb(out, "clip_score", clip_score_values(one, *emb));
  if (plan.on("sd_score")) absorb(out, "sd_score", sd_score_values(one, *emb, *reg.reference_image_source));
  if (plan.on("blip_bleu")) absorb(out, "blip_bleu", blip_bleu_values(one, *reg.captioner, cfg.caption_count));
  if (plan.on("detection_score")) absorb(out, "detection_score", detection_score_values(one, *reg.detector_tracker));
  if (plan.on("color_score")) absorb(out, "color_score", color_score_values(one, *reg.detector_tracker));
  if (plan.on("count_score")) absorb(out, "count_score", count_score_values(one, *reg.detector_tracker));
  if (plan.on("ocr_score")) absorb(out, "ocr_score", ocr_score_values(one, *reg.ocr_engine));
  if (plan.on("celebrity_id_score"))
    absorb(out, "celebrity_id_score", celebrity_id_values(one, *reg.face_analyzer, *reg.reference_image_source));
  if (plan.on("action_score")) absorb(out, "action_score", action_score_values(one, *reg.action_classifier));

  if (plan.on("flow_score") || plan.on("motion_ac_score") || plan.on("warping_error")) {
    CachingFlow flow(*reg.flow_estimator);
    if (plan.on("flow_score") || plan.on("motion_ac_score")) {
      PerVideo fs = flow_score_values(one, flow);
      if (plan.on("motion_ac_score") && applicable("motion_ac_score", item.record)) {
        if (fs.errors.empty()) {
          absorb(out, "motion_ac_score", motion_ac_from_flow(one, fs.values, cfg.flow_threshold));
        } else {
          for (auto e : fs.errors) {
            e.metric_id = "motion_ac_score";
            out.errors.push_back(std::move(e));
          }
        }
      }
      if (plan.on("flow_score")) absorb(out, "flow_score", std::move(fs));
    }
    if (plan.on("warping_error")) absorb(out, "warping_error", warping_error_values(one, flow));
  }

  if (plan.on("clip_temp")) absorb(out, "clip_temp", clip_temp_values(one, *emb));
  if (plan.on("face_consistency")) {
    if (plan.face_uses_analyzer)
      absorb(out, "face_consistency", face_consistency_values(one, *reg.face_analyzer));
    else
      absorb(out, "face_consistency", face_consistency_values(one, *emb));
  }
}

Partial evaluate_items(const EvaluationSet& set, const std::vector<std::size_t>& indices,
                       const BackendRegistry& reg, const Plan& plan) {
  Partial out;
  for (std::size_t i : indices) evaluate_item(set.items[i], reg, plan, out);
  return out;
}

Plan make_plan(const BackendRegistry& registry, const SuiteOptions& options, std::vector<SkipRecord>& skipped) {
  options.config.validate();
  if (options.workers < 1) throw ConfigError("worker count must be >= 1");
  FrameSamplingPolicy::parse(options.sampling);

  std::set<std::string, std::less<>> selected;
  if (options.metrics.empty()) {
    for (const auto& m : metric_catalog()) selected.insert(std::string(m.id));
  }
  for (const auto& id : options.metrics) {
    try {
      metric_info(id);
    } catch (const Error&) {
      throw ConfigError("unknown metric '" + id + "' in metric selection");
    }
    selected.insert(id);
  }
  for (const auto& id : options.required_metrics) {
    try {
      metric_info(id);
    } catch (const Error&) {
      throw ConfigError("unknown metric '" + id + "' in required metrics");
    }
    if (!selected.count(id)) throw ConfigError("required metric '" + id + "' is not selected");
  }

  Plan plan;
  plan.config = options.config;
  for (const auto& m : metric_catalog()) {
    if (!selected.count(m.id)) continue;
    const std::string missing = missing_requirements(m, registry);
    if (missing.empty()) {
      plan.enabled.insert(std::string(m.id));
      continue;
    }
    const bool required = std::find(options.required_metrics.begin(), options.required_metrics.end(), m.id) !=
                          options.required_metrics.end();
    if (required) throw ConfigError("metric '" + std::string(m.id) + "' requires unbound backend slot(s): " + missing);
    skipped.push_back({std::string(m.id), "backend slot not bound: " + missing});
  }
  plan.face_uses_analyzer = registry.face_analyzer != nullptr;
  return plan;
}

bool all_reentrant(const BackendRegistry& registry) {
  for (Slot s : kAllSlots) {
    const Backend* b = registry.get(s);
    if (b && !b->reentrant()) return false;
  }
  return true;
}

SuiteResult run_impl(const EvaluationSet& set, const BackendRegistry& first, const std::function<BackendRegistry()>& more,
                     const SuiteOptions& options) {
  set.validate();
  SuiteResult result;
  const Plan plan = make_plan(first, options, result.skipped);

  auto& meta = result.meta;
  meta.harness_version = std::string(kHarnessVersion);
  meta.model_id = set.model_id;
  meta.benchmark_version = options.benchmark_version;
  meta.sampling = FrameSamplingPolicy::parse(options.sampling).to_string();
  meta.seed = options.seed;
  meta.config = options.config;
  for (Slot s : kAllSlots)
    if (const Backend* b = first.get(s)) meta.backends[std::string(to_string(s))] = b->name();
  for (const auto& item : set.items) {
    const auto& v = item.video;
    meta.videos[item.record.id] = {v.fps, v.size(), v.frames.front().width, v.frames.front().height};
  }

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(options.workers), std::max<std::size_t>(set.items.size(), 1));
  std::vector<std::vector<std::size_t>> chunks(workers);
  for (std::size_t i = 0; i < set.items.size(); ++i) chunks[i % workers].push_back(i);

  std::vector<Partial> parts;
  if (workers == 1) {
    parts.push_back(evaluate_items(set, chunks[0], first, plan));
  } else {
    std::vector<BackendRegistry> registries{first};
    for (std::size_t w = 1; w < workers; ++w) registries.push_back(more());
    std::vector<std::future<Partial>> futures;
    for (std::size_t w = 0; w < workers; ++w)
      futures.push_back(std::async(std::launch::async, [&, w] { return evaluate_items(set, chunks[w], registries[w], plan); }));
    for (auto& f : futures) parts.push_back(f.get());
  }

  Partial merged;
  for (auto& p : parts) {
    for (auto& [id, vals] : p.values) merged.values[id].insert(vals.begin(), vals.end());
    merged.errors.insert(merged.errors.end(), p.errors.begin(), p.errors.end());
    merged.is_samples.merge(p.is_samples);
  }

  auto failures = [&](std::string_view id) {
    return std::count_if(merged.errors.begin(), merged.errors.end(), [&](const ItemError& e) { return e.metric_id == id; });
  };

  for (const auto& m : metric_catalog()) {
    const std::string id(m.id);
    if (!plan.on(id)) continue;
    if (id == "is") {
      std::vector<std::vector<double>> all;
      for (const auto& item : set.items) {
        auto it = merged.is_samples.find(item.record.id);
        if (it != merged.is_samples.end()) all.insert(all.end(), it->second.begin(), it->second.end());
      }
      if (all.empty()) {
        result.skipped.push_back({id, "no frames were classified (" + std::to_string(failures(id)) + " item errors)"});
        continue;
      }
      try {
        MetricResult r;
        r.metric_id = id;
        r.direction = m.direction;
        r.aggregate = inception_score(std::span<const std::vector<double>>(all), plan.config.is_splits);
        r.applicable_count = merged.is_samples.size();
        result.metrics[id] = std::move(r);
      } catch (const Error& e) {
        result.skipped.push_back({id, e.what()});
      }
      continue;
    }
    auto& vals = merged.values[id];
    if (vals.empty()) {
      const auto n = failures(id);
      result.skipped.push_back({id, n ? "all " + std::to_string(n) + " applicable videos failed" : "no applicable prompts"});
      continue;
    }
    result.metrics[id] = finish_metric(id, std::move(vals));
  }
  result.errors = std::move(merged.errors);
  std::sort(result.errors.begin(), result.errors.end(), [](const ItemError& a, const ItemError& b) {
    return std::tie(a.metric_id, a.prompt_id, a.message) < std::tie(b.metric_id, b.prompt_id, b.message);
  });
  return result;
}

}  // namespace

SuiteResult run_suite(const EvaluationSet& set, const BackendRegistry& registry, const SuiteOptions& options) {
  SuiteOptions opts = options;
  if (opts.workers > 1 && !all_reentrant(registry)) {
    spdlog::info("registry has non-reentrant backends; evaluating on one worker");
    opts.workers = 1;
  }
  return run_impl(set, registry, [&] { return registry; }, opts);
}

SuiteResult run_suite(const EvaluationSet& set, const RegistryFactory& factory, const SuiteOptions& options) {
  return run_impl(set, factory(), factory, options);
}

void attach_ingest(SuiteResult& result, const IngestResult& ingest) {
  result.missing.insert(result.missing.end(), ingest.missing.begin(), ingest.missing.end());
  std::sort(result.missing.begin(), result.missing.end());
  for (const auto& e : ingest.errors)
    result.errors.push_back({"ingest", e.prompt_id, e.path.filename().string() + ": " + e.message, std::nullopt});
  std::sort(result.errors.begin(), result.errors.end(), [](const ItemError& a, const ItemError& b) {
    return std::tie(a.metric_id, a.prompt_id, a.message) < std::tie(b.metric_id, b.prompt_id, b.message);
  });
}

// ---- serialization ---------------------------------------------------------

json to_json(const MetricConfig& c) {
  return {{"flow_threshold", c.flow_threshold},
          {"paper_scale", c.paper_scale},
          {"is_splits", c.is_splits},
          {"caption_count", c.caption_count}};
}

MetricConfig metric_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("metric config must be an object");
  MetricConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "flow_threshold") c.flow_threshold = value.get<double>();
      else if (key == "paper_scale") c.paper_scale = value.get<bool>();
      else if (key == "is_splits") c.is_splits = value.get<int>();
      else if (key == "caption_count") c.caption_count = value.get<int>();
      else throw ConfigError("unknown metric config key '" + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("metric config key '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

void write_suite(std::ostream& out, const SuiteResult& r) {
  const auto& m = r.meta;
  json videos = json::object();
  for (const auto& [id, v] : m.videos)
    videos[id] = {{"fps", v.fps}, {"frames", v.frames}, {"width", v.width}, {"height", v.height}};
  json meta = {{"kind", "meta"},
               {"format", kSuiteFormat},
               {"schema", kSuiteSchemaVersion},
               {"harness_version", m.harness_version},
               {"model_id", m.model_id},
               {"benchmark_version", m.benchmark_version},
               {"sampling", m.sampling},
               {"seed", m.seed},
               {"config", to_json(m.config)},
               {"backends", m.backends},
               {"videos", videos}};
  out << meta.dump() << '\n';

  for (const auto& info : metric_catalog()) {
    const MetricResult* res = r.find(info.id);
    if (!res) continue;
    for (const auto& [pid, v] : res->per_video)
      out << json{{"kind", "value"}, {"metric_id", res->metric_id}, {"prompt_id", pid}, {"value", v}}.dump() << '\n';
    out << json{{"kind", "aggregate"},
                {"metric_id", res->metric_id},
                {"value", res->aggregate},
                {"direction", to_string(res->direction)},
                {"applicable_count", res->applicable_count}}
               .dump()
        << '\n';
  }
  for (const auto& e : r.errors) {
    json j = {{"kind", "error"}, {"metric_id", e.metric_id}, {"prompt_id", e.prompt_id}, {"message", e.message}};
    if (e.frame_index) j["frame_index"] = *e.frame_index;
    out << j.dump() << '\n';
  }
  for (const auto& s : r.skipped)
    out << json{{"kind", "skip"}, {"metric_id", s.metric_id}, {"reason", s.reason}}.dump() << '\n';
  for (const auto& p : r.missing) out << json{{"kind", "missing"}, {"prompt_id", p}}.dump() << '\n';
}

void save_suite(const std::filesystem::path& path, const SuiteResult& result) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_suite(out, result);
  if (!out) throw Error("failed writing " + path.string());
}

SuiteResult parse_suite(std::istream& in, const std::string& source) {
  SuiteResult r;
  std::string line;
  std::size_t lineno = 0;
  bool have_meta = false;
  std::set<std::string> aggregated;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, lineno, std::string("invalid JSON: ") + e.what());
    }
    try {
      const std::string kind = j.at("kind").get<std::string>();
      if (!have_meta) {
        if (kind != "meta") throw ParseError(source, lineno, "first record must be the meta record");
        if (j.at("format").get<std::string>() != kSuiteFormat)
          throw ParseError(source, lineno, "not a suite result file");
        auto& m = r.meta;
        m.harness_version = j.at("harness_version").get<std::string>();
        m.model_id = j.at("model_id").get<std::string>();
        m.benchmark_version = j.value("benchmark_version", "");
        m.sampling = j.value("sampling", "all");
        m.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("config")) m.config = metric_config_from_json(j.at("config"));
        if (j.contains("backends")) m.backends = j.at("backends").get<std::map<std::string, std::string>>();
        if (j.contains("videos"))
          for (const auto& [id, v] : j.at("videos").items())
            m.videos[id] = {v.at("fps").get<double>(), v.at("frames").get<std::size_t>(), v.at("width").get<int>(),
                            v.at("height").get<int>()};
        have_meta = true;
        continue;
      }
      if (kind == "value") {
        const auto id = j.at("metric_id").get<std::string>();
        metric_info(id);
        auto& res = r.metrics[id];
        res.metric_id = id;
        if (!res.per_video.emplace(j.at("prompt_id").get<std::string>(), j.at("value").get<double>()).second)
          throw ParseError(source, lineno, "duplicate value for " + id);
      } else if (kind == "aggregate") {
        const auto id = j.at("metric_id").get<std::string>();
        const MetricInfo& info = metric_info(id);
        auto dir = parse_direction(j.at("direction").get<std::string>());
        if (!dir || *dir != info.direction)
          throw ParseError(source, lineno, "direction of " + id + " must be " + std::string(to_string(info.direction)));
        if (!aggregated.insert(id).second) throw ParseError(source, lineno, "duplicate aggregate for " + id);
        auto& res = r.metrics[id];
        res.metric_id = id;
        res.direction = *dir;
        res.aggregate = j.at("value").get<double>();
        res.applicable_count = j.at("applicable_count").get<std::size_t>();
        if (!res.per_video.empty()) {
          double sum = 0;
          for (const auto& [p, v] : res.per_video) sum += v;
          const double mean = sum / static_cast<double>(res.per_video.size());
          if (std::abs(mean - res.aggregate) > 1e-9 * std::max(1.0, std::abs(mean)))
            throw ParseError(source, lineno, "aggregate of " + id + " is not the mean of its per-video values");
          if (res.applicable_count != res.per_video.size())
            throw ParseError(source, lineno, "applicable_count of " + id + " differs from its per-video count");
        }
      } else if (kind == "error") {
        ItemError e{j.at("metric_id").get<std::string>(), j.at("prompt_id").get<std::string>(),
                    j.at("message").get<std::string>(), std::nullopt};
        if (j.contains("frame_index")) e.frame_index = j.at("frame_index").get<std::size_t>();
        r.errors.push_back(std::move(e));
      } else if (kind == "skip") {
        r.skipped.push_back({j.at("metric_id").get<std::string>(), j.at("reason").get<std::string>()});
      } else if (kind == "missing") {
        r.missing.push_back(j.at("prompt_id").get<std::string>());
      } else {
        throw ParseError(source, lineno, "unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError(source, lineno, e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  if (!have_meta) throw ParseError(source, lineno, "empty suite result");
  for (const auto& [id, res] : r.metrics)
    if (!aggregated.count(id)) throw ParseError(source, lineno, "metric " + id + " has values but no aggregate");
  return r;
}

SuiteResult load_suite(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse_suite(in, path.string());
}

std::map<std::string, SuiteResult> load_suite_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("results directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::map<std::string, SuiteResult> out;
  for (const auto& f : files) {
    SuiteResult r = load_suite(f);
    const std::string id = r.meta.model_id;
    if (!out.emplace(id, std::move(r)).second) throw Error("two result files for model '" + id + "'");
  }
  if (out.empty()) throw Error("no suite result files in " + dir.string());
  return out;
}

}  // namespace t2veval
