#include "t2veval/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "t2veval/correlation.hpp"
#include "t2veval/error.hpp"
#include "t2veval/hash.hpp"
#include "t2veval/regression.hpp"

namespace t2veval {

using nlohmann::json;

std::string_view to_string(Aspect a) {
  switch (a) {
    case Aspect::visual_quality: return "visual_quality";
    case Aspect::tv_alignment: return "tv_alignment";
    case Aspect::motion_quality: return "motion_quality";
    case Aspect::temporal_consistency: return "temporal_consistency";
    case Aspect::subjective_likeness: return "subjective_likeness";
  }
  return "?";
}

std::optional<Aspect> parse_aspect(std::string_view s) {
  for (Aspect a : kAllAspects)
    if (to_string(a) == s) return a;
  return std::nullopt;
}

// ---- ratings ---------------------------------------------------------------

void validate_rating(const HumanRating& r) {
  const std::string id = r.rater_id + "/" + r.model_id + "/" + r.prompt_id;
  if (r.rater_id.empty()) throw ValidationError(id, "rater_id", "must be non-empty");
  if (r.model_id.empty()) throw ValidationError(id, "model_id", "must be non-empty");
  if (r.prompt_id.empty()) throw ValidationError(id, "prompt_id", "must be non-empty");
  for (Aspect a : kAllAspects) {
    auto it = r.scores.find(a);
    if (it == r.scores.end()) throw ValidationError(id, std::string(to_string(a)), "score missing");
    if (it->second < 1 || it->second > 5)
      throw ValidationError(id, std::string(to_string(a)), "score must be an integer from 1 to 5");
  }
}

json to_json(const HumanRating& r) {
  json scores = json::object();
  for (const auto& [a, v] : r.scores) scores[std::string(to_string(a))] = v;
  return {{"rater_id", r.rater_id}, {"model_id", r.model_id}, {"prompt_id", r.prompt_id}, {"scores", scores}};
}

HumanRating rating_from_json(const json& j) {
  const std::string rid = j.is_object() && j.contains("rater_id") && j["rater_id"].is_string()
                              ? j["rater_id"].get<std::string>()
                              : std::string("?");
  if (!j.is_object()) throw ValidationError(rid, "record", "must be an object");
  HumanRating r;
  auto str = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw ValidationError(rid, key, "must be a string");
    return j[key].get<std::string>();
  };
  for (const auto& [key, value] : j.items())
    if (key != "rater_id" && key != "model_id" && key != "prompt_id" && key != "scores")
      throw ValidationError(rid, key, "unknown field");
  r.rater_id = str("rater_id");
  r.model_id = str("model_id");
  r.prompt_id = str("prompt_id");
  if (!j.contains("scores") || !j["scores"].is_object()) throw ValidationError(rid, "scores", "must be an object");
  for (const auto& [key, value] : j["scores"].items()) {
    auto a = parse_aspect(key);
    if (!a) throw ValidationError(rid, key, "unknown aspect");
    if (!value.is_number_integer()) throw ValidationError(rid, key, "score must be an integer from 1 to 5");
    const auto v = value.get<std::int64_t>();
    if (v < 1 || v > 5) throw ValidationError(rid, key, "score must be an integer from 1 to 5");
    r.scores[*a] = static_cast<int>(v);
  }
  validate_rating(r);
  return r;
}

std::vector<HumanRating> parse_ratings(std::istream& in, const std::string& source) {
  std::vector<HumanRating> out;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (first && j.is_object() && j.contains("format")) {
      first = false;
      if (j["format"] != kRatingsFormat) throw ParseError(source, lineno, "not a ratings file");
      continue;
    }
    first = false;
    try {
      HumanRating r = rating_from_json(j);
      if (!seen.emplace(r.rater_id, r.model_id, r.prompt_id).second)
        throw ParseError(source, lineno, "duplicate rating by '" + r.rater_id + "' for " + r.model_id + "/" + r.prompt_id);
      out.push_back(std::move(r));
    } catch (const ValidationError& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return out;
}

std::vector<HumanRating> load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse_ratings(in, path.string());
}

void write_ratings(std::ostream& out, std::vector<HumanRating> ratings, std::string_view study_id) {
  std::sort(ratings.begin(), ratings.end(), [](const HumanRating& a, const HumanRating& b) {
    return std::tie(a.model_id, a.prompt_id, a.rater_id) < std::tie(b.model_id, b.prompt_id, b.rater_id);
  });
  out << json{{"format", kRatingsFormat}, {"schema", "1"}, {"study_id", study_id}, {"count", ratings.size()}}.dump()
      << '\n';
  for (const auto& r : ratings) out << to_json(r).dump() << '\n';
}

std::vector<AspectLabel> aggregate_ratings(const std::vector<HumanRating>& ratings) {
  std::map<std::tuple<std::string, std::string, Aspect>, std::pair<double, int>> acc;
  for (const auto& r : ratings) {
    validate_rating(r);
    for (const auto& [a, v] : r.scores) {
      auto& [sum, n] = acc[{r.model_id, r.prompt_id, a}];
      sum += v;
      ++n;
    }
  }
  std::vector<AspectLabel> out;
  for (const auto& [key, sn] : acc) {
    const double mean = sn.first / sn.second;
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), std::clamp((mean - 1.0) / 4.0, 0.0, 1.0)});
  }
  return out;
}

const AspectMetrics& default_aspect_metrics() {
  static const AspectMetrics m = {
      {Aspect::visual_quality, {"vqa_a", "vqa_t"}},
      {Aspect::tv_alignment, {"sd_score", "clip_score"}},
      {Aspect::motion_quality, {"motion_ac_score", "flow_score"}},
      {Aspect::temporal_consistency, {"clip_temp", "warping_error"}},
  };
  return m;
}

// ---- model -----------------------------------------------------------------

double AspectModel::predict(std::span<const double> raw) const {
  if (raw.size() != metric_ids.size()) throw Error("aspect model expects " + std::to_string(metric_ids.size()) + " metrics");
  double v = intercept;
  for (std::size_t j = 0; j < raw.size(); ++j) v += coefficients[j] * (negated[j] ? -raw[j] : raw[j]);
  return v;
}

const AspectModel* AlignmentModel::find(Aspect a) const {
  for (const auto& m : aspects)
    if (m.aspect == a) return &m;
  return nullptr;
}

namespace {

json keys_to_json(const std::vector<SampleKey>& keys) {
  json arr = json::array();
  for (const auto& [m, p] : keys) arr.push_back({m, p});
  return arr;
}

std::vector<SampleKey> keys_from_json(const json& j) {
  std::vector<SampleKey> out;
  for (const auto& e : j) out.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
  return out;
}

bool harmonize_negates(const std::string& metric_id) {
  return metric_info(metric_id).direction == Direction::lower_better;
}

/// Per-video value of `metric` for a sample; nullopt when absent.
std::optional<double> sample_value(const std::map<std::string, SuiteResult>& suites, const SampleKey& key,
                                   const std::string& metric) {
  auto s = suites.find(key.first);
  if (s == suites.end()) return std::nullopt;
  const MetricResult* r = s->second.find(metric);
  if (!r) return std::nullopt;
  auto it = r->per_video.find(key.second);
  if (it == r->per_video.end()) return std::nullopt;
  return it->second;
}

/// nullopt when any metric has no value for the sample, e.g. an attribute-gated
/// metric on a prompt without that attribute.
std::optional<std::vector<double>> sample_row(const std::map<std::string, SuiteResult>& suites, const SampleKey& key,
                                              const std::vector<std::string>& metrics) {
  std::vector<double> row;
  for (const auto& m : metrics) {
    auto v = sample_value(suites, key, m);
    if (!v) return std::nullopt;
    row.push_back(*v);
  }
  return row;
}

using LabelIndex = std::map<std::pair<SampleKey, Aspect>, double>;

LabelIndex index_labels(const std::vector<AspectLabel>& labels) {
  LabelIndex idx;
  for (const auto& l : labels) idx[{{l.model_id, l.prompt_id}, l.aspect}] = l.value;
  return idx;
}

}  // namespace

json to_json(const AlignmentModel& m) {
  json aspects = json::array();
  for (const auto& a : m.aspects)
    aspects.push_back({{"aspect", to_string(a.aspect)},
                       {"metric_ids", a.metric_ids},
                       {"coefficients", a.coefficients},
                       {"intercept", a.intercept},
                       {"negated", a.negated},
                       {"train_rss", a.train_rss}});
  const auto& f = m.fit_metadata;
  return {{"format", kAlignmentFormat},
          {"schema", kAlignmentSchemaVersion},
          {"aspects", aspects},
          {"fit_metadata",
           {{"train_size", f.train_size},
            {"holdout_size", f.holdout_size},
            {"seed", f.seed},
            {"harmonization", f.harmonization},
            {"train", keys_to_json(f.train)},
            {"holdout", keys_to_json(f.holdout)}}}};
}

AlignmentModel alignment_from_json(const json& j) {
  try {
    if (j.at("format") != kAlignmentFormat) throw Error("not an alignment model document");
    if (j.at("schema") != kAlignmentSchemaVersion)
      throw Error("unsupported alignment model schema " + j.at("schema").dump());
    AlignmentModel m;
    for (const auto& a : j.at("aspects")) {
      AspectModel am;
      auto aspect = parse_aspect(a.at("aspect").get<std::string>());
      if (!aspect || *aspect == Aspect::subjective_likeness) throw Error("invalid aspect " + a.at("aspect").dump());
      am.aspect = *aspect;
      am.metric_ids = a.at("metric_ids").get<std::vector<std::string>>();
      am.coefficients = a.at("coefficients").get<std::vector<double>>();
      am.intercept = a.at("intercept").get<double>();
      am.negated = a.at("negated").get<std::vector<bool>>();
      am.train_rss = a.value("train_rss", 0.0);
      if (am.coefficients.size() != am.metric_ids.size() || am.negated.size() != am.metric_ids.size())
        throw Error("aspect " + std::string(to_string(am.aspect)) + " has mismatched coefficient count");
      for (const auto& id : am.metric_ids) metric_info(id);
      for (double c : am.coefficients)
        if (!std::isfinite(c)) throw Error("non-finite coefficient");
      if (!std::isfinite(am.intercept)) throw Error("non-finite intercept");
      m.aspects.push_back(std::move(am));
    }
    const auto& f = j.at("fit_metadata");
    m.fit_metadata.train_size = f.at("train_size").get<std::size_t>();
    m.fit_metadata.holdout_size = f.at("holdout_size").get<std::size_t>();
    m.fit_metadata.seed = f.at("seed").get<std::uint64_t>();
    m.fit_metadata.harmonization = f.value("harmonization", m.fit_metadata.harmonization);
    m.fit_metadata.train = keys_from_json(f.at("train"));
    m.fit_metadata.holdout = keys_from_json(f.at("holdout"));
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed alignment model: ") + e.what());
  }
}

void save_alignment(const std::filesystem::path& path, const AlignmentModel& m) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json(m).dump(2) << '\n';
}

AlignmentModel load_alignment(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return alignment_from_json(j);
}

std::pair<std::vector<SampleKey>, std::vector<SampleKey>> split_samples(std::vector<SampleKey> keys, std::size_t train,
                                                                        std::size_t holdout, std::uint64_t seed) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  const std::size_t n = keys.size();
  if (train + holdout == 0) throw Error("empty train/holdout split");
  if (n < train + holdout) {
    const std::size_t t = static_cast<std::size_t>(std::llround(static_cast<double>(n) * static_cast<double>(train) /
                                                                static_cast<double>(train + holdout)));
    train = t;
    holdout = n - t;
  }
  SplitMix64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(keys[i - 1], keys[rng.below(i)]);
  std::vector<SampleKey> tr(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(train));
  std::vector<SampleKey> ho(keys.begin() + static_cast<std::ptrdiff_t>(train),
                            keys.begin() + static_cast<std::ptrdiff_t>(train + holdout));
  return {std::move(tr), std::move(ho)};
}

AlignmentModel fit_alignment(const std::vector<AspectLabel>& labels, const std::map<std::string, SuiteResult>& suites,
                             const FitOptions& options) {
  const LabelIndex idx = index_labels(labels);
  std::vector<SampleKey> keys;
  for (const auto& l : labels)
    if (options.aspect_metrics.count(l.aspect)) keys.emplace_back(l.model_id, l.prompt_id);
  if (keys.empty()) throw Error("no labels for any fitted aspect");

  AlignmentModel model;
  auto [train, holdout] = split_samples(std::move(keys), options.train, options.holdout, options.seed);
  model.fit_metadata.train_size = train.size();
  model.fit_metadata.holdout_size = holdout.size();
  model.fit_metadata.seed = options.seed;

  for (Aspect a : kFittedAspects) {
    auto mit = options.aspect_metrics.find(a);
    if (mit == options.aspect_metrics.end()) continue;
    const auto& metrics = mit->second;
    if (metrics.empty()) throw Error("aspect " + std::string(to_string(a)) + " has no metrics");
    AspectModel am;
    am.aspect = a;
    am.metric_ids = metrics;
    for (const auto& m : metrics) am.negated.push_back(harmonize_negates(m));

    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (const auto& key : train) {
      auto lit = idx.find({key, a});
      if (lit == idx.end()) continue;
      auto row = sample_row(suites, key, metrics);
      if (!row) continue;
      for (std::size_t j = 0; j < row->size(); ++j)
        if (am.negated[j]) (*row)[j] = -(*row)[j];
      rows.push_back(std::move(*row));
      y.push_back(lit->second);
    }
    if (rows.empty()) throw Error("no training samples labeled for aspect " + std::string(to_string(a)));
    const OlsFit fit = ols_fit(rows, y, metrics);
    am.coefficients = fit.coefficients;
    am.intercept = fit.intercept;
    am.train_rss = fit.rss;
    model.aspects.push_back(std::move(am));
  }
  model.fit_metadata.train = std::move(train);
  model.fit_metadata.holdout = std::move(holdout);
  return model;
}

std::vector<FinalScore> apply_alignment(const AlignmentModel& model, const std::map<std::string, SuiteResult>& suites,
                                        const std::vector<AspectLabel>& labels) {
  std::map<std::string, std::pair<double, int>> likeness;
  for (const auto& l : labels)
    if (l.aspect == Aspect::subjective_likeness) {
      auto& [s, n] = likeness[l.model_id];
      s += l.value;
      ++n;
    }

  std::vector<FinalScore> out;
  for (const auto& [model_id, suite] : suites) {
    FinalScore fs;
    fs.model_id = model_id;
    double sum = 0;
    int n = 0;
    for (Aspect a : kFittedAspects) {
      const AspectModel* am = model.find(a);
      if (!am) {
        fs.aspects[a] = std::nullopt;
        continue;
      }
      std::vector<double> raw;
      for (const auto& m : am->metric_ids) {
        const MetricResult* r = suite.find(m);
        if (!r) break;
        raw.push_back(r->aggregate);
      }
      if (raw.size() != am->metric_ids.size()) {
        fs.aspects[a] = std::nullopt;
        continue;
      }
      const double v = am->predict(raw);
      fs.aspects[a] = v;
      sum += v;
      ++n;
    }
    fs.complete = n == static_cast<int>(kFittedAspects.size());
    if (n) fs.comprehensive = sum / n;
    if (auto it = likeness.find(model_id); it != likeness.end())
      fs.subjective_likeness = it->second.first / it->second.second;
    out.push_back(std::move(fs));
  }
  return out;
}

json to_json(const std::vector<FinalScore>& scores) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json models = json::array();
  for (const auto& fs : scores) {
    json aspects = json::object();
    for (const auto& [a, v] : fs.aspects) aspects[std::string(to_string(a))] = opt(v);
    models.push_back({{"model_id", fs.model_id},
                      {"aspects", aspects},
                      {"subjective_likeness", opt(fs.subjective_likeness)},
                      {"comprehensive", opt(fs.comprehensive)},
                      {"complete", fs.complete}});
  }
  return {{"format", kFinalScoresFormat}, {"schema", "1"}, {"models", models}};
}

std::vector<FinalScore> final_scores_from_json(const json& j) {
  auto opt = [](const json& v) -> std::optional<double> {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
  };
  try {
    if (j.at("format") != kFinalScoresFormat) throw Error("not a final scores document");
    std::vector<FinalScore> out;
    std::set<std::string> seen;
    for (const auto& m : j.at("models")) {
      FinalScore fs;
      fs.model_id = m.at("model_id").get<std::string>();
      if (!seen.insert(fs.model_id).second) throw Error("duplicate model '" + fs.model_id + "' in final scores");
      for (const auto& [key, value] : m.at("aspects").items()) {
        auto a = parse_aspect(key);
        if (!a || *a == Aspect::subjective_likeness) throw Error("invalid aspect '" + key + "' in final scores");
        fs.aspects[*a] = opt(value);
      }
      fs.subjective_likeness = m.contains("subjective_likeness") ? opt(m["subjective_likeness"]) : std::nullopt;
      fs.comprehensive = m.contains("comprehensive") ? opt(m["comprehensive"]) : std::nullopt;
      fs.complete = m.value("complete", true);
      if (!m.contains("comprehensive")) {
        double sum = 0;
        int n = 0;
        for (const auto& [a, v] : fs.aspects)
          if (v) {
            sum += *v;
            ++n;
          }
        if (n) fs.comprehensive = sum / n;
        fs.complete = n == static_cast<int>(kFittedAspects.size());
      }
      out.push_back(std::move(fs));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed final scores: ") + e.what());
  }
}

void save_final_scores(const std::filesystem::path& path, const std::vector<FinalScore>& scores) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json(scores).dump(2) << '\n';
}

std::vector<FinalScore> load_final_scores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return final_scores_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

CorrelationReport evaluate_alignment(const AlignmentModel& model, const std::vector<AspectLabel>& labels,
                                     const std::map<std::string, SuiteResult>& suites) {
  const LabelIndex idx = index_labels(labels);
  CorrelationReport report;
  auto correlate = [](const std::string& method, const std::vector<double>& x, const std::vector<double>& y) {
    CorrelationRow row{method, std::nullopt, std::nullopt};
    try {
      row.spearman = spearman(x, y);
      row.kendall = kendall_tau_b(x, y);
    } catch (const Error&) {
      row.spearman.reset();
      row.kendall.reset();
    }
    return row;
  };

  for (const auto& am : model.aspects) {
    AspectCorrelation ac;
    ac.aspect = am.aspect;
    std::vector<std::vector<double>> per_metric(am.metric_ids.size());
    std::vector<double> avg, ours, truth;
    for (const auto& key : model.fit_metadata.holdout) {
      auto lit = idx.find({key, am.aspect});
      if (lit == idx.end()) continue;
      const auto row = sample_row(suites, key, am.metric_ids);
      if (!row) continue;
      const auto& raw = *row;
      double mean = 0;
      for (std::size_t j = 0; j < raw.size(); ++j) {
        const double h = am.negated[j] ? -raw[j] : raw[j];
        per_metric[j].push_back(h);
        mean += h;
      }
      avg.push_back(mean / static_cast<double>(raw.size()));
      ours.push_back(am.predict(raw));
      truth.push_back(lit->second);
    }
    ac.samples = truth.size();
    for (std::size_t j = 0; j < am.metric_ids.size(); ++j) ac.rows.push_back(correlate(am.metric_ids[j], per_metric[j], truth));
    ac.rows.push_back(correlate("avg", avg, truth));
    ac.rows.push_back(correlate("ours", ours, truth));
    report.aspects.push_back(std::move(ac));
  }
  return report;
}

json to_json(const CorrelationReport& r) {
  json aspects = json::array();
  for (const auto& a : r.aspects) {
    json rows = json::array();
    for (const auto& row : a.rows)
      rows.push_back({{"method", row.method},
                      {"spearman", row.spearman ? json(*row.spearman) : json(nullptr)},
                      {"kendall", row.kendall ? json(*row.kendall) : json(nullptr)}});
    aspects.push_back({{"aspect", to_string(a.aspect)}, {"samples", a.samples}, {"rows", rows}});
  }
  return {{"aspects", aspects}};
}

std::string to_markdown(const CorrelationReport& r) {
  std::ostringstream out;
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return std::string(buf);
  };
  out << "| Aspect | Method | Spearman | Kendall |\n|---|---|---|---|\n";
  for (const auto& a : r.aspects)
    for (const auto& row : a.rows)
      out << "| " << to_string(a.aspect) << " | " << row.method << " | " << fmt(row.spearman) << " | "
          << fmt(row.kendall) << " |\n";
  return out.str();
}

}  // namespace t2veval
