#include "t2veval/annotation.hpp"

#include <fcntl.h>
#include <spdlog/spdlog.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "t2veval/hash.hpp"
#include "t2veval/media.hpp"

namespace t2veval {

using nlohmann::json;

// ---- study -----------------------------------------------------------------

json Study::to_json() const {
  json items_json = json::array();
  for (const auto& it : items) {
    json refs = json::array();
    for (const auto& r : it.references) refs.push_back(r.generic_string());
    items_json.push_back({{"model_id", it.model_id},
                          {"prompt_id", it.prompt_id},
                          {"prompt_text", it.prompt_text},
                          {"video", it.video.generic_string()},
                          {"references", refs}});
  }
  return {{"study_id", study_id},     {"salt", salt},       {"instructions", instructions},
          {"target_ratings", target_ratings}, {"raters", raters}, {"items", items_json}};
}

Study Study::from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    Study s;
    s.study_id = j.at("study_id").get<std::string>();
    s.salt = j.at("salt").get<std::string>();
    s.instructions = j.value("instructions", "");
    s.target_ratings = j.value("target_ratings", 3);
    s.raters = j.value("raters", std::vector<std::string>{});
    if (s.study_id.empty()) throw ConfigError("study_id must be non-empty");
    if (s.salt.empty()) throw ConfigError("study salt must be non-empty");
    if (s.target_ratings < 1) throw ConfigError("target_ratings must be >= 1");
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : j.at("items")) {
      StudyItem it;
      it.model_id = e.at("model_id").get<std::string>();
      it.prompt_id = e.at("prompt_id").get<std::string>();
      it.prompt_text = e.at("prompt_text").get<std::string>();
      auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
      };
      it.video = resolve(e.at("video").get<std::string>());
      for (const auto& r : e.value("references", std::vector<std::string>{})) it.references.push_back(resolve(r));
      if (!seen.emplace(it.model_id, it.prompt_id).second)
        throw ConfigError("duplicate study item " + it.model_id + "/" + it.prompt_id);
      s.items.push_back(std::move(it));
    }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed study: ") + e.what());
  }
}

Study Study::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open study file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return from_json(j, path.parent_path());
}

Study build_study(const std::string& study_id, const std::string& salt, const Benchmark& benchmark,
                  const std::vector<std::filesystem::path>& model_dirs, const std::filesystem::path& reference_root) {
  Study s;
  s.study_id = study_id;
  s.salt = salt;
  s.instructions =
      "Rate each aspect from 1 (poor) to 5 (excellent). Video quality: no blur, noise or other degradation. "
      "Text-video alignment: objects, counts, attributes and relations match the prompt. Motion quality: the motion "
      "is correct and natural. Temporal consistency: frames stay consistent with each other. Subjective likeness: "
      "your overall preference.";
  for (const auto& dir : model_dirs) {
    const std::string model_id = dir.filename().string();
    std::map<std::string, std::filesystem::path> videos;
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.is_regular_file() && is_video_file(e.path())) videos[e.path().stem().string()] = e.path();
    for (const auto& rec : benchmark.records) {
      auto v = videos.find(rec.id);
      if (v == videos.end()) continue;
      StudyItem it{model_id, rec.id, rec.text, v->second, {}};
      for (int k = 1; k <= 3; ++k) {
        auto ref = reference_root / rec.id / (std::to_string(k) + ".png");
        if (std::filesystem::exists(ref)) it.references.push_back(ref);
      }
      s.items.push_back(std::move(it));
    }
  }
  return s;
}

json to_json(const RatingTask& t) {
  json aspects = json::array();
  for (Aspect a : kAllAspects) aspects.push_back(to_string(a));
  return {{"task_id", t.task_id},
          {"prompt_text", t.prompt_text},
          {"video_url", t.video_url},
          {"reference_urls", t.reference_urls},
          {"instructions", t.instructions},
          {"aspects", aspects}};
}

json to_json(const Ack& a) { return {{"task_id", a.task_id}, {"rater_id", a.rater_id}, {"sequence", a.sequence}}; }

json to_json(const StudyProgress& p) {
  return {{"items", p.items},
          {"raters", p.raters},
          {"ratings", p.ratings},
          {"items_at_target", p.items_at_target},
          {"min_ratings_per_item", p.min_ratings_per_item},
          {"max_ratings_per_item", p.max_ratings_per_item},
          {"target_ratings", p.target_ratings}};
}

// ---- store -----------------------------------------------------------------

AnnotationStore::AnnotationStore(Study study, std::filesystem::path log_path)
    : study_(std::move(study)), log_path_(std::move(log_path)) {
  counts_.assign(study_.items.size(), 0);
  for (std::size_t i = 0; i < study_.items.size(); ++i) {
    const std::string id = task_id_of(i);
    if (!task_index_.emplace(id, i).second) throw ConfigError("task id collision; change the study salt");
    media_index_.emplace(media_token(i), i);
  }
  raters_.insert(study_.raters.begin(), study_.raters.end());
  if (log_path_.has_parent_path()) std::filesystem::create_directories(log_path_.parent_path());
  replay();
  fd_ = ::open(log_path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error("cannot open rating log " + log_path_.string() + ": " + std::strerror(errno));
}

AnnotationStore::~AnnotationStore() {
  if (fd_ >= 0) ::close(fd_);
}

std::string AnnotationStore::task_id_of(std::size_t item) const {
  const auto& it = study_.items.at(item);
  return hex64(fnv1a(it.prompt_id, fnv1a(it.model_id + '\x1f', fnv1a(study_.salt + '\x1f'))));
}

std::string AnnotationStore::media_token(std::size_t item) const {
  return hex64(fnv1a(task_id_of(item), fnv1a("media\x1f" + study_.salt + '\x1f')));
}

void AnnotationStore::replay() {
  std::ifstream in(log_path_, std::ios::binary);
  if (!in) return;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  std::size_t pos = 0, good = 0, lineno = 0;
  while (pos < data.size()) {
    const std::size_t nl = data.find('\n', pos);
    ++lineno;
    const bool last = nl == std::string::npos || nl + 1 >= data.size();
    if (nl == std::string::npos) break;  // torn tail
    const std::string line = data.substr(pos, nl - pos);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      if (last) break;
      throw ParseError(log_path_.string(), lineno, "corrupt rating log record");
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (type == "rater") {
        raters_.insert(j.at("rater_id").get<std::string>());
      } else if (type == "rating") {
        const std::string task_id = j.at("task_id").get<std::string>();
        auto t = task_index_.find(task_id);
        if (t == task_index_.end()) throw ParseError(log_path_.string(), lineno, "rating for unknown task " + task_id);
        HumanRating r;
        r.rater_id = j.at("rater_id").get<std::string>();
        r.model_id = study_.items[t->second].model_id;
        r.prompt_id = study_.items[t->second].prompt_id;
        for (const auto& [k, v] : j.at("scores").items()) r.scores[*parse_aspect(k)] = v.get<int>();
        validate_rating(r);
        Ack ack{task_id, r.rater_id, j.at("sequence").get<std::uint64_t>()};
        done_[{r.rater_id, t->second}] = entries_.size();
        ++counts_[t->second];
        entries_.push_back({t->second, std::move(r), ack});
      } else {
        throw ParseError(log_path_.string(), lineno, "unknown log record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError(log_path_.string(), lineno, e.what());
    }
    pos = nl + 1;
    good = pos;
  }
  if (good < data.size()) {
    spdlog::warn("rating log {}: discarding {} bytes of an incomplete final record", log_path_.string(), data.size() - good);
    std::filesystem::resize_file(log_path_, good);
  }
}

void AnnotationStore::append(const json& record) {
  const std::string line = record.dump() + "\n";
  const off_t before = ::lseek(fd_, 0, SEEK_END);
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string err = std::strerror(errno);
      if (before >= 0 && ::ftruncate(fd_, before) != 0) spdlog::error("could not roll back rating log");
      throw Error("rating log write failed: " + err);
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) throw Error(std::string("rating log fsync failed: ") + std::strerror(errno));
}

bool AnnotationStore::register_rater(const std::string& rater_id) {
  if (rater_id.empty() || rater_id.size() > 128) throw SubmitError(400, "rater_id", "rater_id must be 1-128 characters");
  std::unique_lock lock(mutex_);
  if (raters_.count(rater_id)) return false;
  append({{"type", "rater"}, {"rater_id", rater_id}});
  raters_.insert(rater_id);
  return true;
}

bool AnnotationStore::has_rater(const std::string& rater_id) const {
  std::shared_lock lock(mutex_);
  return raters_.count(rater_id) > 0;
}

RatingTask AnnotationStore::make_task(std::size_t item) const {
  const auto& it = study_.items[item];
  RatingTask t;
  t.task_id = task_id_of(item);
  t.prompt_text = it.prompt_text;
  const std::string base = "/media/" + media_token(item) + "/";
  t.video_url = base + "video" + it.video.extension().string();
  for (std::size_t k = 0; k < it.references.size(); ++k)
    t.reference_urls.push_back(base + "ref" + std::to_string(k + 1) + it.references[k].extension().string());
  t.instructions = study_.instructions;
  return t;
}

std::optional<RatingTask> AnnotationStore::next_task(const std::string& rater_id) const {
  std::shared_lock lock(mutex_);
  if (!raters_.count(rater_id)) throw SubmitError(403, "rater_id", "unknown rater; registration required");
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < study_.items.size(); ++i) {
    if (done_.count({rater_id, i})) continue;
    if (!best || counts_[i] < counts_[*best]) best = i;
  }
  if (!best) return std::nullopt;
  return make_task(*best);
}

Ack AnnotationStore::submit(const json& body) {
  if (!body.is_object()) throw SubmitError(400, "body", "request body must be a JSON object");
  auto str = [&](const char* key) {
    if (!body.contains(key) || !body[key].is_string()) throw SubmitError(400, key, std::string(key) + " must be a string");
    return body[key].get<std::string>();
  };
  for (const auto& [key, v] : body.items())
    if (key != "rater_id" && key != "task_id" && key != "scores") throw SubmitError(400, key, "unknown field");
  const std::string rater = str("rater_id");
  const std::string task = str("task_id");
  if (!body.contains("scores")) throw SubmitError(400, "scores", "scores missing");
  return submit(rater, task, body["scores"]);
}

Ack AnnotationStore::submit(const std::string& rater_id, const std::string& task_id, const json& scores) {
  std::unique_lock lock(mutex_);
  if (!raters_.count(rater_id)) throw SubmitError(403, "rater_id", "unknown rater; registration required");
  auto t = task_index_.find(task_id);
  if (t == task_index_.end()) throw SubmitError(404, "task_id", "unknown task");
  if (auto d = done_.find({rater_id, t->second}); d != done_.end())
    throw SubmitError(409, "task_id", "task already rated by this rater", entries_[d->second].ack);

  if (!scores.is_object()) throw SubmitError(400, "scores", "scores must be an object");
  HumanRating r;
  r.rater_id = rater_id;
  r.model_id = study_.items[t->second].model_id;
  r.prompt_id = study_.items[t->second].prompt_id;
  for (const auto& [key, v] : scores.items()) {
    auto a = parse_aspect(key);
    if (!a) throw SubmitError(400, key, "unknown aspect");
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1 || v.get<std::int64_t>() > 5)
      throw SubmitError(400, key, "score must be an integer from 1 to 5");
    r.scores[*a] = v.get<int>();
  }
  for (Aspect a : kAllAspects)
    if (!r.scores.count(a)) throw SubmitError(400, std::string(to_string(a)), "score missing");

  const Ack ack{task_id, rater_id, static_cast<std::uint64_t>(entries_.size() + 1)};
  json scores_json = json::object();
  for (const auto& [a, v] : r.scores) scores_json[std::string(to_string(a))] = v;
  append({{"type", "rating"}, {"sequence", ack.sequence}, {"task_id", task_id}, {"rater_id", rater_id}, {"scores", scores_json}});
  done_[{rater_id, t->second}] = entries_.size();
  ++counts_[t->second];
  entries_.push_back({t->second, std::move(r), ack});
  return ack;
}

std::vector<HumanRating> AnnotationStore::ratings() const {
  std::shared_lock lock(mutex_);
  std::vector<HumanRating> out;
  for (const auto& e : entries_) out.push_back(e.rating);
  return out;
}

void AnnotationStore::export_ratings(std::ostream& out) const { write_ratings(out, ratings(), study_.study_id); }

StudyProgress AnnotationStore::progress() const {
  std::shared_lock lock(mutex_);
  StudyProgress p;
  p.items = study_.items.size();
  p.raters = raters_.size();
  p.ratings = entries_.size();
  p.target_ratings = study_.target_ratings;
  if (!counts_.empty()) {
    p.min_ratings_per_item = *std::min_element(counts_.begin(), counts_.end());
    p.max_ratings_per_item = *std::max_element(counts_.begin(), counts_.end());
  }
  p.items_at_target = static_cast<std::size_t>(std::count_if(
      counts_.begin(), counts_.end(), [&](std::size_t c) { return c >= static_cast<std::size_t>(study_.target_ratings); }));
  return p;
}

std::optional<std::filesystem::path> AnnotationStore::resolve_media(const std::string& token, const std::string& name) const {
  auto m = media_index_.find(token);
  if (m == media_index_.end()) return std::nullopt;
  const auto& it = study_.items[m->second];
  if (name == "video" + it.video.extension().string()) return it.video;
  for (std::size_t k = 0; k < it.references.size(); ++k)
    if (name == "ref" + std::to_string(k + 1) + it.references[k].extension().string()) return it.references[k];
  return std::nullopt;
}

}  // namespace t2veval
