#include "t2veval/mock_backends.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <fstream>

#include "t2veval/error.hpp"
#include "t2veval/hash.hpp"
#include "t2veval/text_metrics.hpp"
#include "t2veval/vocabulary.hpp"

namespace t2veval {

using nlohmann::json;

namespace {

constexpr int kGrid = 4;
constexpr int kImageFeatures = kGrid * kGrid * 3 + 1;

std::vector<double> gaussian_vector(std::uint64_t seed, int dim) {
  SplitMix64 rng(seed);
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (auto& x : v) x = rng.normal();
  return v;
}

std::vector<double> image_features(const Image& frame) {
  auto f = grid_means(frame, kGrid, kGrid);
  for (auto& x : f) x -= 0.5;
  f.push_back(1.0);
  return f;
}

std::vector<double> project(const std::vector<double>& matrix, const std::vector<double>& x, int rows) {
  std::vector<double> out(static_cast<std::size_t>(rows), 0.0);
  const std::size_t cols = x.size();
  for (int r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[static_cast<std::size_t>(r)] += matrix[r * cols + c] * x[c];
  return out;
}

const SceneAnnotation* first_annotated(const SceneTable* scenes, const FrameSequence& video) {
  if (!scenes) return nullptr;
  for (const auto& f : video.frames)
    if (const auto* a = scenes->find(f)) return a;
  return nullptr;
}

constexpr std::array<std::string_view, 16> kFillerWords = {
    "a", "the", "video", "of", "scene", "with", "person", "dog", "car", "red",
    "blue", "moving", "slowly", "in", "street", "park"};

}  // namespace

void SceneTable::add(const Image& image, SceneAnnotation annotation) { add(content_hash(image), std::move(annotation)); }

void SceneTable::add(std::uint64_t hash, SceneAnnotation annotation) { entries_[hash] = std::move(annotation); }

const SceneAnnotation* SceneTable::find(const Image& image) const {
  auto it = entries_.find(content_hash(image));
  return it == entries_.end() ? nullptr : &it->second;
}

json SceneTable::to_json() const {
  json out = json::object();
  for (const auto& [hash, a] : entries_) {
    json j = json::object();
    if (a.tag) j["tag"] = *a.tag;
    if (a.caption) j["caption"] = *a.caption;
    if (a.text) j["text"] = *a.text;
    if (a.action) j["action"] = *a.action;
    if (!a.face) j["face"] = false;
    if (!a.objects.empty()) {
      json objs = json::array();
      for (const auto& o : a.objects) {
        json jo = {{"name", o.name}, {"count", o.count}};
        if (o.color) jo["color"] = *o.color;
        objs.push_back(std::move(jo));
      }
      j["objects"] = std::move(objs);
    }
    out[hex64(hash)] = std::move(j);
  }
  return out;
}

SceneTable SceneTable::from_json(const json& j) {
  SceneTable t;
  for (const auto& [key, v] : j.items()) {
    SceneAnnotation a;
    if (v.contains("tag")) a.tag = v["tag"].get<std::string>();
    if (v.contains("caption")) a.caption = v["caption"].get<std::string>();
    if (v.contains("text")) a.text = v["text"].get<std::string>();
    if (v.contains("action")) a.action = v["action"].get<std::string>();
    a.face = v.value("face", true);
    if (v.contains("objects"))
      for (const auto& o : v["objects"]) {
        SceneObject so{o.at("name").get<std::string>(), o.value("count", 1), std::nullopt};
        if (o.contains("color")) so.color = o["color"].get<std::string>();
        a.objects.push_back(std::move(so));
      }
    t.add(std::stoull(key, nullptr, 16), std::move(a));
  }
  return t;
}

SceneTable SceneTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scene table " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("invalid scene table " + path.string() + ": " + e.what());
  }
}

void SceneTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json().dump(1) << '\n';
}

MockEmbedder::MockEmbedder(SceneTablePtr scenes, int dim) : scenes_(std::move(scenes)), dim_(dim) {
  projection_ = gaussian_vector(fnv1a("mock-clip-projection"), dim_ * kImageFeatures);
}

Embedding MockEmbedder::embed_text(std::string_view text) {
  std::vector<double> v(static_cast<std::size_t>(dim_), 0.0);
  const auto tokens = tokenize(text);
  std::string joined;
  for (const auto& t : tokens) {
    const auto g = gaussian_vector(fnv1a(t, fnv1a("tok:")), dim_);
    for (int i = 0; i < dim_; ++i) v[i] += g[i];
    joined += t;
    joined += ' ';
  }
  const auto whole = gaussian_vector(fnv1a(joined, fnv1a("txt:")), dim_);
  for (int i = 0; i < dim_; ++i) v[i] += 0.5 * whole[i];
  return {std::move(v), "mock-clip"};
}

Embedding MockEmbedder::embed_image(const Image& frame) {
  if (scenes_)
    if (const auto* a = scenes_->find(frame); a && a->tag) return embed_text(*a->tag);
  return {project(projection_, image_features(frame), dim_), "mock-clip"};
}

std::vector<std::string> MockCaptioner::captions(const FrameSequence& video, int n) {
  std::string base;
  if (const auto* a = first_annotated(scenes_.get(), video); a && a->caption) {
    base = *a->caption;
  } else {
    SplitMix64 rng(video.frames.empty() ? 0 : content_hash(video.frames.front()));
    for (int i = 0; i < 6; ++i) {
      if (i) base += ' ';
      base += kFillerWords[rng.below(kFillerWords.size())];
    }
  }
  const std::array<std::string, 5> paraphrases = {base, "a video of " + base, base + " in the scene",
                                                  "there is " + base, "a clip showing " + base};
  std::vector<std::string> out;
  for (int k = 0; k < n; ++k) out.push_back(paraphrases[static_cast<std::size_t>(k) % paraphrases.size()]);
  return out;
}

MockDetector::MockDetector(SceneTablePtr scenes) : scenes_(std::move(scenes)) {
  for (auto c : coco_classes()) vocabulary_.emplace_back(c);
}

DetectionFrameResult MockDetector::detect(const Image& frame, std::string_view target,
                                          std::optional<std::string_view> color) {
  if (std::find(vocabulary_.begin(), vocabulary_.end(), target) == vocabulary_.end())
    throw BackendError("detector target '" + std::string(target) + "' is not in the detector vocabulary (" +
                       std::to_string(vocabulary_.size()) + " COCO classes, e.g. person, dog, car)");
  DetectionFrameResult r;
  if (const SceneAnnotation* a = scenes_ ? scenes_->find(frame) : nullptr) {
    bool colored = false;
    for (const auto& o : a->objects) {
      if (o.name != target) continue;
      r.count += std::max(0, o.count);
      if (color && o.color && *o.color == *color) colored = true;
    }
    r.present = r.count > 0;
    if (color) r.color_match = r.present && colored;
    return r;
  }
  const std::uint64_t h = mix(content_hash(frame), fnv1a(target));
  r.present = h % 4 != 0;
  r.count = r.present ? 1 + static_cast<int>((h >> 8) % 3) : 0;
  if (color) r.color_match = r.present && ((h >> 16) % 2 == 0);
  return r;
}

MockFaceAnalyzer::MockFaceAnalyzer(SceneTablePtr scenes) : scenes_(std::move(scenes)) {
  projection_ = gaussian_vector(fnv1a("mock-face-projection"), 32 * kImageFeatures);
}

Embedding MockFaceAnalyzer::embed_image(const Image& frame) {
  return {project(projection_, image_features(frame), 32), "mock-face"};
}

std::optional<double> MockFaceAnalyzer::face_distance(const Image& frame, const Image& reference) {
  if (scenes_)
    if (const auto* a = scenes_->find(frame); a && !a->face) return std::nullopt;
  const auto ga = grid_means(frame, 8, 8);
  const auto gb = grid_means(reference, 8, 8);
  double sum = 0;
  for (std::size_t i = 0; i < ga.size(); ++i) sum += std::abs(ga[i] - gb[i]);
  return sum / static_cast<double>(ga.size());
}

std::string MockOcr::recognize_text(const Image& frame) {
  if (scenes_)
    if (const auto* a = scenes_->find(frame)) return a->text.value_or("");
  const std::uint64_t h = content_hash(frame);
  if (h % 3 == 0) return {};
  return std::string(kFillerWords[(h >> 4) % kFillerWords.size()]);
}

ActionPrediction MockActionClassifier::classify_action(const FrameSequence& video) {
  if (const auto* a = first_annotated(scenes_.get(), video); a && a->action) return {*a->action, 0.9};
  const auto labels = kinetics400_labels();
  const std::uint64_t h = video.frames.empty() ? 0 : content_hash(video.frames.front());
  return {std::string(labels[h % labels.size()]), 0.5};
}

FlowField GlobalShiftFlow::estimate_flow(const Image& from, const Image& to) {
  if (from.width != to.width || from.height != to.height) throw BackendError("flow frames differ in size");
  const int w = from.width, h = from.height;
  auto luma = [](const Image& im, int x, int y) {
    return 0.299 * im.at(x, y, 0) + 0.587 * im.at(x, y, 1) + 0.114 * im.at(x, y, 2);
  };
  // Candidates ordered by shift length so ties resolve toward the smallest motion.
  std::vector<std::pair<int, int>> shifts;
  for (int dy = -max_shift_; dy <= max_shift_; ++dy)
    for (int dx = -max_shift_; dx <= max_shift_; ++dx) shifts.emplace_back(dx, dy);
  std::stable_sort(shifts.begin(), shifts.end(), [](auto a, auto b) {
    return a.first * a.first + a.second * a.second < b.first * b.first + b.second * b.second;
  });
  double best = std::numeric_limits<double>::infinity();
  std::pair<int, int> best_shift{0, 0};
  for (auto [dx, dy] : shifts) {
    double cost = 0;
    long n = 0;
    for (int y = std::max(0, -dy); y < std::min(h, h - dy); ++y)
      for (int x = std::max(0, -dx); x < std::min(w, w - dx); ++x) {
        cost += std::abs(luma(to, x + dx, y + dy) - luma(from, x, y));
        ++n;
      }
    if (n == 0) continue;
    cost /= static_cast<double>(n);
    if (cost < best - 1e-12) {
      best = cost;
      best_shift = {dx, dy};
    }
  }
  return FlowField(w, h, static_cast<float>(best_shift.first), static_cast<float>(best_shift.second));
}

VqaScores MockVqa::vqa_scores(const FrameSequence& video) {
  if (constant_) return *constant_;
  if (video.frames.empty()) throw BackendError("empty video");
  double saturation = 0, gradient = 0;
  for (const auto& f : video.frames) {
    double s = 0, g = 0;
    for (int y = 0; y < f.height; ++y)
      for (int x = 0; x < f.width; ++x) {
        const auto r = f.at(x, y, 0), gg = f.at(x, y, 1), b = f.at(x, y, 2);
        s += (std::max({r, gg, b}) - std::min({r, gg, b})) / 255.0;
        if (x + 1 < f.width) g += std::abs(static_cast<int>(f.at(x + 1, y, 1)) - gg) / 255.0;
      }
    saturation += s / static_cast<double>(f.pixel_count());
    gradient += g / static_cast<double>(f.pixel_count());
  }
  const double n = static_cast<double>(video.frames.size());
  return {saturation / n, std::min(1.0, 4.0 * gradient / n)};
}

MockInception::MockInception(int classes, bool uniform) : classes_(classes), uniform_(uniform) {
  if (classes_ < 1) throw ConfigError("inception mock needs at least one class");
  projection_ = gaussian_vector(fnv1a("mock-inception-projection"), classes_ * kImageFeatures);
}

std::vector<double> MockInception::class_probs(const Image& frame) {
  const std::size_t k = static_cast<std::size_t>(classes_);
  if (uniform_) return std::vector<double>(k, 1.0 / static_cast<double>(k));
  auto logits = project(projection_, image_features(frame), classes_);
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0;
  for (auto& l : logits) z += (l = std::exp(4.0 * (l - mx)));
  for (auto& l : logits) l /= z;
  return logits;
}

std::vector<Image> DirectoryReferenceSource::reference_images(std::string_view prompt_id) {
  const auto dir = root_ / std::string(prompt_id);
  if (!std::filesystem::is_directory(dir)) throw BackendError("missing reference directory " + dir.string());
  std::vector<Image> out;
  for (int k = 1; k <= kReferenceCount; ++k) out.push_back(read_image(dir / (std::to_string(k) + ".png")));
  return out;
}

std::vector<Image> DirectoryReferenceSource::celebrity_gallery(std::string_view name) {
  const auto dir = root_ / "celebs" / std::string(name);
  if (!std::filesystem::is_directory(dir)) throw BackendError("missing celebrity gallery " + dir.string());
  std::vector<Image> out;
  for (int k = 1; k <= kGalleryCount; ++k) out.push_back(read_image(dir / (std::to_string(k) + ".png")));
  return out;
}

std::vector<Image> InMemoryReferenceSource::reference_images(std::string_view prompt_id) {
  auto it = references.find(prompt_id);
  if (it == references.end()) throw BackendError("no reference images for " + std::string(prompt_id));
  return it->second;
}

std::vector<Image> InMemoryReferenceSource::celebrity_gallery(std::string_view name) {
  auto it = galleries.find(name);
  if (it == galleries.end()) throw BackendError("no gallery for " + std::string(name));
  return it->second;
}

BackendRegistry make_mock_registry(SceneTablePtr scenes, const std::optional<std::filesystem::path>& reference_root) {
  BackendRegistry r;
  r.text_image_embedder = std::make_shared<MockEmbedder>(scenes);
  r.captioner = std::make_shared<MockCaptioner>(scenes);
  r.detector_tracker = std::make_shared<MockDetector>(scenes);
  r.face_analyzer = std::make_shared<MockFaceAnalyzer>(scenes);
  r.ocr_engine = std::make_shared<MockOcr>(scenes);
  r.action_classifier = std::make_shared<MockActionClassifier>(scenes);
  r.flow_estimator = std::make_shared<GlobalShiftFlow>();
  r.vqa_scorer = std::make_shared<MockVqa>();
  r.inception_classifier = std::make_shared<MockInception>();
  if (reference_root) r.reference_image_source = std::make_shared<DirectoryReferenceSource>(*reference_root);
  return r;
}

}  // namespace t2veval
