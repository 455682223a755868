#pragma once

// Scripted backends: every answer is looked up by image content hash, so a test
// states exactly what each frame "contains".

#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "t2veval/backends.hpp"
#include "t2veval/benchmark.hpp"
#include "t2veval/error.hpp"
#include "t2veval/image.hpp"
#include "t2veval/media.hpp"

namespace testing_support {

using namespace t2veval;

/// Distinct solid frames: frame(i) differs from frame(j) for i != j.
inline Image frame(int i, int w = 8, int h = 6) {
  return Image(w, h, Rgb{static_cast<std::uint8_t>(10 + 7 * i), static_cast<std::uint8_t>(200 - 5 * i), 77});
}

inline FrameSequence video(std::vector<Image> frames, const std::string& prompt_id = "p", double fps = 8.0) {
  FrameSequence v;
  v.frames = std::move(frames);
  v.fps = fps;
  v.prompt_id = prompt_id;
  v.model_id = "m";
  return v;
}

inline PromptRecord record(const std::string& id, const std::string& text = "a red cup on a table") {
  PromptRecord r;
  r.id = id;
  r.text = text;
  return r;
}

inline EvaluationItem item(PromptRecord r, std::vector<Image> frames) {
  auto v = video(std::move(frames), r.id);
  return {std::move(r), std::move(v)};
}

inline EvaluationSet set_of(std::vector<EvaluationItem> items, const std::string& model = "m") {
  return {model, std::move(items)};
}

class TableEmbedder : public TextImageEmbedder {
 public:
  std::map<std::uint64_t, std::vector<double>> images;
  std::map<std::string, std::vector<double>> texts;
  std::string name() const override { return "table"; }
  bool deterministic() const override { return true; }
  Embedding embed_image(const Image& im) override {
    auto it = images.find(content_hash(im));
    if (it == images.end()) throw BackendError("unscripted image");
    return {it->second, "s"};
  }
  Embedding embed_text(std::string_view t) override {
    auto it = texts.find(std::string(t));
    if (it == texts.end()) throw BackendError("unscripted text");
    return {it->second, "s"};
  }
};

class ScriptedDetector : public DetectorTracker {
 public:
  std::map<std::pair<std::uint64_t, std::string>, DetectionFrameResult> table;
  std::string name() const override { return "scripted"; }
  bool deterministic() const override { return true; }
  std::vector<std::string> vocabulary() const override { return {}; }
  DetectionFrameResult detect(const Image& im, std::string_view target, std::optional<std::string_view>) override {
    auto it = table.find({content_hash(im), std::string(target)});
    return it == table.end() ? DetectionFrameResult{} : it->second;
  }
};

class ScriptedFaces : public FaceAnalyzer {
 public:
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::optional<double>> table;
  std::string name() const override { return "scripted"; }
  bool deterministic() const override { return true; }
  Embedding embed_image(const Image&) override { return {{1.0}, "f"}; }
  std::optional<double> face_distance(const Image& f, const Image& r) override {
    return table.at({content_hash(f), content_hash(r)});
  }
};

class ScriptedOcr : public OcrEngine {
 public:
  std::map<std::uint64_t, std::string> table;
  std::string name() const override { return "scripted"; }
  bool deterministic() const override { return true; }
  std::string recognize_text(const Image& im) override { return table.at(content_hash(im)); }
};

class ScriptedCaptioner : public Captioner {
 public:
  std::vector<std::string> captions_out;
  std::string name() const override { return "scripted"; }
  bool deterministic() const override { return true; }
  std::vector<std::string> captions(const FrameSequence&, int) override { return captions_out; }
};

class ScriptedAction : public ActionClassifier {
 public:
  std::string label;
  std::string name() const override { return "scripted"; }
  bool deterministic() const override { return true; }
  ActionPrediction classify_action(const FrameSequence&) override { return {label, 0.9}; }
};

/// Constant flow field per source frame hash; unscripted pairs get zero flow.
class ScriptedFlow : public FlowEstimator {
 public:
  std::map<std::uint64_t, std::pair<float, float>> table;
  std::string name() const override { return "scripted"; }
  bool deterministic() const override { return true; }
  FlowField estimate_flow(const Image& from, const Image&) override {
    auto it = table.find(content_hash(from));
    if (it == table.end()) return FlowField(from.width, from.height);
    return FlowField(from.width, from.height, it->second.first, it->second.second);
  }
};

class ScriptedInception : public InceptionClassifier {
 public:
  std::map<std::uint64_t, std::vector<double>> table;
  std::string name() const override { return "scripted"; }
  bool deterministic() const override { return true; }
  std::vector<double> class_probs(const Image& im) override { return table.at(content_hash(im)); }
};

class ThrowingFlow : public FlowEstimator {
 public:
  std::string name() const override { return "throwing"; }
  bool deterministic() const override { return true; }
  FlowField estimate_flow(const Image&, const Image&) override { throw BackendError("flow backend down"); }
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("t2veval-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
