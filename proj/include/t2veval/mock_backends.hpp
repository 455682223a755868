#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "t2veval/backends.hpp"

namespace t2veval {

struct SceneObject {
  std::string name;
  int count = 1;
  std::optional<std::string> color;
};

/// What a mock backend "sees" in an image it recognizes.
struct SceneAnnotation {
  std::optional<std::string> tag;      // text the mock embedder maps this image onto
  std::vector<SceneObject> objects;
  std::optional<std::string> caption;
  std::optional<std::string> text;     // rendered text, for OCR
  std::optional<std::string> action;
  bool face = true;
};

/// Annotations keyed by exact image content hash. Lookups are pure functions of pixels.
class SceneTable {
 public:
  void add(const Image& image, SceneAnnotation annotation);
  void add(std::uint64_t hash, SceneAnnotation annotation);
  const SceneAnnotation* find(const Image& image) const;
  std::size_t size() const { return entries_.size(); }

  nlohmann::json to_json() const;
  static SceneTable from_json(const nlohmann::json& j);
  static SceneTable load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  std::map<std::uint64_t, SceneAnnotation> entries_;
};

using SceneTablePtr = std::shared_ptr<const SceneTable>;

/// Bag-of-words text vectors and a fixed random projection of a 4x4 color grid for
/// images. Images annotated with a tag embed exactly like the tag text.
class MockEmbedder : public TextImageEmbedder {
 public:
  explicit MockEmbedder(SceneTablePtr scenes = nullptr, int dim = 64);
  std::string name() const override { return "mock"; }
  bool deterministic() const override { return true; }
  bool reentrant() const override { return true; }
  Embedding embed_image(const Image& frame) override;
  Embedding embed_text(std::string_view text) override;

 private:
  SceneTablePtr scenes_;
  int dim_;
  std::vector<double> projection_;
};

class MockCaptioner : public Captioner {
 public:
  explicit MockCaptioner(SceneTablePtr scenes = nullptr) : scenes_(std::move(scenes)) {}
  std::string name() const override { return "mock"; }
  bool deterministic() const override { return true; }
  bool reentrant() const override { return true; }
  /// Fixed paraphrases of the scene caption.
  std::vector<std::string> captions(const FrameSequence& video, int n) override;

 private:
  SceneTablePtr scenes_;
};

class MockDetector : public DetectorTracker {
 public:
  explicit MockDetector(SceneTablePtr scenes = nullptr);
  std::string name() const override { return "mock"; }
  bool deterministic() const override { return true; }
  bool reentrant() const override { return true; }
  std::vector<std::string> vocabulary() const override { return vocabulary_; }
  DetectionFrameResult detect(const Image& frame, std::string_view target,
                              std::optional<std::string_view> color) override;

 private:
  SceneTablePtr scenes_;
  std::vector<std::string> vocabulary_;
};

/// Distance is the mean absolute difference of 8x8 color grids, so identical images are 0.
class MockFaceAnalyzer : public FaceAnalyzer {
 public:
  explicit MockFaceAnalyzer(SceneTablePtr scenes = nullptr);
  std::string name() const override { return "mock"; }
  bool deterministic() const override { return true; }
  bool reentrant() const override { return true; }
  Embedding embed_image(const Image& frame) override;
  std::optional<double> face_distance(const Image& frame, const Image& reference) override;

 private:
  SceneTablePtr scenes_;
  std::vector<double> projection_;
};

class MockOcr : public OcrEngine {
 public:
  explicit MockOcr(SceneTablePtr scenes = nullptr) : scenes_(std::move(scenes)) {}
  std::string name() const override { return "mock"; }
  bool deterministic() const override { return true; }
  bool reentrant() const override { return true; }
  std::string recognize_text(const Image& frame) override;

 private:
  SceneTablePtr scenes_;
};

class MockActionClassifier : public ActionClassifier {
 public:
  explicit MockActionClassifier(SceneTablePtr scenes = nullptr) : scenes_(std::move(scenes)) {}
  std::string name() const override { return "mock"; }
  bool deterministic() const override { return true; }
  bool reentrant() const override { return true; }
  ActionPrediction classify_action(const FrameSequence& video) override;

 private:
  SceneTablePtr scenes_;
};

/// Exhaustive search for the single integer translation minimizing mean absolute
/// luminance difference; returns it as a constant field. Ties prefer smaller shifts.
class GlobalShiftFlow : public FlowEstimator {
 public:
  explicit GlobalShiftFlow(int max_shift = 3) : max_shift_(max_shift) {}
  std::string name() const override { return "mock"; }
  bool deterministic() const override { return true; }
  bool reentrant() const override { return true; }
  FlowField estimate_flow(const Image& from, const Image& to) override;

 private:
  int max_shift_;
};

class MockVqa : public VqaScorer {
 public:
  MockVqa() = default;
  /// Every video scores exactly these values.
  MockVqa(double aesthetic, double technical) : constant_(VqaScores{aesthetic, technical}) {}
  std::string name() const override { return "mock"; }
  bool deterministic() const override { return true; }
  bool reentrant() const override { return true; }
  VqaScores vqa_scores(const FrameSequence& video) override;

 private:
  std::optional<VqaScores> constant_;
};

class MockInception : public InceptionClassifier {
 public:
  explicit MockInception(int classes = 10, bool uniform = false);
  std::string name() const override { return "mock"; }
  bool deterministic() const override { return true; }
  bool reentrant() const override { return true; }
  std::vector<double> class_probs(const Image& frame) override;

 private:
  int classes_;
  bool uniform_;
  std::vector<double> projection_;
};

/// Reads `<root>/<prompt_id>/{1..5}.png` and `<root>/celebs/<name>/{1..3}.png`.
class DirectoryReferenceSource : public ReferenceImageSource {
 public:
  static constexpr int kReferenceCount = 5;
  static constexpr int kGalleryCount = 3;

  explicit DirectoryReferenceSource(std::filesystem::path root) : root_(std::move(root)) {}
  std::string name() const override { return "directory"; }
  bool deterministic() const override { return true; }
  bool reentrant() const override { return true; }
  std::vector<Image> reference_images(std::string_view prompt_id) override;
  std::vector<Image> celebrity_gallery(std::string_view name) override;

 private:
  std::filesystem::path root_;
};

class InMemoryReferenceSource : public ReferenceImageSource {
 public:
  std::map<std::string, std::vector<Image>, std::less<>> references;
  std::map<std::string, std::vector<Image>, std::less<>> galleries;

  std::string name() const override { return "memory"; }
  bool deterministic() const override { return true; }
  std::vector<Image> reference_images(std::string_view prompt_id) override;
  std::vector<Image> celebrity_gallery(std::string_view name) override;
};

/// Every slot bound to its mock; references come from `reference_root` when given.
BackendRegistry make_mock_registry(SceneTablePtr scenes = nullptr,
                                   const std::optional<std::filesystem::path>& reference_root = std::nullopt);

}  // namespace t2veval
