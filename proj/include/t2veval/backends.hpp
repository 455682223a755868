#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "t2veval/image.hpp"
#include "t2veval/media.hpp"

namespace t2veval {

/// A vector in a named embedding space. Only vectors of one space are comparable.
struct Embedding {
  std::vector<double> vector;
  std::string space_id;
};

/// Cosine similarity. Throws Error on space/size mismatch or a zero-norm vector.
double cosine(const Embedding& a, const Embedding& b);

struct DetectionFrameResult {
  bool present = false;
  int count = 0;
  std::optional<bool> color_match;
};

/// Dense per-pixel displacement (dx, dy) from one frame to the next.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> uv;  // interleaved dx, dy

  FlowField() = default;
  FlowField(int w, int h, float dx = 0.f, float dy = 0.f);
  float dx(int x, int y) const { return uv[(static_cast<std::size_t>(y) * width + x) * 2]; }
  float dy(int x, int y) const { return uv[(static_cast<std::size_t>(y) * width + x) * 2 + 1]; }
  void set(int x, int y, float dx, float dy);
};

struct ActionPrediction {
  std::string label;
  double confidence = 0.0;
};

struct VqaScores {
  double aesthetic = 0.0;
  double technical = 0.0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual bool deterministic() const = 0;
  /// A reentrant backend may be shared between workers.
  virtual bool reentrant() const { return false; }
};

class ImageEncoder : public Backend {
 public:
  virtual Embedding embed_image(const Image& frame) = 0;
};

class TextImageEmbedder : public ImageEncoder {
 public:
  virtual Embedding embed_text(std::string_view text) = 0;
};

class Captioner : public Backend {
 public:
  virtual std::vector<std::string> captions(const FrameSequence& video, int n) = 0;
};

class DetectorTracker : public Backend {
 public:
  virtual std::vector<std::string> vocabulary() const = 0;
  /// Throws BackendError naming the vocabulary when `target` is unknown.
  virtual DetectionFrameResult detect(const Image& frame, std::string_view target,
                                      std::optional<std::string_view> color = std::nullopt) = 0;
};

/// Face identity analysis. The image-encoder half embeds face crops.
class FaceAnalyzer : public ImageEncoder {
 public:
  /// Non-negative identity distance, or nullopt when no face is found in `frame`.
  virtual std::optional<double> face_distance(const Image& frame, const Image& reference) = 0;
};

class OcrEngine : public Backend {
 public:
  virtual std::string recognize_text(const Image& frame) = 0;
};

class ActionClassifier : public Backend {
 public:
  virtual ActionPrediction classify_action(const FrameSequence& video) = 0;
};

class FlowEstimator : public Backend {
 public:
  virtual FlowField estimate_flow(const Image& from, const Image& to) = 0;
};

class VqaScorer : public Backend {
 public:
  virtual VqaScores vqa_scores(const FrameSequence& video) = 0;
};

class InceptionClassifier : public Backend {
 public:
  /// Probability vector over the classifier's classes; sums to 1.
  virtual std::vector<double> class_probs(const Image& frame) = 0;
};

/// Supplies the per-prompt text-to-image reference images and the celebrity gallery.
class ReferenceImageSource : public Backend {
 public:
  virtual std::vector<Image> reference_images(std::string_view prompt_id) = 0;
  virtual std::vector<Image> celebrity_gallery(std::string_view name) = 0;
};

enum class Slot {
  text_image_embedder,
  captioner,
  detector_tracker,
  face_analyzer,
  ocr_engine,
  action_classifier,
  flow_estimator,
  vqa_scorer,
  inception_classifier,
  reference_image_source,
};

inline constexpr std::array<Slot, 10> kAllSlots = {
    Slot::text_image_embedder, Slot::captioner,         Slot::detector_tracker, Slot::face_analyzer,
    Slot::ocr_engine,          Slot::action_classifier, Slot::flow_estimator,   Slot::vqa_scorer,
    Slot::inception_classifier, Slot::reference_image_source,
};

std::string_view to_string(Slot slot);
std::optional<Slot> parse_slot(std::string_view name);

struct BackendRegistry {
  std::shared_ptr<TextImageEmbedder> text_image_embedder;
  std::shared_ptr<Captioner> captioner;
  std::shared_ptr<DetectorTracker> detector_tracker;
  std::shared_ptr<FaceAnalyzer> face_analyzer;
  std::shared_ptr<OcrEngine> ocr_engine;
  std::shared_ptr<ActionClassifier> action_classifier;
  std::shared_ptr<FlowEstimator> flow_estimator;
  std::shared_ptr<VqaScorer> vqa_scorer;
  std::shared_ptr<InceptionClassifier> inception_classifier;
  std::shared_ptr<ReferenceImageSource> reference_image_source;

  const Backend* get(Slot slot) const;
  bool bound(Slot slot) const { return get(slot) != nullptr; }
  /// Throws ConfigError naming the slot when unbound.
  void require(Slot slot) const;
  bool all_deterministic() const;
};

}  // namespace t2veval
