#include "t2veval/backends.hpp"

#include <algorithm>
#include <cmath>

#include "t2veval/error.hpp"

namespace t2veval {

double cosine(const Embedding& a, const Embedding& b) {
  if (a.space_id != b.space_id)
    throw Error("cannot compare embeddings from spaces '" + a.space_id + "' and '" + b.space_id + "'");
  if (a.vector.size() != b.vector.size()) throw Error("embedding dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.vector.size(); ++i) {
    if (!std::isfinite(a.vector[i]) || !std::isfinite(b.vector[i])) throw Error("non-finite embedding entry");
    dot += a.vector[i] * b.vector[i];
    na += a.vector[i] * a.vector[i];
    nb += b.vector[i] * b.vector[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error("zero-norm embedding in space '" + a.space_id + "'");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

FlowField::FlowField(int w, int h, float dx, float dy) : width(w), height(h), uv(static_cast<std::size_t>(w) * h * 2) {
  for (std::size_t i = 0; i < uv.size(); i += 2) {
    uv[i] = dx;
    uv[i + 1] = dy;
  }
}

void FlowField::set(int x, int y, float dx, float dy) {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 2;
  uv[i] = dx;
  uv[i + 1] = dy;
}

std::string_view to_string(Slot slot) {
  switch (slot) {
    case Slot::text_image_embedder: return "text_image_embedder";
    case Slot::captioner: return "captioner";
    case Slot::detector_tracker: return "detector_tracker";
    case Slot::face_analyzer: return "face_analyzer";
    case Slot::ocr_engine: return "ocr_engine";
    case Slot::action_classifier: return "action_classifier";
    case Slot::flow_estimator: return "flow_estimator";
    case Slot::vqa_scorer: return "vqa_scorer";
    case Slot::inception_classifier: return "inception_classifier";
    case Slot::reference_image_source: return "reference_image_source";
  }
  return "?";
}

std::optional<Slot> parse_slot(std::string_view name) {
  for (auto s : kAllSlots)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

const Backend* BackendRegistry::get(Slot slot) const {
  switch (slot) {
    case Slot::text_image_embedder: return text_image_embedder.get();
    case Slot::captioner: return captioner.get();
    case Slot::detector_tracker: return detector_tracker.get();
    case Slot::face_analyzer: return face_analyzer.get();
    case Slot::ocr_engine: return ocr_engine.get();
    case Slot::action_classifier: return action_classifier.get();
    case Slot::flow_estimator: return flow_estimator.get();
    case Slot::vqa_scorer: return vqa_scorer.get();
    case Slot::inception_classifier: return inception_classifier.get();
    case Slot::reference_image_source: return reference_image_source.get();
  }
  return nullptr;
}

void BackendRegistry::require(Slot slot) const {
  if (!bound(slot)) throw ConfigError("backend slot '" + std::string(to_string(slot)) + "' is not bound");
}

bool BackendRegistry::all_deterministic() const {
  for (auto s : kAllSlots)
    if (const Backend* b = get(s); b && !b->deterministic()) return false;
  return true;
}

}  // namespace t2veval
