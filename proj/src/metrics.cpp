#include "t2veval/metrics.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "t2veval/error.hpp"
#include "t2veval/text_metrics.hpp"
#include "t2veval/video_ops.hpp"

namespace t2veval {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::higher_better: return "higher_better";
    case Direction::lower_better: return "lower_better";
    case Direction::target_match: return "target_match";
  }
  return "?";
}

std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "higher_better") return Direction::higher_better;
  if (s == "lower_better") return Direction::lower_better;
  if (s == "target_match") return Direction::target_match;
  return std::nullopt;
}

std::string_view to_string(MetricGroup g) {
  switch (g) {
    case MetricGroup::video_quality: return "video_quality";
    case MetricGroup::text_video_alignment: return "text_video_alignment";
    case MetricGroup::motion_quality: return "motion_quality";
    case MetricGroup::temporal_consistency: return "temporal_consistency";
  }
  return "?";
}

const std::vector<MetricInfo>& metric_catalog() {
  using D = Direction;
  using G = MetricGroup;
  using S = Slot;
  static const std::vector<MetricInfo> catalog = {
      {"vqa_a", "VQA_A", D::higher_better, G::video_quality, {{S::vqa_scorer}}, true, false},
      {"vqa_t", "VQA_T", D::higher_better, G::video_quality, {{S::vqa_scorer}}, true, false},
      {"is", "IS", D::higher_better, G::video_quality, {{S::inception_classifier}}, false, false},
      {"clip_score", "CLIP-Score", D::higher_better, G::text_video_alignment, {{S::text_image_embedder}}, true, false},
      {"blip_bleu", "BLIP-BLEU", D::higher_better, G::text_video_alignment, {{S::captioner}}, true, false},
      {"sd_score", "SD-Score", D::higher_better, G::text_video_alignment,
       {{S::text_image_embedder}, {S::reference_image_source}}, true, false},
      {"detection_score", "Detection-Score", D::higher_better, G::text_video_alignment, {{S::detector_tracker}}, true, true},
      {"color_score", "Color-Score", D::higher_better, G::text_video_alignment, {{S::detector_tracker}}, true, true},
      {"count_score", "Count-Score", D::higher_better, G::text_video_alignment, {{S::detector_tracker}}, true, true},
      {"ocr_score", "OCR Score", D::lower_better, G::text_video_alignment, {{S::ocr_engine}}, true, true},
      {"celebrity_id_score", "Celebrity ID Score", D::lower_better, G::text_video_alignment,
       {{S::face_analyzer}, {S::reference_image_source}}, true, true},
      {"action_score", "Action-Score", D::higher_better, G::motion_quality, {{S::action_classifier}}, true, true},
      {"motion_ac_score", "Motion AC-Score", D::target_match, G::motion_quality, {{S::flow_estimator}}, true, true},
      {"flow_score", "Flow-Score", D::target_match, G::motion_quality, {{S::flow_estimator}}, false, false},
      {"clip_temp", "CLIP-Temp", D::higher_better, G::temporal_consistency, {{S::text_image_embedder}}, true, false},
      {"warping_error", "Warping Error", D::lower_better, G::temporal_consistency, {{S::flow_estimator}}, false, false},
      {"face_consistency", "Face Consistency", D::higher_better, G::temporal_consistency,
       {{S::face_analyzer, S::text_image_embedder}}, true, false},
  };
  return catalog;
}

const MetricInfo& metric_info(std::string_view id) {
  for (const auto& m : metric_catalog())
    if (m.id == id) return m;
  throw Error("unknown metric '" + std::string(id) + "'");
}

std::string missing_requirements(const MetricInfo& info, const BackendRegistry& registry) {
  std::string out;
  for (const auto& any_of : info.requirements) {
    if (std::any_of(any_of.begin(), any_of.end(), [&](Slot s) { return registry.bound(s); })) continue;
    if (!out.empty()) out += ", ";
    for (std::size_t i = 0; i < any_of.size(); ++i) {
      if (i) out += " or ";
      out += to_string(any_of[i]);
    }
  }
  return out;
}

bool applicable(std::string_view id, const PromptRecord& r) {
  const auto& a = r.attributes;
  if (id == "detection_score") return !a.objects.empty();
  if (id == "count_score") return a.has_counts();
  if (id == "color_score") return a.has_colors();
  if (id == "celebrity_id_score") return a.celebrity.has_value();
  if (id == "ocr_score") return a.render_text.has_value();
  if (id == "action_score") return a.action_label.has_value();
  if (id == "motion_ac_score") return a.amplitude.has_value();
  metric_info(id);
  return true;
}

void MetricConfig::validate() const {
  if (!(flow_threshold > 0) || !std::isfinite(flow_threshold))
    throw ConfigError("flow threshold must be a positive number");
  if (is_splits < 1) throw ConfigError("inception score split count must be >= 1");
  if (caption_count < 1) throw ConfigError("caption count must be >= 1");
}

MetricResult finish_metric(std::string_view metric_id, std::map<std::string, double> values) {
  const MetricInfo& info = metric_info(metric_id);
  if (values.empty()) throw Error("no applicable videos produced a value for " + std::string(metric_id));
  MetricResult r;
  r.metric_id = std::string(metric_id);
  r.direction = info.direction;
  r.applicable_count = values.size();
  double sum = 0;
  for (const auto& [id, v] : values) sum += v;
  r.aggregate = sum / static_cast<double>(values.size());
  r.per_video = std::move(values);
  return r;
}

// ---- kernels ---------------------------------------------------------------

namespace {

double mean_of(std::span<const double> v) {
  if (v.empty()) throw Error("mean of an empty sequence");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double mean_cosine_to(std::span<const Embedding> frames, const Embedding& target) {
  if (frames.empty()) throw Error("no frames");
  double sum = 0;
  for (const auto& f : frames) sum += cosine(f, target);
  return sum / static_cast<double>(frames.size());
}

double mean_cosine_to_references(std::span<const Embedding> frames, std::span<const Embedding> refs) {
  if (frames.empty()) throw Error("no frames");
  if (refs.empty()) throw Error("no reference images");
  double sum = 0;
  for (const auto& f : frames) {
    double inner = 0;
    for (const auto& d : refs) inner += cosine(f, d);
    sum += inner / static_cast<double>(refs.size());
  }
  return sum / static_cast<double>(frames.size());
}

double mean_caption_bleu(std::string_view prompt, std::span<const std::string> captions) {
  if (captions.empty()) throw Error("no captions");
  double sum = 0;
  for (const auto& c : captions) {
    if (tokenize(c).empty()) {
      spdlog::warn("empty caption for prompt '{}', scored as BLEU 0", prompt);
      continue;
    }
    sum += sentence_bleu(prompt, c);
  }
  return sum / static_cast<double>(captions.size());
}

double mean_frame_rate(const std::vector<std::vector<double>>& per_frame) {
  if (per_frame.empty()) throw Error("no frames");
  double sum = 0;
  for (const auto& f : per_frame) sum += mean_of(f);
  return sum / static_cast<double>(per_frame.size());
}

double count_frame_term(int detected, int expected) {
  if (expected < 1) throw Error("expected count must be >= 1");
  if (detected < 0) throw Error("detected count must be >= 0");
  const double term = std::abs(detected - expected) / static_cast<double>(expected);
  return std::clamp(term, 0.0, 1.0);
}

double count_video_score(const std::vector<std::vector<double>>& per_frame_terms) {
  return 1.0 - mean_frame_rate(per_frame_terms);
}

double celebrity_video_distance(const std::vector<std::vector<std::optional<double>>>& distances) {
  double sum = 0;
  std::size_t frames = 0;
  for (const auto& row : distances) {
    std::optional<double> best;
    for (const auto& d : row)
      if (d && (!best || *d < *best)) best = d;
    if (!best) continue;
    sum += *best;
    ++frames;
  }
  return frames ? sum / static_cast<double>(frames) : 1.0;
}

double ocr_video_score(std::string_view truth, std::span<const std::string> recognized) {
  if (recognized.empty()) throw Error("no frames");
  double sum = 0;
  for (const auto& r : recognized) sum += ocr_components(truth, r).combined();
  return sum / static_cast<double>(recognized.size());
}

double consecutive_cosine(std::span<const Embedding> frames) {
  if (frames.size() < 2) throw Error("temporal consistency needs at least 2 frames");
  double sum = 0;
  for (std::size_t t = 0; t + 1 < frames.size(); ++t) sum += cosine(frames[t], frames[t + 1]);
  return sum / static_cast<double>(frames.size() - 1);
}

double first_frame_cosine(std::span<const Embedding> frames) {
  if (frames.size() < 2) throw Error("temporal consistency needs at least 2 frames");
  double sum = 0;
  for (std::size_t t = 1; t < frames.size(); ++t) sum += cosine(frames[t], frames[0]);
  return sum / static_cast<double>(frames.size() - 1);
}

bool is_large_motion(double flow_score, double rho) { return flow_score > rho; }

// ---- set level -------------------------------------------------------------

namespace {

/// Runs `f` for frame `t`, tagging untagged failures with the frame index.
template <typename F>
auto at_frame(std::size_t t, F&& f) {
  try {
    return f();
  } catch (const BackendError& e) {
    if (e.frame_index()) throw;
    throw BackendError(e.what(), t);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw BackendError(e.what(), t);
  }
}

double finite(double v, std::string_view what) {
  if (!std::isfinite(v)) throw BackendError(std::string(what) + " returned a non-finite value");
  return v;
}

template <typename F>
PerVideo per_item(std::string_view id, std::span<const EvaluationItem> items, F&& score) {
  PerVideo out;
  for (const auto& item : items) {
    if (!applicable(id, item.record)) continue;
    try {
      out.values[item.record.id] = score(item);
    } catch (const ConfigError&) {
      throw;
    } catch (const BackendError& e) {
      out.errors.push_back({std::string(id), item.record.id, e.what(), e.frame_index()});
    } catch (const std::exception& e) {
      out.errors.push_back({std::string(id), item.record.id, e.what(), std::nullopt});
    }
  }
  return out;
}

std::vector<Embedding> embed_frames(const FrameSequence& v, ImageEncoder& e) {
  std::vector<Embedding> out;
  out.reserve(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) out.push_back(at_frame(t, [&] { return e.embed_image(v.frames[t]); }));
  return out;
}

MetricRun finish_run(std::string_view id, PerVideo pv) {
  const std::size_t failed = pv.errors.size();
  if (pv.values.empty() && failed)
    throw Error(std::string(id) + ": every applicable video failed (" + std::to_string(failed) +
                " errors); first: " + pv.errors.front().message);
  return {finish_metric(id, std::move(pv.values)), std::move(pv.errors)};
}

/// Flow fields between consecutive frames.
template <typename F>
void for_each_pair_flow(const FrameSequence& v, FlowEstimator& flow, F&& f) {
  if (v.size() < 2) throw Error("flow needs at least 2 frames; video has " + std::to_string(v.size()));
  for (std::size_t t = 0; t + 1 < v.size(); ++t) {
    FlowField field = at_frame(t, [&] { return flow.estimate_flow(v.frames[t], v.frames[t + 1]); });
    if (field.width != v.frames[t].width || field.height != v.frames[t].height)
      throw BackendError("flow field shape differs from frame shape", t);
    f(t, field);
  }
}

}  // namespace

PerVideo clip_score_values(std::span<const EvaluationItem> items, TextImageEmbedder& embedder) {
  return per_item("clip_score", items, [&](const EvaluationItem& item) {
    const Embedding text = embedder.embed_text(item.record.text);
    const auto frames = embed_frames(item.video, embedder);
    return mean_cosine_to(frames, text);
  });
}

PerVideo sd_score_values(std::span<const EvaluationItem> items, ImageEncoder& embedder, ReferenceImageSource& refs) {
  return per_item("sd_score", items, [&](const EvaluationItem& item) {
    const auto images = refs.reference_images(item.record.id);
    if (images.empty()) throw BackendError("no reference images for prompt '" + item.record.id + "'");
    if (images.size() != 5)
      spdlog::warn("prompt '{}' has {} reference images, expected 5", item.record.id, images.size());
    std::vector<Embedding> ref_emb;
    for (const auto& img : images) ref_emb.push_back(embedder.embed_image(img));
    const auto frames = embed_frames(item.video, embedder);
    return mean_cosine_to_references(frames, ref_emb);
  });
}

PerVideo blip_bleu_values(std::span<const EvaluationItem> items, Captioner& captioner, int captions) {
  return per_item("blip_bleu", items, [&](const EvaluationItem& item) {
    const auto caps = captioner.captions(item.video, captions);
    if (caps.empty()) throw BackendError("captioner returned no captions");
    return mean_caption_bleu(item.record.text, caps);
  });
}

PerVideo detection_score_values(std::span<const EvaluationItem> items, DetectorTracker& detector) {
  return per_item("detection_score", items, [&](const EvaluationItem& item) {
    std::vector<std::vector<double>> rows;
    for (std::size_t t = 0; t < item.video.size(); ++t) {
      auto& row = rows.emplace_back();
      for (const auto& obj : item.record.attributes.objects) {
        const auto r = at_frame(t, [&] { return detector.detect(item.video.frames[t], obj.name); });
        row.push_back(r.present ? 1.0 : 0.0);
      }
    }
    return mean_frame_rate(rows);
  });
}

PerVideo count_score_values(std::span<const EvaluationItem> items, DetectorTracker& detector) {
  return per_item("count_score", items, [&](const EvaluationItem& item) {
    std::vector<std::vector<double>> rows;
    for (std::size_t t = 0; t < item.video.size(); ++t) {
      auto& row = rows.emplace_back();
      for (const auto& obj : item.record.attributes.objects) {
        if (!obj.count) continue;
        const auto r = at_frame(t, [&] { return detector.detect(item.video.frames[t], obj.name); });
        if (r.count < 0) throw BackendError("negative object count", t);
        row.push_back(count_frame_term(r.count, *obj.count));
      }
    }
    return count_video_score(rows);
  });
}

PerVideo color_score_values(std::span<const EvaluationItem> items, DetectorTracker& detector) {
  return per_item("color_score", items, [&](const EvaluationItem& item) {
    std::vector<std::vector<double>> rows;
    for (std::size_t t = 0; t < item.video.size(); ++t) {
      auto& row = rows.emplace_back();
      for (const auto& obj : item.record.attributes.objects) {
        if (!obj.color) continue;
        const auto r = at_frame(t, [&] { return detector.detect(item.video.frames[t], obj.name, *obj.color); });
        if (!r.color_match) throw BackendError("detector returned no color verdict", t);
        row.push_back(*r.color_match ? 1.0 : 0.0);
      }
    }
    return mean_frame_rate(rows);
  });
}

PerVideo celebrity_id_values(std::span<const EvaluationItem> items, FaceAnalyzer& faces, ReferenceImageSource& gallery) {
  std::map<std::string, std::vector<Image>> galleries;
  return per_item("celebrity_id_score", items, [&](const EvaluationItem& item) {
    const std::string& name = *item.record.attributes.celebrity;
    auto it = galleries.find(name);
    if (it == galleries.end()) it = galleries.emplace(name, gallery.celebrity_gallery(name)).first;
    const auto& refs = it->second;
    if (refs.empty()) throw BackendError("empty celebrity gallery for '" + name + "'");
    std::vector<std::vector<std::optional<double>>> dist;
    for (std::size_t t = 0; t < item.video.size(); ++t) {
      auto& row = dist.emplace_back();
      for (const auto& ref : refs) {
        auto d = at_frame(t, [&] { return faces.face_distance(item.video.frames[t], ref); });
        if (d && (!std::isfinite(*d) || *d < 0)) throw BackendError("face distance must be finite and >= 0", t);
        row.push_back(d);
      }
    }
    return celebrity_video_distance(dist);
  });
}

PerVideo ocr_score_values(std::span<const EvaluationItem> items, OcrEngine& ocr) {
  return per_item("ocr_score", items, [&](const EvaluationItem& item) {
    std::vector<std::string> texts;
    for (std::size_t t = 0; t < item.video.size(); ++t)
      texts.push_back(at_frame(t, [&] { return ocr.recognize_text(item.video.frames[t]); }));
    return ocr_video_score(*item.record.attributes.render_text, texts);
  });
}

std::pair<PerVideo, PerVideo> vqa_values(std::span<const EvaluationItem> items, VqaScorer& scorer) {
  std::map<std::string, VqaScores> cache;
  auto get = [&](const EvaluationItem& item) -> const VqaScores& {
    auto it = cache.find(item.record.id);
    if (it == cache.end()) it = cache.emplace(item.record.id, scorer.vqa_scores(item.video)).first;
    return it->second;
  };
  PerVideo a = per_item("vqa_a", items, [&](const EvaluationItem& item) { return finite(get(item).aesthetic, "vqa"); });
  PerVideo t = per_item("vqa_t", items, [&](const EvaluationItem& item) { return finite(get(item).technical, "vqa"); });
  return {std::move(a), std::move(t)};
}

PerVideo action_score_values(std::span<const EvaluationItem> items, ActionClassifier& classifier) {
  return per_item("action_score", items, [&](const EvaluationItem& item) {
    const ActionPrediction p = classifier.classify_action(item.video);
    return p.label == *item.record.attributes.action_label ? 1.0 : 0.0;
  });
}

PerVideo flow_score_values(std::span<const EvaluationItem> items, FlowEstimator& flow) {
  return per_item("flow_score", items, [&](const EvaluationItem& item) {
    double sum = 0;
    for_each_pair_flow(item.video, flow, [&](std::size_t, const FlowField& f) { sum += mean_flow_magnitude(f); });
    return sum / static_cast<double>(item.video.size() - 1);
  });
}

PerVideo motion_ac_from_flow(std::span<const EvaluationItem> items, const std::map<std::string, double>& flow_scores,
                             double rho) {
  PerVideo out;
  for (const auto& item : items) {
    if (!applicable("motion_ac_score", item.record)) continue;
    auto it = flow_scores.find(item.record.id);
    if (it == flow_scores.end()) {
      out.errors.push_back({"motion_ac_score", item.record.id, "no flow score for this video", std::nullopt});
      continue;
    }
    const Amplitude predicted = is_large_motion(it->second, rho) ? Amplitude::large : Amplitude::small;
    out.values[item.record.id] = predicted == *item.record.attributes.amplitude ? 1.0 : 0.0;
  }
  return out;
}

PerVideo warping_error_values(std::span<const EvaluationItem> items, FlowEstimator& flow) {
  return per_item("warping_error", items, [&](const EvaluationItem& item) {
    double sum = 0;
    for_each_pair_flow(item.video, flow, [&](std::size_t t, const FlowField& f) {
      sum += warping_mse(item.video.frames[t], item.video.frames[t + 1], f);
    });
    return sum / static_cast<double>(item.video.size() - 1);
  });
}

PerVideo clip_temp_values(std::span<const EvaluationItem> items, ImageEncoder& embedder) {
  return per_item("clip_temp", items, [&](const EvaluationItem& item) {
    if (item.video.size() < 2) throw Error("clip_temp needs at least 2 frames");
    return consecutive_cosine(embed_frames(item.video, embedder));
  });
}

PerVideo face_consistency_values(std::span<const EvaluationItem> items, ImageEncoder& embedder) {
  return per_item("face_consistency", items, [&](const EvaluationItem& item) {
    if (item.video.size() < 2) throw Error("face_consistency needs at least 2 frames");
    return first_frame_cosine(embed_frames(item.video, embedder));
  });
}

std::map<std::string, std::vector<std::vector<double>>> class_prob_samples(std::span<const EvaluationItem> items,
                                                                            InceptionClassifier& classifier,
                                                                            std::vector<ItemError>& errors) {
  std::map<std::string, std::vector<std::vector<double>>> out;
  for (const auto& item : items) {
    try {
      std::vector<std::vector<double>> rows;
      for (std::size_t t = 0; t < item.video.size(); ++t) {
        auto p = at_frame(t, [&] { return classifier.class_probs(item.video.frames[t]); });
        at_frame(t, [&] { check_probability_vector(p); });
        rows.push_back(std::move(p));
      }
      out[item.record.id] = std::move(rows);
    } catch (const ConfigError&) {
      throw;
    } catch (const BackendError& e) {
      errors.push_back({"is", item.record.id, e.what(), e.frame_index()});
    }
  }
  return out;
}

MetricRun clip_score(const EvaluationSet& set, TextImageEmbedder& e) { return finish_run("clip_score", clip_score_values(set.items, e)); }
MetricRun sd_score(const EvaluationSet& set, ImageEncoder& e, ReferenceImageSource& r) {
  return finish_run("sd_score", sd_score_values(set.items, e, r));
}
MetricRun blip_bleu(const EvaluationSet& set, Captioner& c, int n) { return finish_run("blip_bleu", blip_bleu_values(set.items, c, n)); }
MetricRun detection_score(const EvaluationSet& set, DetectorTracker& d) {
  return finish_run("detection_score", detection_score_values(set.items, d));
}
MetricRun count_score(const EvaluationSet& set, DetectorTracker& d) { return finish_run("count_score", count_score_values(set.items, d)); }
MetricRun color_score(const EvaluationSet& set, DetectorTracker& d) { return finish_run("color_score", color_score_values(set.items, d)); }
MetricRun celebrity_id_score(const EvaluationSet& set, FaceAnalyzer& f, ReferenceImageSource& g) {
  return finish_run("celebrity_id_score", celebrity_id_values(set.items, f, g));
}
MetricRun ocr_score(const EvaluationSet& set, OcrEngine& o) { return finish_run("ocr_score", ocr_score_values(set.items, o)); }

std::pair<MetricRun, MetricRun> vqa_scores(const EvaluationSet& set, VqaScorer& scorer) {
  if (set.items.empty()) throw Error("vqa scores of an empty set");
  auto [a, t] = vqa_values(set.items, scorer);
  return {finish_run("vqa_a", std::move(a)), finish_run("vqa_t", std::move(t))};
}

MetricRun inception_score(const EvaluationSet& set, InceptionClassifier& classifier, int splits) {
  MetricRun run;
  const auto samples = class_prob_samples(set.items, classifier, run.errors);
  std::vector<std::vector<double>> all;
  for (const auto& item : set.items) {
    auto it = samples.find(item.record.id);
    if (it == samples.end()) continue;
    all.insert(all.end(), it->second.begin(), it->second.end());
  }
  if (all.empty()) throw Error("inception score needs at least one frame");
  run.result.metric_id = "is";
  run.result.direction = Direction::higher_better;
  run.result.aggregate = t2veval::inception_score(std::span<const std::vector<double>>(all), splits);
  run.result.applicable_count = samples.size();
  return run;
}

MetricRun action_score(const EvaluationSet& set, ActionClassifier& c) {
  return finish_run("action_score", action_score_values(set.items, c));
}
MetricRun flow_score(const EvaluationSet& set, FlowEstimator& f) { return finish_run("flow_score", flow_score_values(set.items, f)); }

MetricRun motion_ac_score(const EvaluationSet& set, FlowEstimator& flow, const MetricConfig& cfg) {
  cfg.validate();
  EvaluationSet annotated{set.model_id, {}};
  for (const auto& item : set.items)
    if (applicable("motion_ac_score", item.record)) annotated.items.push_back(item);
  PerVideo fs = flow_score_values(annotated.items, flow);
  PerVideo ac = motion_ac_from_flow(annotated.items, fs.values, cfg.flow_threshold);
  for (auto& e : fs.errors) e.metric_id = "motion_ac_score";
  ac.errors.erase(std::remove_if(ac.errors.begin(), ac.errors.end(),
                                 [&](const ItemError& e) {
                                   return std::any_of(fs.errors.begin(), fs.errors.end(),
                                                      [&](const ItemError& f) { return f.prompt_id == e.prompt_id; });
                                 }),
                  ac.errors.end());
  ac.errors.insert(ac.errors.begin(), fs.errors.begin(), fs.errors.end());
  return finish_run("motion_ac_score", std::move(ac));
}

MetricRun warping_error(const EvaluationSet& set, FlowEstimator& f) {
  return finish_run("warping_error", warping_error_values(set.items, f));
}
MetricRun clip_temp(const EvaluationSet& set, ImageEncoder& e) { return finish_run("clip_temp", clip_temp_values(set.items, e)); }
MetricRun face_consistency(const EvaluationSet& set, ImageEncoder& e) {
  return finish_run("face_consistency", face_consistency_values(set.items, e));
}

}  // namespace t2veval
