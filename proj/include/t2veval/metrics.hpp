#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "t2veval/backends.hpp"
#include "t2veval/media.hpp"

namespace t2veval {

enum class Direction { higher_better, lower_better, target_match };

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view s);

enum class MetricGroup { video_quality, text_video_alignment, motion_quality, temporal_consistency };

std::string_view to_string(MetricGroup g);

struct MetricInfo {
  std::string_view id;
  std::string_view display_name;
  Direction direction;
  MetricGroup group;
  /// Each inner list is satisfied by any one of its slots; all lists must be satisfied.
  std::vector<std::vector<Slot>> requirements;
  /// Rates and similarities in [0, 1] that render as percentages on paper scale.
  bool percentage;
  /// Only prompts carrying a particular attribute contribute.
  bool attribute_gated;
};

/// All 17 metrics in leaderboard order.
const std::vector<MetricInfo>& metric_catalog();
/// Throws Error for an unknown id.
const MetricInfo& metric_info(std::string_view id);
/// Empty when satisfied, otherwise a description of the missing slots.
std::string missing_requirements(const MetricInfo& info, const BackendRegistry& registry);
/// Whether `record` is in the metric's applicable population (M, M1..M4).
bool applicable(std::string_view metric_id, const PromptRecord& record);

struct MetricResult {
  std::string metric_id;
  std::map<std::string, double> per_video;
  double aggregate = 0.0;
  Direction direction = Direction::higher_better;
  std::size_t applicable_count = 0;
};

struct ItemError {
  std::string metric_id;
  std::string prompt_id;
  std::string message;
  std::optional<std::size_t> frame_index;
};

struct MetricConfig {
  double flow_threshold = 2.0;  // rho
  bool paper_scale = false;     // render percentages x100; stored values stay raw
  int is_splits = 1;
  int caption_count = 5;

  /// Throws ConfigError when rho <= 0 or counts are non-positive.
  void validate() const;
};

/// Per-video values plus per-item failures of one metric over one set.
struct PerVideo {
  std::map<std::string, double> values;
  std::vector<ItemError> errors;
};

/// Mean of `values`; throws Error when empty.
MetricResult finish_metric(std::string_view metric_id, std::map<std::string, double> values);

struct MetricRun {
  MetricResult result;
  std::vector<ItemError> errors;
};

// ---- per-video kernels ----------------------------------------------------

/// Mean over frames of cos(frame, target).
double mean_cosine_to(std::span<const Embedding> frames, const Embedding& target);
/// Mean over frames of mean over references of cos(frame, reference).
double mean_cosine_to_references(std::span<const Embedding> frames, std::span<const Embedding> references);
/// Mean over captions of BLEU(prompt, caption).
double mean_caption_bleu(std::string_view prompt, std::span<const std::string> captions);
/// Mean over frames; each frame value is the mean of its per-object entries.
double mean_frame_rate(const std::vector<std::vector<double>>& per_frame);
/// |detected - expected| / expected, clamped to [0, 1].
double count_frame_term(int detected, int expected);
/// 1 - mean over frames of the (per-object averaged) count term.
double count_video_score(const std::vector<std::vector<double>>& per_frame_terms);
/// distances[t][k] = D(frame t, gallery k) or nullopt when no face. Per frame the
/// minimum over the gallery; faceless frames skipped; all faceless gives 1.0.
double celebrity_video_distance(const std::vector<std::vector<std::optional<double>>>& distances);
/// Mean over frames of the combined OCR components.
double ocr_video_score(std::string_view truth, std::span<const std::string> recognized);
/// Mean over t of cos(frame t, frame t+1). Needs >= 2 frames.
double consecutive_cosine(std::span<const Embedding> frames);
/// Mean over t >= 2 of cos(frame t, frame 1). Needs >= 2 frames.
double first_frame_cosine(std::span<const Embedding> frames);
/// Strictly greater than rho is large motion.
bool is_large_motion(double flow_score, double rho);

// ---- set-level metrics -----------------------------------------------------

PerVideo clip_score_values(std::span<const EvaluationItem> items, TextImageEmbedder& embedder);
PerVideo sd_score_values(std::span<const EvaluationItem> items, ImageEncoder& embedder, ReferenceImageSource& refs);
PerVideo blip_bleu_values(std::span<const EvaluationItem> items, Captioner& captioner, int captions = 5);
PerVideo detection_score_values(std::span<const EvaluationItem> items, DetectorTracker& detector);
PerVideo count_score_values(std::span<const EvaluationItem> items, DetectorTracker& detector);
PerVideo color_score_values(std::span<const EvaluationItem> items, DetectorTracker& detector);
PerVideo celebrity_id_values(std::span<const EvaluationItem> items, FaceAnalyzer& faces, ReferenceImageSource& gallery);
PerVideo ocr_score_values(std::span<const EvaluationItem> items, OcrEngine& ocr);
std::pair<PerVideo, PerVideo> vqa_values(std::span<const EvaluationItem> items, VqaScorer& scorer);
PerVideo action_score_values(std::span<const EvaluationItem> items, ActionClassifier& classifier);
PerVideo flow_score_values(std::span<const EvaluationItem> items, FlowEstimator& flow);
/// Derives Motion AC per video (1 when the large/small class matches the annotation)
/// from already computed flow scores.
PerVideo motion_ac_from_flow(std::span<const EvaluationItem> items, const std::map<std::string, double>& flow_scores,
                             double rho);
PerVideo warping_error_values(std::span<const EvaluationItem> items, FlowEstimator& flow);
PerVideo clip_temp_values(std::span<const EvaluationItem> items, ImageEncoder& embedder);
PerVideo face_consistency_values(std::span<const EvaluationItem> items, ImageEncoder& embedder);
/// Class-probability vectors for every frame, keyed by prompt id.
std::map<std::string, std::vector<std::vector<double>>> class_prob_samples(std::span<const EvaluationItem> items,
                                                                            InceptionClassifier& classifier,
                                                                            std::vector<ItemError>& errors);

MetricRun clip_score(const EvaluationSet& set, TextImageEmbedder& embedder);
MetricRun sd_score(const EvaluationSet& set, ImageEncoder& embedder, ReferenceImageSource& refs);
MetricRun blip_bleu(const EvaluationSet& set, Captioner& captioner, int captions = 5);
MetricRun detection_score(const EvaluationSet& set, DetectorTracker& detector);
MetricRun count_score(const EvaluationSet& set, DetectorTracker& detector);
MetricRun color_score(const EvaluationSet& set, DetectorTracker& detector);
MetricRun celebrity_id_score(const EvaluationSet& set, FaceAnalyzer& faces, ReferenceImageSource& gallery);
MetricRun ocr_score(const EvaluationSet& set, OcrEngine& ocr);
/// (VQA_A, VQA_T). Throws Error on an empty set.
std::pair<MetricRun, MetricRun> vqa_scores(const EvaluationSet& set, VqaScorer& scorer);
/// Single per-model value over all frames of all videos; per_video stays empty.
MetricRun inception_score(const EvaluationSet& set, InceptionClassifier& classifier, int splits = 1);
MetricRun action_score(const EvaluationSet& set, ActionClassifier& classifier);
MetricRun flow_score(const EvaluationSet& set, FlowEstimator& flow);
MetricRun motion_ac_score(const EvaluationSet& set, FlowEstimator& flow, const MetricConfig& cfg);
MetricRun warping_error(const EvaluationSet& set, FlowEstimator& flow);
MetricRun clip_temp(const EvaluationSet& set, ImageEncoder& embedder);
MetricRun face_consistency(const EvaluationSet& set, ImageEncoder& embedder);

}  // namespace t2veval
