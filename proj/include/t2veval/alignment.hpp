#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "t2veval/suite.hpp"

namespace t2veval {

enum class Aspect { visual_quality, tv_alignment, motion_quality, temporal_consistency, subjective_likeness };

inline constexpr std::array<Aspect, 5> kAllAspects = {Aspect::visual_quality, Aspect::tv_alignment,
                                                      Aspect::motion_quality, Aspect::temporal_consistency,
                                                      Aspect::subjective_likeness};
/// The four aspects mapped from objective metrics; subjective likeness is used directly.
inline constexpr std::array<Aspect, 4> kFittedAspects = {Aspect::visual_quality, Aspect::tv_alignment,
                                                         Aspect::motion_quality, Aspect::temporal_consistency};

std::string_view to_string(Aspect a);
std::optional<Aspect> parse_aspect(std::string_view s);

inline constexpr std::string_view kRatingsFormat = "t2veval.ratings";

struct HumanRating {
  std::string rater_id;
  std::string model_id;
  std::string prompt_id;
  std::map<Aspect, int> scores;
  friend bool operator==(const HumanRating&, const HumanRating&) = default;
};

/// Throws ValidationError unless all five aspects are present as integers 1..5.
void validate_rating(const HumanRating& r);
nlohmann::json to_json(const HumanRating& r);
HumanRating rating_from_json(const nlohmann::json& j);

/// Line-delimited ratings; an optional first line with "format" is the header.
std::vector<HumanRating> parse_ratings(std::istream& in, const std::string& source);
std::vector<HumanRating> load_ratings(const std::filesystem::path& path);
/// Header line (format, schema, study_id) then records sorted by (model, prompt, rater).
void write_ratings(std::ostream& out, std::vector<HumanRating> ratings, std::string_view study_id);

struct AspectLabel {
  std::string model_id;
  std::string prompt_id;
  Aspect aspect = Aspect::visual_quality;
  double value = 0.0;
};

/// Mean over raters, then (x - 1) / 4. Sorted by (model, prompt, aspect).
std::vector<AspectLabel> aggregate_ratings(const std::vector<HumanRating>& ratings);

/// Metric ids regressed for each fitted aspect.
using AspectMetrics = std::map<Aspect, std::vector<std::string>>;
const AspectMetrics& default_aspect_metrics();

using SampleKey = std::pair<std::string, std::string>;  // (model_id, prompt_id)

struct AspectModel {
  Aspect aspect = Aspect::visual_quality;
  std::vector<std::string> metric_ids;
  std::vector<double> coefficients;
  double intercept = 0.0;
  /// Per metric: the value was negated before fitting (lower_better metrics).
  std::vector<bool> negated;
  double train_rss = 0.0;

  double predict(std::span<const double> raw_metric_values) const;
};

struct FitMetadata {
  std::size_t train_size = 0;
  std::size_t holdout_size = 0;
  std::uint64_t seed = 0;
  std::string harmonization = "lower_better metrics negated before fitting";
  std::vector<SampleKey> train;
  std::vector<SampleKey> holdout;
};

inline constexpr std::string_view kAlignmentFormat = "t2veval.alignment";
inline constexpr std::string_view kAlignmentSchemaVersion = "1";

struct AlignmentModel {
  std::vector<AspectModel> aspects;
  FitMetadata fit_metadata;

  const AspectModel* find(Aspect a) const;
};

nlohmann::json to_json(const AlignmentModel& m);
AlignmentModel alignment_from_json(const nlohmann::json& j);
void save_alignment(const std::filesystem::path& path, const AlignmentModel& m);
AlignmentModel load_alignment(const std::filesystem::path& path);

struct FitOptions {
  std::size_t train = 300;
  std::size_t holdout = 200;
  std::uint64_t seed = 0;
  AspectMetrics aspect_metrics = default_aspect_metrics();
};

/// Seeded split of the labeled (model, prompt) samples, then OLS with intercept per
/// aspect on the train part. With fewer than train + holdout samples both parts
/// shrink proportionally. Samples missing any of an aspect's metrics are left out of
/// that aspect.
AlignmentModel fit_alignment(const std::vector<AspectLabel>& labels, const std::map<std::string, SuiteResult>& suites,
                             const FitOptions& options = {});

/// Deterministic split of `keys` (sorted first). Returns (train, holdout).
std::pair<std::vector<SampleKey>, std::vector<SampleKey>> split_samples(std::vector<SampleKey> keys, std::size_t train,
                                                                        std::size_t holdout, std::uint64_t seed);

struct FinalScore {
  std::string model_id;
  std::map<Aspect, std::optional<double>> aspects;  // fitted aspects; nullopt when a metric is missing
  std::optional<double> subjective_likeness;
  std::optional<double> comprehensive;
  /// False when the comprehensive score averages fewer than four aspects.
  bool complete = true;
};

/// Applies each aspect model to per-model metric aggregates. Subjective likeness is
/// the mean label of the model when `labels` carry it.
std::vector<FinalScore> apply_alignment(const AlignmentModel& model, const std::map<std::string, SuiteResult>& suites,
                                        const std::vector<AspectLabel>& labels = {});

inline constexpr std::string_view kFinalScoresFormat = "t2veval.final_scores";

nlohmann::json to_json(const std::vector<FinalScore>& scores);
std::vector<FinalScore> final_scores_from_json(const nlohmann::json& j);
void save_final_scores(const std::filesystem::path& path, const std::vector<FinalScore>& scores);
std::vector<FinalScore> load_final_scores(const std::filesystem::path& path);

struct CorrelationRow {
  std::string method;  // metric id, "avg" or "ours"
  std::optional<double> spearman;
  std::optional<double> kendall;
};

struct AspectCorrelation {
  Aspect aspect = Aspect::visual_quality;
  std::size_t samples = 0;
  std::vector<CorrelationRow> rows;
};

struct CorrelationReport {
  std::vector<AspectCorrelation> aspects;
};

/// Rank correlations on the holdout samples recorded in `model`: each single metric
/// (direction harmonized), the plain average of the aspect's metrics, and the fit.
CorrelationReport evaluate_alignment(const AlignmentModel& model, const std::vector<AspectLabel>& labels,
                                     const std::map<std::string, SuiteResult>& suites);

nlohmann::json to_json(const CorrelationReport& r);
std::string to_markdown(const CorrelationReport& r);

}  // namespace t2veval
