#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "t2veval/backend_factory.hpp"
#include "t2veval/metrics.hpp"

namespace t2veval {

struct VideoInfo {
  double fps = 0.0;
  std::size_t frames = 0;
  int width = 0;
  int height = 0;
  friend bool operator==(const VideoInfo&, const VideoInfo&) = default;
};

struct SuiteMetadata {
  std::string harness_version;
  std::string model_id;
  std::string benchmark_version;
  std::string sampling = "all";
  std::uint64_t seed = 0;
  MetricConfig config;
  std::map<std::string, std::string> backends;  // slot -> backend name
  std::map<std::string, VideoInfo> videos;      // prompt id -> decoded shape
};

struct SkipRecord {
  std::string metric_id;
  std::string reason;
};

struct SuiteResult {
  SuiteMetadata meta;
  std::map<std::string, MetricResult> metrics;
  std::vector<ItemError> errors;
  std::vector<SkipRecord> skipped;
  std::vector<std::string> missing;

  const MetricResult* find(std::string_view metric_id) const;
  /// Per-item errors or missing videos.
  bool partial() const { return !errors.empty() || !missing.empty(); }
};

struct SuiteOptions {
  MetricConfig config;
  /// Metrics to run; empty means the whole catalog.
  std::vector<std::string> metrics;
  /// Metrics whose backends must be bound; otherwise unbound metrics are skipped.
  std::vector<std::string> required_metrics;
  std::string sampling = "all";
  std::uint64_t seed = 0;
  std::string benchmark_version;
  int workers = 1;
};

/// Runs every selected metric whose backends are bound. Throws ConfigError before
/// touching any video when a required metric lacks a backend or options are invalid.
/// Shares `registry` across workers only when every bound backend is reentrant.
SuiteResult run_suite(const EvaluationSet& set, const BackendRegistry& registry, const SuiteOptions& options);
/// One registry per worker. Output does not depend on the worker count.
SuiteResult run_suite(const EvaluationSet& set, const RegistryFactory& factory, const SuiteOptions& options);

/// Folds ingest failures into the result: missing prompts and undecodable files.
void attach_ingest(SuiteResult& result, const IngestResult& ingest);

/// Line-delimited records with sorted keys: meta, then per metric its values and
/// aggregate, then errors, skips, and missing prompts.
void write_suite(std::ostream& out, const SuiteResult& result);
void save_suite(const std::filesystem::path& path, const SuiteResult& result);
/// Checks that each aggregate is the mean of its per-video values (when present).
SuiteResult parse_suite(std::istream& in, const std::string& source);
SuiteResult load_suite(const std::filesystem::path& path);
/// Every `*.jsonl` suite file in `dir`, keyed by model id.
std::map<std::string, SuiteResult> load_suite_dir(const std::filesystem::path& dir);

nlohmann::json to_json(const MetricConfig& c);
MetricConfig metric_config_from_json(const nlohmann::json& j);

}  // namespace t2veval
