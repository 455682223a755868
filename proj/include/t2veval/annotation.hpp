#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "t2veval/alignment.hpp"
#include "t2veval/benchmark.hpp"
#include "t2veval/error.hpp"

namespace t2veval {

struct StudyItem {
  std::string model_id;
  std::string prompt_id;
  std::string prompt_text;
  std::filesystem::path video;
  std::vector<std::filesystem::path> references;
};

struct Study {
  std::string study_id;
  std::string salt;  // keeps task ids and media tokens unguessable
  std::string instructions;
  int target_ratings = 3;
  std::vector<std::string> raters;  // pre-registered
  std::vector<StudyItem> items;

  /// Relative media paths resolve against the study file's directory.
  static Study load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  static Study from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
};

/// One study item per (model directory, benchmark prompt) with a `<prompt_id>.<ext>`
/// video. References come from `<reference_root>/<prompt_id>/{1,2,3}.png` when present.
Study build_study(const std::string& study_id, const std::string& salt, const Benchmark& benchmark,
                  const std::vector<std::filesystem::path>& model_dirs, const std::filesystem::path& reference_root);

/// Task as shown to a rater. Carries no model identity.
struct RatingTask {
  std::string task_id;
  std::string prompt_text;
  std::string video_url;
  std::vector<std::string> reference_urls;
  std::string instructions;
};

nlohmann::json to_json(const RatingTask& t);

struct Ack {
  std::string task_id;
  std::string rater_id;
  std::uint64_t sequence = 0;
  friend bool operator==(const Ack&, const Ack&) = default;
};

nlohmann::json to_json(const Ack& a);

/// A rejected request; `status` follows HTTP conventions (400, 403, 404, 409).
class SubmitError : public Error {
 public:
  SubmitError(int status, std::string field, const std::string& message, std::optional<Ack> original = std::nullopt)
      : Error(message), status_(status), field_(std::move(field)), original_(std::move(original)) {}
  int status() const { return status_; }
  const std::string& field() const { return field_; }
  const std::optional<Ack>& original() const { return original_; }

 private:
  int status_;
  std::string field_;
  std::optional<Ack> original_;
};

struct StudyProgress {
  std::size_t items = 0;
  std::size_t raters = 0;
  std::size_t ratings = 0;
  std::size_t items_at_target = 0;
  std::size_t min_ratings_per_item = 0;
  std::size_t max_ratings_per_item = 0;
  int target_ratings = 3;
};

nlohmann::json to_json(const StudyProgress& p);

/// File-backed rating store. Every accepted rating is appended and fsynced before it
/// is acknowledged; on open the log is replayed and a torn final line is truncated.
class AnnotationStore {
 public:
  AnnotationStore(Study study, std::filesystem::path log_path);
  ~AnnotationStore();
  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  const Study& study() const { return study_; }
  /// Returns false when the rater already existed.
  bool register_rater(const std::string& rater_id);
  bool has_rater(const std::string& rater_id) const;
  /// Unrated item with the fewest ratings; nullopt when the rater has rated everything.
  /// Throws SubmitError(403) for an unregistered rater.
  std::optional<RatingTask> next_task(const std::string& rater_id) const;
  /// Validates and persists. Throws SubmitError with the offending field.
  Ack submit(const std::string& rater_id, const std::string& task_id, const nlohmann::json& scores);
  Ack submit(const nlohmann::json& body);

  std::vector<HumanRating> ratings() const;
  void export_ratings(std::ostream& out) const;
  StudyProgress progress() const;

  /// File behind a media URL path component pair, or nullopt.
  std::optional<std::filesystem::path> resolve_media(const std::string& token, const std::string& name) const;
  std::string task_id_of(std::size_t item) const;

 private:
  struct Entry {
    std::size_t item;
    HumanRating rating;
    Ack ack;
  };

  void replay();
  void append(const nlohmann::json& record);
  std::string media_token(std::size_t item) const;
  RatingTask make_task(std::size_t item) const;

  Study study_;
  std::filesystem::path log_path_;
  int fd_ = -1;
  mutable std::shared_mutex mutex_;
  std::set<std::string> raters_;
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> task_index_;   // task id -> item
  std::map<std::string, std::size_t> media_index_;  // media token -> item
  std::vector<std::size_t> counts_;                 // ratings per item
  std::map<std::pair<std::string, std::size_t>, std::size_t> done_;  // (rater, item) -> entry
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
};

/// HTTP front end:
///   POST /api/raters                   {"rater_id"}
///   GET  /api/raters/{id}/next-task    200 task, 204 when done, 403 unknown rater
///   POST /api/ratings                  {"rater_id","task_id","scores"}
///   GET  /api/studies/{id}/progress
///   GET  /api/studies/{id}/export
///   GET  /media/{token}/{name}
class AnnotationServer {
 public:
  AnnotationServer(AnnotationStore& store, ServerOptions options);
  ~AnnotationServer();
  /// Binds and serves on a background thread; returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace t2veval
