#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "t2veval/benchmark.hpp"
#include "t2veval/image.hpp"

namespace t2veval {

/// Decoded frames of one generated video, in source order.
struct FrameSequence {
  std::vector<Image> frames;
  double fps = 0.0;
  std::filesystem::path source_path;
  std::string prompt_id;
  std::string model_id;

  std::size_t size() const { return frames.size(); }
  /// Throws MediaError unless N >= 1, all frames share one size, and fps > 0.
  void validate() const;
};

struct EvaluationItem {
  PromptRecord record;
  FrameSequence video;
};

struct EvaluationSet {
  std::string model_id;
  std::vector<EvaluationItem> items;

  /// Throws Error if prompt ids repeat or a sequence is paired with the wrong record.
  void validate() const;
};

/// Which decoded frames are kept.
class FrameSamplingPolicy {
 public:
  static FrameSamplingPolicy all() { return FrameSamplingPolicy(0); }
  static FrameSamplingPolicy uniform(int k);
  /// "all" or "uniform:K".
  static FrameSamplingPolicy parse(std::string_view text);

  bool keeps_all() const { return k_ == 0; }
  int k() const { return k_; }
  std::string to_string() const;
  /// Indices retained out of `n` decoded frames; evenly spaced, first and last included.
  std::vector<std::size_t> select(std::size_t n) const;

 private:
  explicit FrameSamplingPolicy(int k) : k_(k) {}
  int k_;
};

FrameSequence decode_video(const std::filesystem::path& path, const FrameSamplingPolicy& policy = FrameSamplingPolicy::all());

/// Writes a lossless (FFV1) video. Used for fixtures.
void write_video(const std::filesystem::path& path, const std::vector<Image>& frames, double fps);

struct IngestError {
  std::string prompt_id;
  std::filesystem::path path;
  std::string message;
};

struct IngestResult {
  EvaluationSet set;
  std::vector<std::string> missing;   // benchmark prompts with no video file
  std::vector<IngestError> errors;    // files that failed to decode
  std::vector<std::filesystem::path> unmatched_files;

  bool partial() const { return !missing.empty() || !errors.empty(); }
};

bool is_video_file(const std::filesystem::path& path);

/// Pairs `<prompt_id>.<ext>` files in `model_dir` with benchmark records.
/// The model id is the directory name. Empty or absent directory is fatal (MediaError).
IngestResult ingest(const std::filesystem::path& model_dir, const Benchmark& benchmark,
                    const FrameSamplingPolicy& sampling = FrameSamplingPolicy::all(), int workers = 1);

}  // namespace t2veval
