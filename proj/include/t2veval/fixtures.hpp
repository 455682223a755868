#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "t2veval/benchmark.hpp"
#include "t2veval/image.hpp"
#include "t2veval/mock_backends.hpp"

namespace t2veval {

/// Small synthetic study used by tests, the acceptance suite, and demos: 12 prompts,
/// 3 per meta-class, every sub-type and every attribute kind represented.
Benchmark fixture_benchmark();

struct FixtureOptions {
  /// Fidelity falls with position: the first model follows the prompt exactly, later
  /// ones miss counts, colors, text and motion amplitude progressively.
  std::vector<std::string> models = {"alpha", "beta", "gamma"};
  int width = 64;
  int height = 48;
  int frames = 8;
  double fps = 8.0;
};

struct RenderedVideo {
  std::vector<Image> frames;
  std::vector<SceneAnnotation> annotations;  // what the mock backends report per frame
};

/// `quality` is the model's position in FixtureOptions::models.
RenderedVideo render_fixture_video(const PromptRecord& record, std::size_t quality, const std::string& model_id,
                                   const FixtureOptions& options = {});

/// Five reference images for a prompt; the scene table tags the first with the full
/// prompt and the rest with growing prefixes of it.
std::vector<Image> fixture_references(const PromptRecord& record, const FixtureOptions& options = {});
std::vector<Image> fixture_gallery(const std::string& celebrity, const FixtureOptions& options = {});

/// Writes benchmark.jsonl, videos/<model>/<id>.avi, refs/, scenes.json, config.json
/// (all slots bound to mocks), ratings.jsonl (3 synthetic raters) and study.json.
void write_fixture(const std::filesystem::path& root, const FixtureOptions& options = {});

}  // namespace t2veval
