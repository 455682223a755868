#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "t2veval/benchmark.hpp"

namespace t2veval {

enum class LlmTask { generate, self_check };

struct LlmRequest {
  LlmTask task = LlmTask::generate;
  MetaClass meta_class = MetaClass::object;
  int index = 0;            // candidate ordinal within one generation call
  std::string candidate_id; // set for self_check
  std::string message;      // full instruction text sent to a live model
};

/// Text-in/text-out language model client. Implementations serialize their own calls.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  /// Throws RetryableError on timeouts and transport failures.
  virtual std::string complete(const LlmRequest& request) = 0;
};

/// Replays responses stored on disk:
///   <dir>/generate/<meta_class>_<index>.json
///   <dir>/self_check/<candidate_id>.json
/// A file containing exactly "TIMEOUT" simulates a transport timeout.
class RecordedLlmClient : public LlmClient {
 public:
  explicit RecordedLlmClient(std::filesystem::path dir);
  std::string complete(const LlmRequest& request) override;

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
};

/// OpenAI-compatible chat-completions endpoint.
class HttpLlmClient : public LlmClient {
 public:
  HttpLlmClient(std::string endpoint, std::string api_key, std::string model,
                std::chrono::seconds timeout = std::chrono::seconds(60));
  /// Reads T2VEVAL_LLM_ENDPOINT, T2VEVAL_LLM_API_KEY and T2VEVAL_LLM_MODEL.
  static std::unique_ptr<HttpLlmClient> from_environment();
  std::string complete(const LlmRequest& request) override;

 private:
  std::string endpoint_;
  std::string api_key_;
  std::string model_;
  std::chrono::seconds timeout_;
  std::mutex mutex_;
};

struct GeneratedCandidate {
  PromptRecord candidate;
  bool accepted = false;
  std::string reason;
  /// Set by a human reviewer after the fact; never set by the generator.
  std::optional<bool> manual_override;
  std::string raw_response;
};

std::string generation_message(MetaClass meta_class, int index);
std::string self_check_message(const PromptRecord& candidate);

/// Lexical consistency of text and metadata: every declared object, color,
/// celebrity and render text must appear in the description. Empty string means
/// consistent, otherwise the first inconsistency found.
std::string metadata_text_mismatch(const PromptRecord& candidate);

/// Produces `n` candidates for `meta_class` and runs every schema-valid candidate
/// through the client's self-check. Transport failures propagate as RetryableError
/// before anything is returned.
std::vector<GeneratedCandidate> generate_prompts(MetaClass meta_class, int n, LlmClient& client,
                                                 const Vocabulary& vocab = Vocabulary::standard());

nlohmann::json to_json(const GeneratedCandidate& c);

}  // namespace t2veval
