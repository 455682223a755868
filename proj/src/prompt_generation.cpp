#include "t2veval/prompt_generation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "t2veval/error.hpp"

namespace t2veval {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("no recorded response at " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Strips a Markdown code fence if the model wrapped its JSON in one.
std::string unfence(std::string s) {
  s = trim(std::move(s));
  if (s.rfind("```", 0) == 0) {
    const auto nl = s.find('\n');
    const auto end = s.rfind("```");
    if (nl != std::string::npos && end > nl) s = s.substr(nl + 1, end - nl - 1);
  }
  return trim(std::move(s));
}

bool contains_word(const std::string& haystack, const std::string& needle) {
  auto boundary = [&](std::size_t p) {
    return p >= haystack.size() || !std::isalnum(static_cast<unsigned char>(haystack[p]));
  };
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    const std::size_t end = pos + needle.size();
    bool right = boundary(end);
    // Allow simple plural suffixes ("dogs", "boxes").
    if (!right && haystack[end] == 's') right = boundary(end + 1);
    if (!right && haystack[end] == 'e' && end + 1 < haystack.size() && haystack[end + 1] == 's')
      right = boundary(end + 2);
    if ((pos == 0 || boundary(pos - 1)) && right) return true;
    pos = end;
  }
  return false;
}

}  // namespace

RecordedLlmClient::RecordedLlmClient(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) throw ConfigError("recorded-response directory not found: " + dir_.string());
}

std::string RecordedLlmClient::complete(const LlmRequest& request) {
  std::lock_guard lock(mutex_);
  std::filesystem::path file;
  if (request.task == LlmTask::generate)
    file = dir_ / "generate" / (std::string(to_string(request.meta_class)) + "_" + std::to_string(request.index) + ".json");
  else
    file = dir_ / "self_check" / (request.candidate_id + ".json");
  std::string body = read_file(file);
  if (trim(body) == "TIMEOUT") throw RetryableError("recorded timeout for " + file.filename().string());
  return body;
}

HttpLlmClient::HttpLlmClient(std::string endpoint, std::string api_key, std::string model,
                             std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), model_(std::move(model)), timeout_(timeout) {}

std::unique_ptr<HttpLlmClient> HttpLlmClient::from_environment() {
  const char* endpoint = std::getenv("T2VEVAL_LLM_ENDPOINT");
  const char* key = std::getenv("T2VEVAL_LLM_API_KEY");
  const char* model = std::getenv("T2VEVAL_LLM_MODEL");
  if (!endpoint || !*endpoint) throw ConfigError("T2VEVAL_LLM_ENDPOINT is not set");
  return std::make_unique<HttpLlmClient>(endpoint, key ? key : "", model ? model : "gpt-4");
}

std::string HttpLlmClient::complete(const LlmRequest& request) {
  std::lock_guard lock(mutex_);
  // endpoint = scheme://host[:port]/path
  const auto scheme_end = endpoint_.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("LLM endpoint must be an absolute URL: " + endpoint_);
  const auto path_begin = endpoint_.find('/', scheme_end + 3);
  const std::string base = endpoint_.substr(0, path_begin);
  const std::string path = path_begin == std::string::npos ? "/v1/chat/completions" : endpoint_.substr(path_begin);

  httplib::Client cli(base);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  const json body = {{"model", model_},
                     {"temperature", request.task == LlmTask::generate ? 1.0 : 0.0},
                     {"messages", json::array({{{"role", "user"}, {"content", request.message}}})}};
  auto res = cli.Post(path, headers, body.dump(), "application/json");
  if (!res) throw RetryableError("LLM request failed: " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500)
    throw RetryableError("LLM endpoint returned HTTP " + std::to_string(res->status));
  if (res->status != 200) throw Error("LLM endpoint returned HTTP " + std::to_string(res->status));
  try {
    return json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(std::string("unexpected LLM response shape: ") + e.what());
  }
}

std::string generation_message(MetaClass meta_class, int index) {
  std::ostringstream ss;
  ss << "Describe one short video scene whose main subject is a " << to_string(meta_class)
     << ". Randomly choose the subject's attributes (objects with counts and colors from: black, white, red, "
        "green, yellow, blue, brown, orange, pink, purple, gray; an optional Kinetics-400 action; an optional "
        "motion amplitude large|small). Reply with one JSON object with keys id, text, meta_class, sub_type, "
        "attributes, style_tag, camera_tag. Use id \""
     << to_string(meta_class) << "_gen_" << index << "\" and sub_type \"general\".";
  return ss.str();
}

std::string self_check_message(const PromptRecord& candidate) {
  return "Does this scene description agree with its metadata? Reply with JSON "
         "{\"consistent\": true|false, \"reason\": \"...\"}.\nDescription: " +
         candidate.text + "\nMetadata: " + to_json(candidate).at("attributes").dump();
}

std::string metadata_text_mismatch(const PromptRecord& c) {
  const std::string text = lower(c.text);
  for (const auto& o : c.attributes.objects) {
    if (!contains_word(text, lower(o.name))) return "description omits declared object '" + o.name + "'";
    if (o.color && !contains_word(text, lower(*o.color))) return "description omits declared color '" + *o.color + "'";
  }
  if (c.attributes.celebrity && text.find(lower(*c.attributes.celebrity)) == std::string::npos)
    return "description omits declared celebrity '" + *c.attributes.celebrity + "'";
  if (c.attributes.render_text && text.find(lower(*c.attributes.render_text)) == std::string::npos)
    return "description omits declared text '" + *c.attributes.render_text + "'";
  return {};
}

std::vector<GeneratedCandidate> generate_prompts(MetaClass meta_class, int n, LlmClient& client,
                                                 const Vocabulary& vocab) {
  if (n <= 0) throw ConfigError("n must be positive");
  std::vector<GeneratedCandidate> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    GeneratedCandidate gc;
    LlmRequest gen{LlmTask::generate, meta_class, i, {}, generation_message(meta_class, i)};
    gc.raw_response = client.complete(gen);

    try {
      gc.candidate = record_from_json(json::parse(unfence(gc.raw_response)));
      validate_record(gc.candidate, vocab);
    } catch (const json::parse_error& e) {
      gc.reason = std::string("malformed client output: ") + e.what();
      out.push_back(std::move(gc));
      continue;
    } catch (const ValidationError& e) {
      gc.reason = std::string("schema validation failed: ") + e.what();
      out.push_back(std::move(gc));
      continue;
    }
    if (gc.candidate.meta_class != meta_class) {
      gc.reason = "candidate meta_class does not match the request";
      out.push_back(std::move(gc));
      continue;
    }

    LlmRequest check{LlmTask::self_check, meta_class, i, gc.candidate.id, self_check_message(gc.candidate)};
    const std::string verdict_raw = client.complete(check);
    bool llm_ok = false;
    std::string llm_reason;
    try {
      const json verdict = json::parse(unfence(verdict_raw));
      llm_ok = verdict.at("consistent").get<bool>();
      llm_reason = verdict.value("reason", "");
    } catch (const json::exception& e) {
      gc.reason = std::string("malformed self-check output: ") + e.what();
      out.push_back(std::move(gc));
      continue;
    }
    const std::string lexical = metadata_text_mismatch(gc.candidate);
    gc.accepted = llm_ok && lexical.empty();
    if (!lexical.empty())
      gc.reason = lexical;
    else if (!llm_ok)
      gc.reason = llm_reason.empty() ? "self-check reported inconsistency" : "self-check: " + llm_reason;
    out.push_back(std::move(gc));
  }
  return out;
}

json to_json(const GeneratedCandidate& c) {
  json j = {{"accepted", c.accepted},
            {"reason", c.reason},
            {"manual_override", c.manual_override ? json(*c.manual_override) : json(nullptr)}};
  j["candidate"] = c.candidate.id.empty() ? json(nullptr) : to_json(c.candidate);
  if (c.candidate.id.empty()) j["raw_response"] = c.raw_response;
  return j;
}

}  // namespace t2veval
