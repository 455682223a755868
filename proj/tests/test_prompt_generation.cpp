#include <gtest/gtest.h>

#include <fstream>

#include "support.hpp"
#include "t2veval/error.hpp"
#include "t2veval/prompt_generation.hpp"

using namespace t2veval;
using testing_support::TempDir;

namespace {

void put(const std::filesystem::path& p, const std::string& body) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p) << body;
}

}  // namespace

TEST(PromptGeneration, AcceptsConsistentCandidateAfterSelfCheck) {
  TempDir dir("llm");
  put(dir / "generate/animal_0.json",
      R"({"id":"g1","text":"two red birds on a fence","meta_class":"animal","sub_type":"general","attributes":{"objects":[{"name":"bird","count":2,"color":"red"}]}})");
  put(dir / "self_check/g1.json", R"({"consistent": true})");
  RecordedLlmClient client(dir.path());
  const auto out = generate_prompts(MetaClass::animal, 1, client);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(out[0].accepted);
  EXPECT_FALSE(out[0].manual_override.has_value());
}

TEST(PromptGeneration, SelfCheckVerdictDecides) {
  TempDir dir("llm");
  put(dir / "generate/object_0.json",
      "```json\n{\"id\":\"g2\",\"text\":\"a cup\",\"meta_class\":\"object\",\"sub_type\":\"general\",\"attributes\":{}}\n```");
  put(dir / "self_check/g2.json", R"({"consistent": false, "reason": "too vague"})");
  RecordedLlmClient client(dir.path());
  const auto out = generate_prompts(MetaClass::object, 1, client);
  EXPECT_FALSE(out[0].accepted);
  EXPECT_NE(out[0].reason.find("too vague"), std::string::npos);
}

TEST(PromptGeneration, LexicalMismatchRejectsEvenIfModelAgrees) {
  TempDir dir("llm");
  put(dir / "generate/animal_0.json",
      R"({"id":"g3","text":"a dog in the park","meta_class":"animal","sub_type":"general","attributes":{"objects":[{"name":"cat"}]}})");
  put(dir / "self_check/g3.json", R"({"consistent": true})");
  RecordedLlmClient client(dir.path());
  const auto out = generate_prompts(MetaClass::animal, 1, client);
  EXPECT_FALSE(out[0].accepted);
  EXPECT_NE(out[0].reason.find("cat"), std::string::npos);
}

TEST(PromptGeneration, MalformedOutputRejectedWithReason) {
  TempDir dir("llm");
  put(dir / "generate/human_0.json", "I cannot help with that");
  RecordedLlmClient client(dir.path());
  const auto out = generate_prompts(MetaClass::human, 1, client);
  EXPECT_FALSE(out[0].accepted);
  EXPECT_NE(out[0].reason.find("malformed"), std::string::npos);
}

TEST(PromptGeneration, TimeoutIsRetryableAndNothingReturned) {
  TempDir dir("llm");
  put(dir / "generate/landscape_0.json", "TIMEOUT\n");
  RecordedLlmClient client(dir.path());
  EXPECT_THROW(generate_prompts(MetaClass::landscape, 1, client), RetryableError);
}

TEST(PromptGeneration, MetadataTextMismatch) {
  PromptRecord r;
  r.id = "x";
  r.text = "Ada Lovelace holding a sign saying HELLO";
  r.attributes.celebrity = "Ada Lovelace";
  r.attributes.render_text = "HELLO";
  EXPECT_EQ(metadata_text_mismatch(r), "");
  r.attributes.render_text = "BYE";
  EXPECT_NE(metadata_text_mismatch(r), "");
}
