#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "httplib.h"
#include "support.hpp"
#include "t2veval/annotation.hpp"

using namespace t2veval;
using nlohmann::json;
using testing_support::TempDir;

namespace {

Study two_item_study(const TempDir& dir) {
  Study s;
  s.study_id = "s1";
  s.salt = "pepper";
  s.instructions = "rate each aspect";
  s.target_ratings = 3;
  for (const std::string model : {"m1", "m2"}) {
    const auto video = dir / (model + "_p1.avi");
    std::ofstream(video) << "video bytes of " << model;
    s.items.push_back({model, "p1", "a red cup on a table", video, {}});
  }
  return s;
}

json scores(int v) {
  json j;
  for (Aspect a : kAllAspects) j[std::string(to_string(a))] = v;
  return j;
}

int status_of(const std::function<void()>& f, std::string* field = nullptr) {
  try {
    f();
  } catch (const SubmitError& e) {
    if (field) *field = e.field();
    return e.status();
  }
  return 0;
}

}  // namespace

TEST(Store, NextTaskPrefersLeastRatedItem) {
  TempDir dir("ann");
  AnnotationStore store(two_item_study(dir), dir / "log.jsonl");
  store.register_rater("r1");
  store.register_rater("r2");
  const auto t1 = store.next_task("r1");
  ASSERT_TRUE(t1);
  store.submit("r1", t1->task_id, scores(4));
  const auto t2 = store.next_task("r2");
  ASSERT_TRUE(t2);
  EXPECT_NE(t2->task_id, t1->task_id);
  store.submit("r1", store.next_task("r1")->task_id, scores(3));
  EXPECT_FALSE(store.next_task("r1").has_value());
}

TEST(Store, RejectionsCarryStatusAndField) {
  TempDir dir("ann");
  AnnotationStore store(two_item_study(dir), dir / "log.jsonl");
  std::string field;
  EXPECT_EQ(status_of([&] { store.next_task("ghost"); }), 403);
  store.register_rater("r1");
  const std::string task = store.next_task("r1")->task_id;
  EXPECT_EQ(status_of([&] { store.submit("r1", "nope", scores(3)); }, &field), 404);
  EXPECT_EQ(field, "task_id");
  json bad = scores(3);
  bad["motion_quality"] = 6;
  EXPECT_EQ(status_of([&] { store.submit("r1", task, bad); }, &field), 400);
  EXPECT_EQ(field, "motion_quality");
  bad = scores(3);
  bad.erase("visual_quality");
  EXPECT_EQ(status_of([&] { store.submit("r1", task, bad); }, &field), 400);
  EXPECT_EQ(field, "visual_quality");
  EXPECT_EQ(status_of([&] { store.submit(json{{"rater_id", "r1"}, {"task_id", task}, {"scores", scores(3)}, {"x", 1}}); }, &field), 400);
  EXPECT_EQ(field, "x");

  const Ack first = store.submit("r1", task, scores(3));
  try {
    store.submit("r1", task, scores(2));
    FAIL();
  } catch (const SubmitError& e) {
    EXPECT_EQ(e.status(), 409);
    ASSERT_TRUE(e.original());
    EXPECT_EQ(*e.original(), first);
  }
  EXPECT_EQ(store.ratings().size(), 1u);
}

TEST(Store, TasksDoNotRevealModel) {
  TempDir dir("ann");
  AnnotationStore store(two_item_study(dir), dir / "log.jsonl");
  store.register_rater("r1");
  const std::string payload = to_json(*store.next_task("r1")).dump();
  EXPECT_EQ(payload.find("m1"), std::string::npos);
  EXPECT_EQ(payload.find("m2"), std::string::npos);
  EXPECT_EQ(payload.find("model"), std::string::npos);
}

TEST(Store, ReplaysLogAndTruncatesTornTail) {
  TempDir dir("ann");
  const auto log = dir / "log.jsonl";
  std::string task;
  {
    AnnotationStore store(two_item_study(dir), log);
    store.register_rater("r1");
    task = store.next_task("r1")->task_id;
    store.submit("r1", task, scores(5));
  }
  const auto intact = std::filesystem::file_size(log);
  std::ofstream(log, std::ios::app) << R"({"type":"rating","rater_id":"r1",)";
  AnnotationStore again(two_item_study(dir), log);
  EXPECT_EQ(std::filesystem::file_size(log), intact);
  ASSERT_EQ(again.ratings().size(), 1u);
  EXPECT_EQ(again.ratings()[0].scores.at(Aspect::tv_alignment), 5);
  EXPECT_TRUE(again.has_rater("r1"));
  EXPECT_EQ(status_of([&] { again.submit("r1", task, scores(1)); }), 409);
}

TEST(Store, CorruptMiddleRecordIsError) {
  TempDir dir("ann");
  const auto log = dir / "log.jsonl";
  {
    AnnotationStore store(two_item_study(dir), log);
    store.register_rater("r1");
  }
  std::string text;
  {
    std::ifstream in(log);
    std::getline(in, text);
  }
  std::ofstream(log) << "{garbage\n" << text << "\n";
  EXPECT_THROW(AnnotationStore(two_item_study(dir), log), ParseError);
}

TEST(Server, FullStudyOverHttp) {
  TempDir dir("http");
  AnnotationStore store(two_item_study(dir), dir / "log.jsonl");
  AnnotationServer server(store, ServerOptions{"127.0.0.1", 0, std::nullopt});
  const int port = server.start();
  httplib::Client cli("127.0.0.1", port);

  std::set<std::string> task_ids;
  for (const std::string r : {"r1", "r2", "r3"}) {
    auto reg = cli.Post("/api/raters", json{{"rater_id", r}}.dump(), "application/json");
    ASSERT_TRUE(reg);
    EXPECT_EQ(reg->status, 201);
    for (int k = 0; k < 2; ++k) {
      auto next = cli.Get("/api/raters/" + r + "/next-task");
      ASSERT_TRUE(next);
      ASSERT_EQ(next->status, 200);
      EXPECT_EQ(next->body.find("m1"), std::string::npos);
      const json task = json::parse(next->body);
      task_ids.insert(task.at("task_id").get<std::string>());
      if (k == 0) {
        auto media = cli.Get(task.at("video_url").get<std::string>());
        ASSERT_TRUE(media);
        EXPECT_EQ(media->status, 200);
        EXPECT_EQ(media->body.rfind("video bytes of", 0), 0u);
        EXPECT_EQ(media->get_header_value("Content-Type"), "video/x-msvideo");
      }
      const json body = {{"rater_id", r}, {"task_id", task["task_id"]}, {"scores", scores(2 + k)}};
      auto post = cli.Post("/api/ratings", body.dump(), "application/json");
      ASSERT_TRUE(post);
      EXPECT_EQ(post->status, 201);
      if (k == 0) {
        auto dup = cli.Post("/api/ratings", body.dump(), "application/json");
        EXPECT_EQ(dup->status, 409);
        EXPECT_TRUE(json::parse(dup->body).contains("ack"));
      }
    }
    auto done = cli.Get("/api/raters/" + r + "/next-task");
    EXPECT_EQ(done->status, 204);
  }
  EXPECT_EQ(task_ids.size(), 2u);

  cli.Post("/api/raters", json{{"rater_id", "r4"}}.dump(), "application/json");
  auto bad = cli.Post("/api/ratings",
                      json{{"rater_id", "r4"}, {"task_id", *task_ids.begin()}, {"scores", scores(6)}}.dump(),
                      "application/json");
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(cli.Get("/api/raters/nobody/next-task")->status, 403);
  EXPECT_EQ(cli.Post("/api/ratings", "not json", "application/json")->status, 400);
  EXPECT_EQ(cli.Get("/media/00ff/none.avi")->status, 404);

  const json progress = json::parse(cli.Get("/api/studies/s1/progress")->body);
  EXPECT_EQ(progress.at("ratings"), 6);
  EXPECT_EQ(progress.at("items_at_target"), 2);
  EXPECT_EQ(cli.Get("/api/studies/other/progress")->status, 404);

  auto exported = cli.Get("/api/studies/s1/export");
  ASSERT_TRUE(exported);
  std::istringstream in(exported->body);
  const auto ratings = parse_ratings(in, "export");
  ASSERT_EQ(ratings.size(), 6u);
  std::set<std::string> models;
  for (const auto& r : ratings) models.insert(r.model_id);
  EXPECT_EQ(models, (std::set<std::string>{"m1", "m2"}));
  server.stop();
}
