#include <spdlog/spdlog.h>

#include <fstream>
#include <sstream>

#include "httplib.h"
#include "t2veval/annotation.hpp"

namespace t2veval {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const SubmitError& e) {
  json body = {{"error", e.what()}, {"field", e.field()}};
  if (e.original()) body["ack"] = to_json(*e.original());
  send_json(res, e.status(), body);
}

std::string content_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".mp4" || ext == ".m4v") return "video/mp4";
  if (ext == ".webm") return "video/webm";
  if (ext == ".mkv") return "video/x-matroska";
  if (ext == ".avi") return "video/x-msvideo";
  if (ext == ".mov") return "video/quicktime";
  if (ext == ".gif") return "image/gif";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  return "application/octet-stream";
}

}  // namespace

struct AnnotationServer::Impl {
  AnnotationStore& store;
  ServerOptions options;
  httplib::Server server;
  std::thread thread;

  Impl(AnnotationStore& s, ServerOptions o) : store(s), options(std::move(o)) { routes(); }

  void routes() {
    server.Post("/api/raters", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const json body = json::parse(req.body);
        if (!body.is_object() || !body.contains("rater_id") || !body["rater_id"].is_string())
          throw SubmitError(400, "rater_id", "rater_id must be a string");
        const std::string id = body["rater_id"].get<std::string>();
        const bool created = store.register_rater(id);
        send_json(res, created ? 201 : 200, {{"rater_id", id}, {"created", created}});
      } catch (const json::parse_error&) {
        send_json(res, 400, {{"error", "request body is not JSON"}, {"field", "body"}});
      } catch (const SubmitError& e) {
        send_error(res, e);
      }
    });

    server.Get(R"(/api/raters/([^/]+)/next-task)", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const auto task = store.next_task(req.matches[1]);
        if (!task) {
          res.status = 204;
          return;
        }
        send_json(res, 200, to_json(*task));
      } catch (const SubmitError& e) {
        send_error(res, e);
      }
    });

    server.Post("/api/ratings", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const Ack ack = store.submit(json::parse(req.body));
        send_json(res, 201, to_json(ack));
      } catch (const json::parse_error&) {
        send_json(res, 400, {{"error", "request body is not JSON"}, {"field", "body"}});
      } catch (const SubmitError& e) {
        send_error(res, e);
      }
    });

    server.Get(R"(/api/studies/([^/]+)/progress)", [this](const httplib::Request& req, httplib::Response& res) {
      if (req.matches[1] != store.study().study_id) return send_json(res, 404, {{"error", "unknown study"}, {"field", "study_id"}});
      send_json(res, 200, to_json(store.progress()));
    });

    server.Get(R"(/api/studies/([^/]+)/export)", [this](const httplib::Request& req, httplib::Response& res) {
      if (req.matches[1] != store.study().study_id) return send_json(res, 404, {{"error", "unknown study"}, {"field", "study_id"}});
      std::ostringstream out;
      store.export_ratings(out);
      res.status = 200;
      res.set_content(out.str(), "application/x-ndjson");
    });

    server.Get(R"(/media/([0-9a-f]+)/([A-Za-z0-9._-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto path = store.resolve_media(req.matches[1], req.matches[2]);
      if (!path) return send_json(res, 404, {{"error", "not found"}});
      std::ifstream in(*path, std::ios::binary);
      if (!in) return send_json(res, 404, {{"error", "media file unavailable"}});
      std::stringstream buf;
      buf << in.rdbuf();
      res.status = 200;
      res.set_content(buf.str(), content_type(*path));
    });

    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string msg = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        msg = e.what();
      } catch (...) {
      }
      spdlog::error("request failed: {}", msg);
      send_json(res, 500, {{"error", msg}});
    });

    if (options.static_dir && !server.set_mount_point("/", options.static_dir->string()))
      throw ConfigError("static directory not found: " + options.static_dir->string());
  }

  int bind() {
    if (options.port == 0) {
      const int port = server.bind_to_any_port(options.host);
      if (port < 0) throw Error("cannot bind " + options.host);
      return port;
    }
    if (!server.bind_to_port(options.host, options.port))
      throw Error("cannot bind " + options.host + ":" + std::to_string(options.port));
    return options.port;
  }
};

AnnotationServer::AnnotationServer(AnnotationStore& store, ServerOptions options)
    : impl_(std::make_unique<Impl>(store, std::move(options))) {}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::start() {
  const int port = impl_->bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void AnnotationServer::run() {
  const int port = impl_->bind();
  spdlog::info("annotation service for study '{}' listening on {}:{}", impl_->store.study().study_id, impl_->options.host, port);
  impl_->server.listen_after_bind();
}

void AnnotationServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace t2veval
