/* Copyright 2026 The AutoLibra Engine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "autolibra/app/annotation_server.hpp"

#include <httplib.h>

#include <cctype>
#include <chrono>
#include <map>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "autolibra/core/errors.hpp"
#include "autolibra/core/json_io.hpp"
#include "autolibra/core/util.hpp"

namespace autolibra {
namespace {

constexpr const char* kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>annotation"
    "</title></head><body><p>The annotation UI is not bundled with this "
    "server. Point [server] static_dir at the built UI, or use the JSON API "
    "under /api/.</p></body></html>";

std::string normalize_for_match(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      if (space && !out.empty()) out += ' ';
      out += static_cast<char>(std::tolower(u));
      space = false;
    } else if (c != '\'') {
      space = true;
    }
  }
  return out;
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

}  // namespace

const std::string& annotation_guidance() {
  static const std::string text =
      "Read the task, then step through the agent's observations and actions. "
      "Write what the agent did well and what it did badly, and say where it "
      "happened (for example \"at step 4 it searched for the wrong city\"). "
      "Each point should be about one concrete behavior. Avoid comments about "
      "the run as a whole, such as \"The agent is good at solving the task\": "
      "they cannot be traced to any behavior and will not help.";
  return text;
}

bool is_generic_feedback(std::string_view text) {
  static const std::set<std::string> templates = {
      "the agent is good at solving the task",
      "the agent is bad at solving the task",
      "the agent is good at the task",
      "the agent is bad at the task",
      "the agent solved the task",
      "the agent failed the task",
      "the agent did a good job",
      "the agent did a bad job",
      "the agent did well",
      "the agent did badly",
      "the agent is good",
      "the agent is bad",
      "good job",
      "bad job",
      "well done",
      "good",
      "bad",
  };
  std::string n = normalize_for_match(text);
  for (const char* prefix : {"overall ", "in general ", "generally "}) {
    if (n.rfind(prefix, 0) == 0) n = n.substr(std::string_view(prefix).size());
  }
  return templates.count(n) > 0;
}

struct AnnotationServer::Impl {
  Workspace& ws;
  ServerConfig config;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  Impl(Workspace& w, ServerConfig c) : ws(w), config(std::move(c)) { routes(); }

  void routes() {
    // httplib defaults to SO_REUSEPORT, which lets a second server share a
    // busy port silently.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes),
                 sizeof(yes));
    });
    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          std::string msg = "internal error";
          try {
            if (ep) std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            msg = e.what();
          } catch (...) {
          }
          send_error(res, 500, msg);
        });

    server.Get("/api/trajectories", [this](const httplib::Request& req,
                                           httplib::Response& res) {
      std::string which = req.has_param("split") ? req.get_param_value("split") : "all";
      std::map<std::string, std::string> split_tag;
      if (ws.has_split()) {
        SplitAssignment s = ws.split();
        for (const auto& id : s.train) split_tag[id] = "train";
        for (const auto& id : s.holdout) split_tag[id] = "holdout";
      }
      if (which != "all" && which != "train" && which != "holdout") {
        return send_error(res, 400, "split must be train, holdout or all");
      }
      if (which != "all" && !ws.has_split()) {
        return send_error(res, 409, "the workspace has not been split yet");
      }
      std::set<std::string> annotated;
      for (const auto& f : ws.feedback()) annotated.insert(f.trajectory_id);
      Json out = Json::array();
      for (const auto& t : ws.trajectories()) {
        auto tag = split_tag.find(t.id);
        if (which != "all" && (tag == split_tag.end() || tag->second != which)) continue;
        out.push_back({{"id", t.id},
                       {"task", t.task},
                       {"step_count", t.steps.size()},
                       {"annotated", annotated.count(t.id) > 0},
                       {"split", tag == split_tag.end() ? Json(nullptr) : Json(tag->second)}});
      }
      send_json(res, 200, out);
    });

    server.Get(R"(/api/trajectories/([^/]+))", [this](const httplib::Request& req,
                                                       httplib::Response& res) {
      auto t = ws.find_trajectory(req.matches[1]);
      if (!t) return send_error(res, 404, "unknown trajectory");
      send_json(res, 200, Json(*t));
    });

    server.Post("/api/feedback", [this](const httplib::Request& req,
                                        httplib::Response& res) {
      Json body = Json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) {
        return send_error(res, 400, "body must be a JSON object");
      }
      const std::string traj = body.value("trajectory_id", "");
      const std::string annotator = body.value("annotator", "");
      const std::string text = body.value("text", "");
      if (!ws.find_trajectory(traj)) return send_error(res, 404, "unknown trajectory");
      if (normalize_whitespace(text).empty()) {
        return send_json(res, 422, {{"error", "feedback text is empty"},
                                    {"guidance", annotation_guidance()}});
      }
      if (normalize_whitespace(annotator).empty()) {
        return send_json(res, 422, {{"error", "annotator is required"}});
      }
      if (config.strict_guidance && is_generic_feedback(text)) {
        return send_json(res, 422,
                         {{"error", "feedback is too general: describe specific "
                                    "behaviors and where they happened"},
                          {"guidance", annotation_guidance()}});
      }
      try {
        FeedbackWrite w = ws.put_feedback(traj, annotator, text, iso8601_now());
        send_json(res, 201, {{"feedback", w.feedback}, {"replaced", w.replaced}});
      } catch (const NotFoundError& e) {
        send_error(res, 404, e.what());
      } catch (const ValidationError& e) {
        send_json(res, 422, {{"error", e.what()}, {"guidance", annotation_guidance()}});
      }
    });

    server.Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) {
      std::set<std::string> ids;
      const auto trajs = ws.trajectories();
      for (const auto& t : trajs) ids.insert(t.id);
      std::set<std::string> annotated;
      for (const auto& f : ws.feedback()) {
        if (ids.count(f.trajectory_id)) annotated.insert(f.trajectory_id);
      }
      send_json(res, 200, {{"annotated", annotated.size()}, {"total", trajs.size()}});
    });

    server.Get("/api/guidance", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"guidance", annotation_guidance()},
                           {"strict", config.strict_guidance}});
    });

    bool mounted = false;
    if (!config.static_dir.empty()) {
      mounted = server.set_mount_point("/", config.static_dir);
      if (!mounted) spdlog::warn("static_dir {} not found", config.static_dir);
    }
    if (!mounted) {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(kPlaceholderPage, "text/html");
      });
    }
  }

  void bind() {
    if (config.port == 0) {
      port = server.bind_to_any_port(config.host);
    } else {
      port = server.bind_to_port(config.host, config.port) ? config.port : -1;
    }
    if (port <= 0) {
      throw IoError("cannot bind " + config.host + ":" + std::to_string(config.port));
    }
  }
};

AnnotationServer::AnnotationServer(Workspace& ws, ServerConfig config)
    : impl_(std::make_unique<Impl>(ws, std::move(config))) {}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::start() {
  impl_->bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void AnnotationServer::run() {
  impl_->bind();
  spdlog::info("annotation server on http://{}:{}/", impl_->config.host, impl_->port);
  impl_->server.listen_after_bind();
}

void AnnotationServer::wait() {
  while (impl_->server.is_running()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

void AnnotationServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int AnnotationServer::port() const { return impl_->port; }

}  // namespace autolibra
