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

#include "autolibra/autolibra.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "autolibra/app/annotation_server.hpp"
#include "autolibra/app/config.hpp"
#include "autolibra/app/pipeline.hpp"
#include "autolibra/core/errors.hpp"
#include "autolibra/core/json_io.hpp"

using autolibra::AppConfig;
using autolibra::Json;

struct al_session {
  std::filesystem::path workspace;
  AppConfig config;
  std::unique_ptr<autolibra::Session> session;

  // Rebuilt after a setting changes so the backend matches the provider.
  autolibra::Session& get() {
    if (!session) session = std::make_unique<autolibra::Session>(workspace, config);
    return *session;
  }
};

struct al_server {
  std::unique_ptr<autolibra::Workspace> ws;
  std::unique_ptr<autolibra::AnnotationServer> server;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
al_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return AL_OK;
  } catch (const autolibra::Error& e) {
    g_last_error = e.what();
    return static_cast<al_status>(static_cast<int>(e.code()));
  } catch (const Json::exception& e) {
    g_last_error = e.what();
    return AL_PARSE;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return AL_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return AL_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AL_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void emit(char** out, const Json& j) {
  if (out) *out = dup_string(j.dump(2));
}

void require(const void* p, const char* what) {
  if (!p) throw autolibra::InvalidArgumentError(std::string(what) + " is NULL");
}

autolibra::Split split_arg(const char* s) {
  try {
    return autolibra::parse_split(s ? s : "all");
  } catch (const autolibra::ParseError& e) {
    throw autolibra::InvalidArgumentError(e.what());
  }
}

bool is_string_key(const std::string& leaf) {
  static const char* const kStrings[] = {"provider", "cassette_mode", "cassette",
                                         "scope_noun_a", "scope_noun_b", "host",
                                         "static_dir"};
  for (const char* k : kStrings) {
    if (leaf == k) return true;
  }
  return leaf.size() > 6 && leaf.ends_with("_model");
}

// "max_parallel" -> gateway.max_parallel; dotted keys pass through.
Json overlay_for(std::string key, const std::string& value) {
  static const char* const kGatewayKeys[] = {"provider", "cassette_mode", "cassette",
                                             "max_parallel", "transport_retries",
                                             "structured_attempts"};
  for (const char* k : kGatewayKeys) {
    if (key == k) key = std::string("gateway.") + k;
  }
  const auto dot = key.find('.');
  const std::string leaf = dot == std::string::npos ? key : key.substr(dot + 1);
  Json v;
  if (is_string_key(leaf)) {
    v = value;
  } else {
    v = autolibra::parse_toml("v = " + value).at("v");
  }
  if (dot == std::string::npos) return {{key, v}};
  return {{key.substr(0, dot), {{leaf, v}}}};
}

Json import_json(const autolibra::ImportResult& r) {
  return {{"count", r.count}, {"warnings", r.warnings}};
}

}  // namespace

extern "C" {

const char* al_version(void) { return "0.1.0"; }

const char* al_status_name(al_status status) {
  return autolibra::error_code_name(static_cast<autolibra::ErrorCode>(status));
}

const char* al_last_error_message(void) { return g_last_error.c_str(); }

void al_string_free(char* s) { std::free(s); }

al_status al_set_log_level(const char* level) {
  return guarded([&] {
    require(level, "level");
    auto lvl = spdlog::level::from_str(level);
    if (lvl == spdlog::level::off && std::strcmp(level, "off") != 0) {
      throw autolibra::InvalidArgumentError(std::string("unknown log level ") + level);
    }
    static const bool once = [] {
      spdlog::set_default_logger(spdlog::stderr_color_mt("autolibra"));
      return true;
    }();
    (void)once;
    spdlog::set_level(lvl);
  });
}

al_status al_session_open(const char* workspace, const char* config_path,
                          al_session** out) {
  return guarded([&] {
    require(workspace, "workspace");
    require(out, "out");
    *out = nullptr;
    auto s = std::make_unique<al_session>();
    s->workspace = workspace;
    if (config_path) s->config = autolibra::load_app_config(config_path);
    autolibra::Workspace probe(s->workspace);  // creates the directory
    *out = s.release();
  });
}

void al_session_close(al_session* session) { delete session; }

al_status al_session_set(al_session* session, const char* key, const char* value) {
  return guarded([&] {
    require(session, "session");
    require(key, "key");
    require(value, "value");
    session->config =
        autolibra::app_config_from_json(overlay_for(key, value), session->config);
    session->session.reset();
  });
}

al_status al_session_config_json(al_session* session, char** out_json) {
  return guarded([&] {
    require(session, "session");
    emit(out_json, autolibra::app_config_to_json(session->config));
  });
}

al_status al_ingest_trajectories(al_session* session, const char* path,
                                 char** out_json) {
  return guarded([&] {
    require(session, "session");
    require(path, "path");
    emit(out_json, import_json(session->get().ingest_trajectories(path)));
  });
}

al_status al_ingest_feedback(al_session* session, const char* path, char** out_json) {
  return guarded([&] {
    require(session, "session");
    require(path, "path");
    emit(out_json, import_json(session->get().ingest_feedback(path)));
  });
}

al_status al_split(al_session* session, double fraction, int64_t seed,
                   char** out_json) {
  return guarded([&] {
    require(session, "session");
    if (fraction <= 0) fraction = session->config.holdout_fraction;
    emit(out_json, autolibra::split_to_json(session->get().split(fraction, seed)));
  });
}

al_status al_ground(al_session* session, const char* run_id, char** out_json) {
  return guarded([&] {
    require(session, "session");
    require(run_id, "run_id");
    auto aspects = session->get().ground(run_id);
    emit(out_json, {{"aspects", aspects.size()}});
  });
}

al_status al_cluster(al_session* session, const char* run_id, size_t n,
                     char** out_json) {
  return guarded([&] {
    require(session, "session");
    require(run_id, "run_id");
    emit(out_json, Json(session->get().cluster(run_id, n)));
  });
}

al_status al_iterate(al_session* session, const char* run_id, const char* parent,
                     char** out_json) {
  return guarded([&] {
    require(session, "session");
    require(run_id, "run_id");
    require(parent, "parent");
    auto& s = session->get();
    emit(out_json, Json(s.iterate(run_id, s.resolve_metric_set(parent))));
  });
}

al_status al_judge(al_session* session, const char* run_id, const char* metric_set,
                   const char* split, char** out_json) {
  return guarded([&] {
    require(session, "session");
    require(run_id, "run_id");
    require(metric_set, "metric_set");
    auto& s = session->get();
    auto outcome = s.judge(run_id, s.resolve_metric_set(metric_set), split_arg(split));
    emit(out_json, outcome.scores);
  });
}

al_status al_metaeval(al_session* session, const char* run_id,
                      const char* metric_set, const char* split, char** out_json) {
  return guarded([&] {
    require(session, "session");
    require(run_id, "run_id");
    require(metric_set, "metric_set");
    auto& s = session->get();
    auto ev = s.metaeval(run_id, s.resolve_metric_set(metric_set), split_arg(split));
    emit(out_json, Json(ev.report));
  });
}

al_status al_optimize(al_session* session, const char* run_id, char** out_json) {
  return guarded([&] {
    require(session, "session");
    require(run_id, "run_id");
    emit(out_json, autolibra::optimize_history_json(session->get().optimize(run_id)));
  });
}

al_status al_ladder(al_session* session, const char* run_id, const char* feedback_dir,
                    char** out_json) {
  return guarded([&] {
    require(session, "session");
    require(run_id, "run_id");
    std::unique_ptr<autolibra::FeedbackSource> source;
    if (feedback_dir) {
      source = std::make_unique<autolibra::FileFeedbackSource>(feedback_dir);
    } else {
      source = std::make_unique<autolibra::SyntheticFeedbackSource>();
    }
    auto run = session->get().ladder(run_id, *source);
    emit(out_json, autolibra::ladder_run_json(run));
  });
}

al_status al_report(al_session* session, const char* run_id, char** out_json) {
  return guarded([&] {
    require(session, "session");
    require(run_id, "run_id");
    emit(out_json, session->get().report(run_id));
  });
}

al_status al_server_start(al_session* session, const char* host, int port,
                          al_server** out) {
  return guarded([&] {
    require(session, "session");
    require(out, "out");
    *out = nullptr;
    autolibra::ServerConfig cfg = session->config.server;
    if (host) cfg.host = host;
    if (port >= 0) cfg.port = port;
    auto srv = std::make_unique<al_server>();
    srv->ws = std::make_unique<autolibra::Workspace>(session->workspace);
    srv->server = std::make_unique<autolibra::AnnotationServer>(*srv->ws, cfg);
    srv->server->start();
    *out = srv.release();
  });
}

int al_server_port(const al_server* server) {
  return server ? server->server->port() : -1;
}

al_status al_server_wait(al_server* server) {
  return guarded([&] {
    require(server, "server");
    server->server->wait();
  });
}

void al_server_stop(al_server* server) {
  if (!server) return;
  server->server->stop();
}

void al_server_free(al_server* server) {
  if (!server) return;
  server->server->stop();
  delete server;
}

al_status al_toml_to_json(const char* toml, char** out_json) {
  return guarded([&] {
    require(toml, "toml");
    emit(out_json, autolibra::parse_toml(toml));
  });
}

}  // extern "C"
