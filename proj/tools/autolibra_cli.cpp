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

// Command-line front end. Talks to the engine only through the C API.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "autolibra/autolibra.h"

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::string workspace = ".";
  std::string config;
  std::string run = "default";
  std::optional<long long> seed;
  std::optional<std::string> cassette_mode;
  std::optional<std::string> cassette;
  std::optional<std::string> provider;
  std::optional<int> max_parallel;
  bool verbose = false;
};

class Failure {
 public:
  explicit Failure(al_status s) : status(s) {}
  al_status status;
};

void check(al_status s) {
  if (s != AL_OK) throw Failure(s);
}

// Prints and frees a JSON result.
void print_result(char* json) {
  if (!json) return;
  std::cout << json << "\n";
  al_string_free(json);
}

class SessionHandle {
 public:
  explicit SessionHandle(const Globals& g) {
    check(al_session_open(g.workspace.c_str(), g.config.empty() ? nullptr : g.config.c_str(),
                          &s_));
    if (g.seed) set("seed", std::to_string(*g.seed));
    if (g.provider) set("provider", *g.provider);
    if (g.cassette_mode) set("cassette_mode", *g.cassette_mode);
    if (g.cassette) set("cassette", *g.cassette);
    if (g.max_parallel) set("max_parallel", std::to_string(*g.max_parallel));
  }
  ~SessionHandle() { al_session_close(s_); }
  SessionHandle(const SessionHandle&) = delete;
  SessionHandle& operator=(const SessionHandle&) = delete;

  void set(const std::string& key, const std::string& value) {
    check(al_session_set(s_, key.c_str(), value.c_str()));
  }
  al_session* get() { return s_; }

 private:
  al_session* s_ = nullptr;
};

std::string fraction_text(double f) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", f);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

al_server* g_server = nullptr;

void on_signal(int) {
  if (g_server) al_server_stop(g_server);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"autolibra: metric induction and evaluation for agent trajectories"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("-w,--workspace", g.workspace, "workspace directory")->capture_default_str();
  app.add_option("--config", g.config, "TOML config file")->check(CLI::ExistingFile);
  app.add_option("--run", g.run, "run id under runs/")->capture_default_str();
  app.add_option("--seed", g.seed, "base seed");
  app.add_option("--cassette-mode", g.cassette_mode, "live, record or replay")
      ->check(CLI::IsMember({"live", "record", "replay"}));
  app.add_option("--cassette", g.cassette, "cassette file (default: run directory)");
  app.add_option("--provider", g.provider, "offline or http")
      ->check(CLI::IsMember({"offline", "http"}));
  app.add_option("--max-parallel", g.max_parallel, "concurrent model requests")
      ->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", g.verbose, "log progress to stderr");

  std::function<void()> action;

  auto* ingest = app.add_subcommand("ingest", "import trajectories and/or feedback JSONL");
  std::string traj_path, fb_path;
  ingest->add_option("--trajectories", traj_path, "trajectories JSONL");
  ingest->add_option("--feedback", fb_path, "feedback JSONL");
  ingest->callback([&] {
    if (traj_path.empty() && fb_path.empty()) {
      throw CLI::ValidationError("ingest", "give --trajectories and/or --feedback");
    }
    action = [&] {
      SessionHandle s(g);
      char* out = nullptr;
      if (!traj_path.empty()) {
        check(al_ingest_trajectories(s.get(), traj_path.c_str(), &out));
        print_result(out);
      }
      if (!fb_path.empty()) {
        check(al_ingest_feedback(s.get(), fb_path.c_str(), &out));
        print_result(out);
      }
    };
  });

  auto* split = app.add_subcommand("split", "assign the train/holdout split");
  std::optional<double> fraction;
  split->add_option("--fraction", fraction, "holdout fraction")->check(CLI::Range(0.0, 1.0));
  split->callback([&] {
    action = [&] {
      SessionHandle s(g);
      char* out = nullptr;
      check(al_split(s.get(), fraction.value_or(0.0), g.seed.value_or(0), &out));
      print_result(out);
    };
  });

  auto* serve = app.add_subcommand("serve", "annotation HTTP service");
  std::optional<std::string> host;
  std::optional<int> port;
  std::optional<std::string> static_dir;
  bool strict = false;
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--static-dir", static_dir, "built UI assets");
  serve->add_flag("--strict-guidance", strict, "reject generic feedback");
  serve->callback([&] {
    action = [&] {
      SessionHandle s(g);
      if (static_dir) s.set("server.static_dir", *static_dir);
      if (strict) s.set("server.strict_guidance", "true");
      check(al_server_start(s.get(), host ? host->c_str() : nullptr, port.value_or(-1),
                            &g_server));
      std::cerr << "serving on port " << al_server_port(g_server) << "\n";
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const al_status st = al_server_wait(g_server);
      al_server_free(g_server);
      g_server = nullptr;
      check(st);
    };
  });

  auto* ground = app.add_subcommand("ground", "extract aspects from the feedback");
  ground->callback([&] {
    action = [&] {
      SessionHandle s(g);
      char* out = nullptr;
      check(al_ground(s.get(), g.run.c_str(), &out));
      print_result(out);
    };
  });

  auto* cluster = app.add_subcommand("cluster", "induce one metric set of N metrics");
  std::size_t n = 0;
  cluster->add_option("-n,--n", n, "number of metrics")->required()->check(CLI::PositiveNumber);
  cluster->callback([&] {
    action = [&] {
      SessionHandle s(g);
      char* out = nullptr;
      check(al_cluster(s.get(), g.run.c_str(), n, &out));
      print_result(out);
    };
  });

  std::string metric_set;
  std::string split_name = "all";
  auto add_ms_options = [&](CLI::App* sub) {
    sub->add_option("-m,--metric-set", metric_set, "metric set file or id")->required();
    sub->add_option("--split", split_name, "train, holdout or all")
        ->check(CLI::IsMember({"train", "holdout", "all"}))
        ->capture_default_str();
  };
  auto* judge = app.add_subcommand("judge", "rate trajectories against a metric set");
  add_ms_options(judge);
  judge->callback([&] {
    action = [&] {
      SessionHandle s(g);
      char* out = nullptr;
      check(al_judge(s.get(), g.run.c_str(), metric_set.c_str(), split_name.c_str(), &out));
      print_result(out);
    };
  });

  auto* metaeval = app.add_subcommand("metaeval", "coverage and redundancy of a metric set");
  add_ms_options(metaeval);
  metaeval->callback([&] {
    action = [&] {
      SessionHandle s(g);
      char* out = nullptr;
      check(al_metaeval(s.get(), g.run.c_str(), metric_set.c_str(), split_name.c_str(),
                        &out));
      print_result(out);
    };
  });

  auto* optimize = app.add_subcommand("optimize", "search metric sets over N");
  std::optional<std::size_t> n_min, n_max, sets_per_n;
  std::optional<double> band;
  optimize->add_option("--n-min", n_min, "smallest N")->check(CLI::PositiveNumber);
  optimize->add_option("--n-max", n_max, "largest N")->check(CLI::PositiveNumber);
  optimize->add_option("--sets-per-n", sets_per_n, "candidates per N")
      ->check(CLI::PositiveNumber);
  optimize->add_option("--coverage-band", band, "coverage tolerance")
      ->check(CLI::NonNegativeNumber);
  optimize->callback([&] {
    action = [&] {
      SessionHandle s(g);
      if (n_min) s.set("optimizer.n_min", std::to_string(*n_min));
      if (n_max) s.set("optimizer.n_max", std::to_string(*n_max));
      if (sets_per_n) s.set("optimizer.sets_per_n", std::to_string(*sets_per_n));
      if (band) s.set("optimizer.coverage_band", fraction_text(*band));
      char* out = nullptr;
      check(al_optimize(s.get(), g.run.c_str(), &out));
      print_result(out);
    };
  });

  auto* iterate = app.add_subcommand("iterate", "extend a metric set with frozen definitions");
  std::string parent;
  iterate->add_option("-p,--parent", parent, "parent metric set file or id")->required();
  iterate->callback([&] {
    action = [&] {
      SessionHandle s(g);
      char* out = nullptr;
      check(al_iterate(s.get(), g.run.c_str(), parent.c_str(), &out));
      print_result(out);
    };
  });

  auto* ladder = app.add_subcommand("ladder", "stage-wise agent prompt improvement");
  std::string feedback_dir;
  ladder->add_option("--feedback-dir", feedback_dir,
                     "stage<k>_feedback.jsonl files (default: synthetic annotator)");
  ladder->callback([&] {
    action = [&] {
      SessionHandle s(g);
      char* out = nullptr;
      check(al_ladder(s.get(), g.run.c_str(),
                      feedback_dir.empty() ? nullptr : feedback_dir.c_str(), &out));
      print_result(out);
    };
  });

  auto* report = app.add_subcommand("report", "summary of a run");
  report->callback([&] {
    action = [&] {
      SessionHandle s(g);
      char* out = nullptr;
      check(al_report(s.get(), g.run.c_str(), &out));
      print_result(out);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  al_set_log_level(g.verbose ? "info" : "warn");
  try {
    action();
  } catch (const Failure& f) {
    std::cerr << "error (" << al_status_name(f.status) << "): " << al_last_error_message()
              << "\n";
    return kExitDomain;
  }
  return 0;
}
