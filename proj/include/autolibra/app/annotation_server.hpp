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

// HTTP+JSON service used by the annotation UI.
//
//   GET  /api/trajectories?split=train|holdout|all
//   GET  /api/trajectories/{id}
//   POST /api/feedback        {trajectory_id, annotator, text}
//   GET  /api/progress        {"annotated": n, "total": m}
//   GET  /api/guidance
//   GET  /                    static UI assets or a placeholder page

#ifndef AUTOLIBRA_APP_ANNOTATION_SERVER_HPP_
#define AUTOLIBRA_APP_ANNOTATION_SERVER_HPP_

#include <memory>
#include <string>
#include <string_view>

#include "autolibra/app/config.hpp"
#include "autolibra/app/workspace.hpp"

namespace autolibra {

// Instructions shown next to the feedback box.
const std::string& annotation_guidance();

// True for near-exact matches of generic whole-run verdicts ("The agent is
// good at solving the task") after case, punctuation and whitespace
// normalization.
bool is_generic_feedback(std::string_view text);

class AnnotationServer {
 public:
  AnnotationServer(Workspace& ws, ServerConfig config);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port. Throws IoError when binding fails.
  int start();
  // Blocks serving on the calling thread until stop() is called.
  void run();
  // After start(): blocks until another thread calls stop().
  void wait();
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace autolibra

#endif  // AUTOLIBRA_APP_ANNOTATION_SERVER_HPP_
