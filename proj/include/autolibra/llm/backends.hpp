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

#ifndef AUTOLIBRA_LLM_BACKENDS_HPP_
#define AUTOLIBRA_LLM_BACKENDS_HPP_

#include <chrono>
#include <functional>
#include <memory>
#include <string>

#include "autolibra/llm/gateway.hpp"

namespace autolibra {

// OpenAI-compatible chat-completions client. Schema-constrained requests
// are sent with response_format json_schema (strict). HTTP 429 and 5xx map
// to TransientBackendError.
struct HttpBackendOptions {
  std::string base_url;  // e.g. "https://api.openai.com/v1"
  std::string api_key;
  std::chrono::seconds timeout{120};
};

class HttpBackend : public ModelBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  // Reads AUTOLIBRA_LLM_BASE_URL and AUTOLIBRA_LLM_API_KEY.
  static std::shared_ptr<HttpBackend> from_env();

  RawCompletion complete(const ModelRequest& request) override;

  // The JSON body sent for `request`; exposed for tests.
  static Json request_body(const ModelRequest& request);

 private:
  HttpBackendOptions options_;
};

// Backend implemented by a callable returning the reply text. Used for
// scripted test doubles and for embedding in-process models.
class FunctionBackend : public ModelBackend {
 public:
  using Fn = std::function<std::string(const ModelRequest&)>;
  explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}
  RawCompletion complete(const ModelRequest& request) override;

 private:
  Fn fn_;
};

// Deterministic rule-based stand-in for every model role (grounder,
// clusterer, judge, matcher, toy agent, prompt improver). It keys on the
// response schema name and reads the fenced JSON payload, so the whole
// pipeline and the CLI run offline. Output quality is heuristic.
std::shared_ptr<ModelBackend> make_offline_backend();

}  // namespace autolibra

#endif  // AUTOLIBRA_LLM_BACKENDS_HPP_
