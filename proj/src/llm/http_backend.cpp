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

#include <httplib.h>

#include <cstdlib>

#include "autolibra/core/errors.hpp"
#include "autolibra/llm/backends.hpp"

namespace autolibra {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

SplitUrl split_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw InvalidArgumentError("base URL needs a scheme: " + url);
  }
  auto path = url.find('/', scheme + 3);
  SplitUrl out;
  out.origin = url.substr(0, path);
  out.prefix = path == std::string::npos ? "" : url.substr(path);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

const char* role_name(Role r) {
  switch (r) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)) {
  if (options_.base_url.empty()) {
    throw InvalidArgumentError(
        "model endpoint not configured (set AUTOLIBRA_LLM_BASE_URL)");
  }
}

std::shared_ptr<HttpBackend> HttpBackend::from_env() {
  HttpBackendOptions o;
  if (const char* url = std::getenv("AUTOLIBRA_LLM_BASE_URL")) o.base_url = url;
  if (const char* key = std::getenv("AUTOLIBRA_LLM_API_KEY")) o.api_key = key;
  return std::make_shared<HttpBackend>(o);
}

Json HttpBackend::request_body(const ModelRequest& request) {
  Json messages = Json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", role_name(m.role)}, {"content", m.text}});
  }
  std::string model = request.model_name;
  std::string effort;
  if (auto at = model.find('@'); at != std::string::npos) {
    effort = model.substr(at + 1);
    model = model.substr(0, at);
  }
  Json body = {{"model", model}, {"messages", messages}};
  if (effort.empty()) {
    body["temperature"] = request.temperature;
  } else {
    body["reasoning_effort"] = effort;
  }
  if (request.seed_hint) body["seed"] = *request.seed_hint;
  if (request.output_schema) {
    body["response_format"] = {
        {"type", "json_schema"},
        {"json_schema",
         {{"name", request.output_schema->name},
          {"schema", request.output_schema->schema},
          {"strict", true}}}};
  }
  return body;
}

RawCompletion HttpBackend::complete(const ModelRequest& request) {
  SplitUrl url = split_url(options_.base_url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  auto res = client.Post(url.prefix + "/chat/completions", headers,
                         request_body(request).dump(), "application/json");
  if (!res) {
    throw TransientBackendError("request failed: " +
                                httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransientBackendError("HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw TransportError("HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 500));
  }
  Json reply;
  try {
    reply = Json::parse(res->body);
  } catch (const Json::parse_error& e) {
    throw TransportError(std::string("endpoint returned invalid JSON: ") +
                         e.what());
  }
  RawCompletion out;
  try {
    const Json& message = reply.at("choices").at(0).at("message");
    out.text = message.at("content").is_string()
                   ? message.at("content").get<std::string>()
                   : std::string();
  } catch (const Json::exception& e) {
    throw TransportError(std::string("unexpected completion shape: ") + e.what());
  }
  if (auto it = reply.find("usage"); it != reply.end() && it->is_object()) {
    out.usage.prompt_tokens = it->value("prompt_tokens", std::int64_t{0});
    out.usage.completion_tokens = it->value("completion_tokens", std::int64_t{0});
  }
  out.provider_meta = {{"model", reply.value("model", "")},
                       {"id", reply.value("id", "")}};
  return out;
}

RawCompletion FunctionBackend::complete(const ModelRequest& request) {
  RawCompletion out;
  out.text = fn_(request);
  return out;
}

}  // namespace autolibra
