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

#include "autolibra/llm/gateway.hpp"

#include <random>
#include <thread>
#include <utility>

#include <spdlog/spdlog.h>

#include "autolibra/core/errors.hpp"
#include "autolibra/core/json_io.hpp"
#include "autolibra/core/util.hpp"

namespace autolibra {
namespace {

const char* role_name(Role r) {
  switch (r) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

Json completion_json(const RawCompletion& c) {
  return {{"text", c.text},
          {"usage",
           {{"prompt_tokens", c.usage.prompt_tokens},
            {"completion_tokens", c.usage.completion_tokens}}},
          {"provider_meta", c.provider_meta}};
}

RawCompletion completion_from_json(const Json& j) {
  RawCompletion c;
  c.text = j.at("text").get<std::string>();
  if (auto it = j.find("usage"); it != j.end()) {
    c.usage.prompt_tokens = it->value("prompt_tokens", std::int64_t{0});
    c.usage.completion_tokens = it->value("completion_tokens", std::int64_t{0});
  }
  c.provider_meta = j.value("provider_meta", Json::object());
  return c;
}

void check_value(const Json& value, const Json& schema, const std::string& path,
                 std::vector<std::string>& issues) {
  const std::string type = schema.value("type", "");
  auto fail = [&](const std::string& what) {
    issues.push_back((path.empty() ? std::string("$") : path) + ": " + what);
  };
  if (type == "object") {
    if (!value.is_object()) return fail("expected object");
    const Json props = schema.value("properties", Json::object());
    for (const auto& req : schema.value("required", Json::array())) {
      if (!value.contains(req.get<std::string>())) {
        fail("missing required field \"" + req.get<std::string>() + "\"");
      }
    }
    for (auto it = props.begin(); it != props.end(); ++it) {
      if (value.contains(it.key())) {
        check_value(value.at(it.key()), it.value(), path + "." + it.key(),
                    issues);
      }
    }
  } else if (type == "array") {
    if (!value.is_array()) return fail("expected array");
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        check_value(value[i], schema["items"],
                    path + "[" + std::to_string(i) + "]", issues);
      }
    }
  } else if (type == "string") {
    if (!value.is_string()) return fail("expected string");
    if (schema.contains("enum")) {
      bool found = false;
      for (const auto& e : schema["enum"]) found = found || e == value;
      if (!found) fail("value " + value.dump() + " not in " + schema["enum"].dump());
    }
  } else if (type == "integer") {
    if (!value.is_number_integer()) return fail("expected integer");
  } else if (type == "number") {
    if (!value.is_number()) return fail("expected number");
  } else if (type == "boolean") {
    if (!value.is_boolean()) return fail("expected boolean");
  }
}

}  // namespace

Json canonical_request(const ModelRequest& request) {
  Json messages = Json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", role_name(m.role)}, {"text", m.text}});
  }
  Json j = {{"messages", messages},
            {"model_name", request.model_name},
            {"temperature", request.temperature},
            {"schema", nullptr}};
  if (request.output_schema) {
    j["schema"] = {{"name", request.output_schema->name},
                   {"schema", request.output_schema->schema}};
  }
  if (request.seed_hint) j["seed_hint"] = *request.seed_hint;
  return j;
}

std::string request_digest(const ModelRequest& request) {
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  return sha256_hex(canonical_request(request).dump());
}

std::vector<std::string> validate_against_schema(const Json& value,
                                                 const Json& schema) {
  std::vector<std::string> issues;
  check_value(value, schema, "", issues);
  return issues;
}

std::optional<Json> parse_json_reply(const std::string& text) {
  std::string body = text;
  auto fence = body.find("```");
  if (fence != std::string::npos) {
    auto start = body.find('\n', fence);
    auto end = body.rfind("```");
    if (start != std::string::npos && end != std::string::npos && end > start) {
      body = body.substr(start + 1, end - start - 1);
    }
  }
  try {
    return Json::parse(body);
  } catch (const Json::parse_error&) {
    return std::nullopt;
  }
}

CassetteMode parse_cassette_mode(const std::string& s) {
  if (s == "live") return CassetteMode::kLive;
  if (s == "record") return CassetteMode::kRecord;
  if (s == "replay") return CassetteMode::kReplay;
  throw InvalidArgumentError("cassette mode must be record, replay or live, got \"" +
                             s + "\"");
}

const char* to_string(CassetteMode mode) {
  switch (mode) {
    case CassetteMode::kLive: return "live";
    case CassetteMode::kRecord: return "record";
    case CassetteMode::kReplay: return "replay";
  }
  return "live";
}

Cassette::Cassette(std::filesystem::path path, CassetteMode mode)
    : path_(std::move(path)), mode_(mode) {
  if (mode_ == CassetteMode::kLive) return;
  if (!std::filesystem::exists(path_)) {
    if (mode_ == CassetteMode::kReplay) {
      throw CassetteMissError("cassette not found: " + path_.string());
    }
    return;
  }
  for (const auto& row : read_jsonl(path_)) {
    try {
      std::string digest = row.value.at("digest").get<std::string>();
      // First entry wins; later duplicates are ignored on replay.
      index_.try_emplace(digest, completion_from_json(row.value.at("response")));
    } catch (const Json::exception& e) {
      throw ParseError(path_.string() + ":" + std::to_string(row.line) +
                       ": malformed cassette entry: " + e.what());
    }
  }
}

std::optional<RawCompletion> Cassette::lookup(const std::string& digest) const {
  auto it = index_.find(digest);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Cassette::append(const std::string& digest, const ModelRequest& request,
                      const RawCompletion& response) {
  std::lock_guard<std::mutex> lock(write_mu_);
  append_jsonl_line(path_, {{"digest", digest},
                            {"request", canonical_request(request)},
                            {"response", completion_json(response)}});
  ++appended_;
}

std::size_t Cassette::size() const {
  std::lock_guard<std::mutex> lock(write_mu_);
  return index_.size() + appended_;
}

Gateway::Gateway(std::shared_ptr<ModelBackend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
  if (options_.mode != CassetteMode::kLive) {
    cassette_ = std::make_unique<Cassette>(options_.cassette_path, options_.mode);
  }
  if (!backend_ && options_.mode != CassetteMode::kReplay) {
    throw InvalidArgumentError("gateway needs a model backend unless replaying");
  }
}

RawCompletion Gateway::call_backend(const ModelRequest& request) const {
  thread_local std::mt19937 jitter_rng{std::random_device{}()};
  for (int attempt = 0;; ++attempt) {
    try {
      backend_calls_.fetch_add(1);
      return backend_->complete(request);
    } catch (const TransientBackendError& e) {
      if (attempt >= options_.transport_retries) {
        throw TransportError("endpoint failed after " +
                             std::to_string(attempt + 1) +
                             " attempts: " + e.what());
      }
      auto base = options_.backoff_base * (1 << attempt);
      std::uniform_int_distribution<long> jitter(
          0, std::max<long>(0, options_.backoff_base.count() / 2));
      auto wait = base + std::chrono::milliseconds(jitter(jitter_rng));
      spdlog::warn("transient model endpoint failure ({}); retrying in {} ms",
                   e.what(), wait.count());
      std::this_thread::sleep_for(wait);
    }
  }
}

RawCompletion Gateway::fetch(const ModelRequest& request) const {
  if (request.messages.empty()) {
    throw InvalidArgumentError("model request without messages");
  }
  if (!cassette_) return call_backend(request);
  const std::string digest = request_digest(request);
  if (cassette_->mode() == CassetteMode::kReplay) {
    auto hit = cassette_->lookup(digest);
    if (!hit) {
      throw CassetteMissError("no cassette entry for request digest " + digest);
    }
    return *hit;
  }
  RawCompletion raw = call_backend(request);
  cassette_->append(digest, request, raw);
  return raw;
}

ModelResponse Gateway::complete(const ModelRequest& request) const {
  if (!request.output_schema) {
    RawCompletion raw = fetch(request);
    return {raw.text, std::nullopt, raw.usage, raw.provider_meta};
  }
  ModelRequest attempt_request = request;
  std::string last_issue;
  const int attempts = std::max(1, options_.structured_attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    RawCompletion raw = fetch(attempt_request);
    auto parsed = parse_json_reply(raw.text);
    std::vector<std::string> issues;
    if (!parsed) {
      issues.push_back("response is not valid JSON");
    } else {
      issues = validate_against_schema(*parsed, request.output_schema->schema);
    }
    if (issues.empty()) {
      return {raw.text, std::move(parsed), raw.usage, raw.provider_meta};
    }
    last_issue.clear();
    for (const auto& i : issues) last_issue += (last_issue.empty() ? "" : "; ") + i;
    attempt_request.messages.push_back({Role::kAssistant, raw.text});
    attempt_request.messages.push_back(
        {Role::kUser,
         "Your previous response did not match the required JSON schema (" +
             last_issue + "). Reply again with only a JSON value matching: " +
             request.output_schema->schema.dump()});
  }
  throw StructuredOutputError("schema \"" + request.output_schema->name +
                              "\" not satisfied after " +
                              std::to_string(attempts) +
                              " attempts: " + last_issue);
}

std::vector<ModelResponse> Gateway::complete_batch(
    std::span<const ModelRequest> requests, std::size_t max_parallel) const {
  if (max_parallel < 1) throw InvalidArgumentError("max_parallel must be >= 1");
  std::size_t failed = 0;
  try {
    return parallel_map<ModelResponse>(
        requests.size(), max_parallel,
        [&](std::size_t i) { return complete(requests[i]); }, &failed);
  } catch (const Error& e) {
    throw BatchError(e.code(), failed, e.what());
  } catch (const std::exception& e) {
    throw BatchError(ErrorCode::kInternal, failed, e.what());
  }
}

std::string with_payload(const std::string& intro, const Json& payload) {
  return intro + "\n\n```json\n" + payload.dump(2) + "\n```";
}

std::optional<Json> extract_payload(const ModelRequest& request) {
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role != Role::kUser) continue;
    const std::string& text = it->text;
    auto start = text.rfind("```json\n");
    if (start == std::string::npos) continue;
    start += 8;
    auto end = text.find("\n```", start);
    if (end == std::string::npos) continue;
    try {
      return Json::parse(text.substr(start, end - start));
    } catch (const Json::parse_error&) {
      continue;
    }
  }
  return std::nullopt;
}

}  // namespace autolibra
