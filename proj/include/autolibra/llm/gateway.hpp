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

// Chat-completion gateway: one entry point for every model call in the
// pipeline. Handles schema-constrained output (with re-prompting on parse
// failures), transport retries, bounded-parallel batches, and a
// record/replay cassette that makes whole pipeline runs reproducible.

#ifndef AUTOLIBRA_LLM_GATEWAY_HPP_
#define AUTOLIBRA_LLM_GATEWAY_HPP_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace autolibra {

using Json = nlohmann::json;

enum class Role { kSystem, kUser, kAssistant };

struct Message {
  Role role = Role::kUser;
  std::string text;

  bool operator==(const Message&) const = default;
};

// Subset of JSON Schema: object (properties + required), array (items),
// string (optional enum), integer, number, boolean. `name` identifies the
// response shape ("aspects", "ratings", ...).
struct OutputSchema {
  std::string name;
  Json schema;
};

struct ModelRequest {
  std::vector<Message> messages;
  // "model" or "model@reasoning-effort", e.g. "o3-mini@high".
  std::string model_name;
  double temperature = 0.0;
  std::optional<OutputSchema> output_schema;
  std::optional<std::int64_t> seed_hint;
};

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

// What a backend returns for one request.
struct RawCompletion {
  std::string text;
  Usage usage;
  Json provider_meta = Json::object();
};

struct ModelResponse {
  std::string text;
  std::optional<Json> structured;
  Usage usage;
  Json provider_meta = Json::object();
};

class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  // Throws TransientBackendError for retryable failures and TransportError
  // for permanent ones.
  virtual RawCompletion complete(const ModelRequest& request) = 0;
};

// Canonical JSON of the digest-relevant request fields. Object keys are
// sorted, so schema key order and whitespace do not matter.
Json canonical_request(const ModelRequest& request);
std::string request_digest(const ModelRequest& request);

// Issues found while checking `value` against the schema; empty when valid.
std::vector<std::string> validate_against_schema(const Json& value,
                                                 const Json& schema);

// Parses a model reply as JSON, tolerating a surrounding ``` fence.
std::optional<Json> parse_json_reply(const std::string& text);

enum class CassetteMode { kLive, kRecord, kReplay };

CassetteMode parse_cassette_mode(const std::string& s);
const char* to_string(CassetteMode mode);

// Append-only request/response log (cassette.jsonl). Lookups read an index
// built at open time and never take the lock; appends are serialized.
class Cassette {
 public:
  Cassette(std::filesystem::path path, CassetteMode mode);

  CassetteMode mode() const { return mode_; }
  const std::filesystem::path& path() const { return path_; }
  std::optional<RawCompletion> lookup(const std::string& digest) const;
  void append(const std::string& digest, const ModelRequest& request,
              const RawCompletion& response);
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  CassetteMode mode_;
  std::unordered_map<std::string, RawCompletion> index_;
  mutable std::mutex write_mu_;
  std::size_t appended_ = 0;
};

struct GatewayOptions {
  CassetteMode mode = CassetteMode::kLive;
  std::filesystem::path cassette_path = "cassette.jsonl";
  int transport_retries = 3;
  std::chrono::milliseconds backoff_base{500};
  // Total attempts for a schema-constrained request, including the first.
  int structured_attempts = 3;
};

class Gateway {
 public:
  // `backend` may be null in replay mode.
  Gateway(std::shared_ptr<ModelBackend> backend, GatewayOptions options = {});

  ModelResponse complete(const ModelRequest& request) const;

  // Responses come back in input order. At most `max_parallel` requests are
  // in flight. The first failure stops the batch and is reported as a
  // BatchError carrying the failing index and the original error code.
  std::vector<ModelResponse> complete_batch(
      std::span<const ModelRequest> requests, std::size_t max_parallel) const;

  const GatewayOptions& options() const { return options_; }
  std::size_t backend_calls() const { return backend_calls_.load(); }

 private:
  RawCompletion fetch(const ModelRequest& request) const;
  RawCompletion call_backend(const ModelRequest& request) const;

  std::shared_ptr<ModelBackend> backend_;
  GatewayOptions options_;
  std::unique_ptr<Cassette> cassette_;
  mutable std::atomic<std::size_t> backend_calls_{0};
};

// Prompt helpers shared by every module: a message body ends with a fenced
// JSON payload that carries the structured inputs.
std::string with_payload(const std::string& intro, const Json& payload);
// Payload of the last user message, if it has one.
std::optional<Json> extract_payload(const ModelRequest& request);

}  // namespace autolibra

#endif  // AUTOLIBRA_LLM_GATEWAY_HPP_
