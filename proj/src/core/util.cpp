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

#include "autolibra/core/util.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>

#include <openssl/evp.h>

#include "autolibra/core/errors.hpp"

namespace autolibra {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kInternal, "SHA-256 failed");
  }
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string content_id(std::string_view prefix,
                       std::initializer_list<std::string_view> parts,
                       std::size_t length) {
  std::string joined;
  for (auto p : parts) {
    joined.append(p);
    joined += '\x1f';
  }
  return std::string(prefix) + sha256_hex(joined).substr(0, length);
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      space = true;
    } else {
      if (space && !out.empty()) out += ' ';
      space = false;
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string truncate_words(std::string_view text, std::size_t max_chars) {
  if (text.size() <= max_chars) return std::string(text);
  std::string_view cut = text.substr(0, max_chars);
  auto pos = cut.find_last_of(' ');
  if (pos != std::string_view::npos && pos > 0) cut = cut.substr(0, pos);
  return std::string(cut);
}

std::string render_step(const Step& step) {
  return "Step " + std::to_string(step.index) +
         " — OBSERVATION: " + step.observation +
         " ACTION: " + step.action;
}

std::string referenced_text(const Trajectory& t, std::size_t start,
                            std::size_t end) {
  std::string out;
  for (std::size_t i = start; i <= end && i < t.steps.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += "OBSERVATION: " + t.steps[i].observation +
           " ACTION: " + t.steps[i].action;
  }
  return normalize_whitespace(out);
}

std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> coords) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(base);
  for (auto c : coords) h = mix(h ^ mix(c));
  return h;
}

std::string iso8601_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace autolibra
