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

#ifndef AUTOLIBRA_CORE_UTIL_HPP_
#define AUTOLIBRA_CORE_UTIL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <initializer_list>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "autolibra/core/model.hpp"

namespace autolibra {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// `prefix` + first `length` hex chars of SHA-256 over the parts joined by
// an ASCII unit separator.
std::string content_id(std::string_view prefix,
                       std::initializer_list<std::string_view> parts,
                       std::size_t length = 16);

// Collapses runs of whitespace to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

// Cuts at a word boundary so the result is at most `max_chars` long.
std::string truncate_words(std::string_view text, std::size_t max_chars);

// "Step k — OBSERVATION: ... ACTION: ..."
std::string render_step(const Step& step);

// Whitespace-normalized text of steps [start, end], joined by spaces.
std::string referenced_text(const Trajectory& t, std::size_t start,
                            std::size_t end);

// SplitMix64 mix of a base seed with extra coordinates; used to derive
// per-(round, n, k) seeds.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> coords);

// Fisher-Yates over std::mt19937_64, whose output sequence is fixed by the
// standard, so shuffles are reproducible across standard libraries.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

// UTC now as "YYYY-MM-DDTHH:MM:SSZ".
std::string iso8601_now();

// Runs fn(i) for i in [0, n) on at most `max_parallel` threads and returns
// results in index order. If any call throws, no further indices are
// started and the exception of the lowest failing index is rethrown
// together with that index.
template <typename R>
std::vector<R> parallel_map(std::size_t n, std::size_t max_parallel,
                            const std::function<R(std::size_t)>& fn,
                            std::size_t* failed_index = nullptr) {
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  auto worker = [&] {
    while (!abort.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
        abort.store(true);
      }
    }
  };
  std::size_t threads = std::max<std::size_t>(1, std::min(max_parallel, n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      if (failed_index) *failed_index = i;
      std::rethrow_exception(errors[i]);
    }
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace autolibra

#endif  // AUTOLIBRA_CORE_UTIL_HPP_
