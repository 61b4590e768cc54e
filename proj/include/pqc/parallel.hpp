// Copyright 2026 The pqc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PQC_PARALLEL_HPP
#define PQC_PARALLEL_HPP

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace pqc {

/// Worker count used by parallel_for: the PQC_THREADS environment variable
/// when set to a positive integer, otherwise std::thread::hardware_concurrency,
/// both capped by the hardware count and floored at 1.
inline unsigned thread_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("PQC_THREADS")) {
    try {
      const long requested = std::stol(env);
      if (requested >= 1)
        return static_cast<unsigned>(requested) < hw ? static_cast<unsigned>(requested) : hw;
    } catch (const std::exception&) {
      // unparsable values fall through to the hardware default
    }
  }
  return hw;
}

namespace detail {
inline bool& inside_parallel_region() {
  thread_local bool inside = false;
  return inside;
}
}  // namespace detail

/// Runs body(i) for i in [0, n). Work is distributed by striding, so callers
/// that write results into slot i get identical output for every thread
/// count. Nested calls run serially to avoid oversubscription. The
/// lowest-index exception, if any, is rethrown on the caller.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned workers = thread_count();
  if (n == 0) return;
  if (workers <= 1 || n == 1 || detail::inside_parallel_region()) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const unsigned used = workers < n ? workers : static_cast<unsigned>(n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> threads;
  threads.reserve(used);
  for (unsigned w = 0; w < used; ++w) {
    threads.emplace_back([&, w] {
      detail::inside_parallel_region() = true;
      for (std::size_t i = w; i < n; i += used) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace pqc

#endif  // PQC_PARALLEL_HPP
