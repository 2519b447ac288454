// Copyright 2026 The Swarmlab Authors.
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

#include "swarmlab/parallel.h"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

namespace swarmlab {

namespace {
int g_thread_limit = 0;  // 0: OpenMP default
}

int thread_limit() { return g_thread_limit > 0 ? g_thread_limit : omp_get_max_threads(); }

void set_thread_limit(int threads) {
  g_thread_limit = std::max(threads, 1);
  omp_set_num_threads(g_thread_limit);
}

void apply_thread_limit_from_env() {
  const char* raw = std::getenv("SWARMLAB_THREADS");
  if (raw == nullptr || *raw == '\0') return;
  try {
    set_thread_limit(std::stoi(raw));
  } catch (const std::exception&) {
    // ignore malformed values, keep the OpenMP default
  }
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const int threads = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(thread_limit())));
  if (threads <= 1 || omp_in_parallel()) {
    serial_for(count, body);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void serial_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace swarmlab
