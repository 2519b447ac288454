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

#pragma once

#include <cstddef>
#include <functional>

namespace swarmlab {

// Upper bound on worker threads. Reads SWARMLAB_THREADS when set.
int thread_limit();
void set_thread_limit(int threads);
void apply_thread_limit_from_env();

// Runs body(i) for i in [0, count) on up to thread_limit() threads. Each index
// must write only to its own output slot; callers merge in index order, so
// results never depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Reference version of parallel_for, kept for tests and benchmarks.
void serial_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace swarmlab
