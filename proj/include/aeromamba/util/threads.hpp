// Copyright 2026 The aeromamba Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef AEROMAMBA_UTIL_THREADS_HPP_
#define AEROMAMBA_UTIL_THREADS_HPP_

#include <cstddef>
#include <functional>

namespace aeromamba::util {

// Worker cap from AEROMAMBA_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index is
// handled by exactly one thread; fn must not share mutable state across i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace aeromamba::util

#endif  // AEROMAMBA_UTIL_THREADS_HPP_
