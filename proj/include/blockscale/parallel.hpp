// Copyright 2026 The blockscale Authors
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

namespace blockscale {

// Worker count from BLOCKSCALE_THREADS, else the hardware concurrency; >= 1.
// Override wins over BLOCKSCALE_THREADS; 0 clears it.
void set_default_worker_count(int workers);
int default_worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once, so writes
// to per-index slots give results independent of the worker count. The first
// exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers = 0);

}  // namespace blockscale
