// Copyright 2026 The k3dyn Authors.
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

namespace k3dyn {

// Worker count used by parallel_blocks; 0 selects hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs fn(block) for block in [0, n_blocks). Blocks are the unit of work
// and of result ownership, so callers that reduce per-block results in
// block order get output independent of the worker count.
void parallel_blocks(std::size_t n_blocks, const std::function<void(std::size_t)>& fn);

}  // namespace k3dyn
