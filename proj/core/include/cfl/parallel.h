// Copyright 2026 The CFL Authors.
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

#ifndef CFL_PARALLEL_H_
#define CFL_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace cfl {

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Iterations must write disjoint outputs; results then do not
// depend on scheduling.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& body,
                 unsigned threads = 0);

// Process-wide default used by ParallelFor when threads == 0; 0 restores
// hardware concurrency.
void SetDefaultThreads(unsigned threads);

}  // namespace cfl

#endif  // CFL_PARALLEL_H_
