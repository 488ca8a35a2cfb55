/*
 * Copyright 2026 The palml Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PALML_PARALLEL_H_
#define PALML_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace palml {

// Runs fn(0..n-1) on up to hardware_concurrency() threads. Calls made from
// inside a parallel region run serially, so nested use (folds -> trees) does
// not oversubscribe. If several iterations throw, the exception of the lowest
// index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Overrides the worker count (0 restores the hardware default).
void set_max_threads(std::size_t threads);

}  // namespace palml

#endif  // PALML_PARALLEL_H_
