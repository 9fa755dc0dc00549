/* Copyright 2026 The osvlm Authors.

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

// Seed splitting. Every random stream in a run is derived from the single
// user-facing seed as
//
//   derive_seed(base, stream, index) =
//       splitmix64(splitmix64(base ^ fnv1a64(stream)) + index)
//
// so streams with different names or indices are decorrelated and any sweep
// point can be regenerated from (base seed, stream name, index) alone.

#ifndef OSV_SEEDS_HPP_
#define OSV_SEEDS_HPP_

#include <cstdint>
#include <string_view>

namespace osv {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream,
                          std::uint64_t index = 0);

}  // namespace osv

#endif  // OSV_SEEDS_HPP_
