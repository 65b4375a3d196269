// Copyright 2026 The cfris Authors
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

#include <cstdint>

namespace cfris::streams {

// Purpose tags for RandomStream substreams. Every consumer of randomness picks
// one tag so that, for a fixed master seed, no two consumers overlap.
inline constexpr std::uint64_t kLayout = 1;
inline constexpr std::uint64_t kPhases = 2;
inline constexpr std::uint64_t kTrials = 3;
inline constexpr std::uint64_t kNetInit = 4;
inline constexpr std::uint64_t kReplay = 5;
inline constexpr std::uint64_t kPolicy = 6;
inline constexpr std::uint64_t kEnvReset = 7;
inline constexpr std::uint64_t kMoments = 8;

}  // namespace cfris::streams
