// SPDX-License-Identifier: Apache-2.0
//
// rispos: RIS-aided RSS positioning simulator and configuration optimizer
// Copyright (C) 2026 The rispos authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace rispos {

using Rng = std::mt19937_64;

/// Stream identifiers used when splitting one master seed into independent generators.
enum class StreamRole : std::uint64_t {
    trial = 1,
    ground_truth = 2,
    noise = 3,
    policy = 4,
};

/// Derives a child seed from a parent seed and a path of integers.
/// The mapping is a pure function, so identical paths always give identical streams.
inline std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * path.size());
    words.push_back(static_cast<std::uint32_t>(parent));
    words.push_back(static_cast<std::uint32_t>(parent >> 32));
    for (const auto p : path) {
        words.push_back(static_cast<std::uint32_t>(p));
        words.push_back(static_cast<std::uint32_t>(p >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

inline Rng make_stream(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(parent, path));
}

}  // namespace rispos
