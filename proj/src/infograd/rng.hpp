/*
 * Copyright 2026 The infograd Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace infograd
{

/*!
 * Seeded random stream keyed by (seed, stream_id) and optional split path.
 *
 * Equal keys give bitwise-identical sequences. Sub-streams produced by
 * split() are keyed by their index, so a Monte Carlo run partitioned into
 * fixed blocks draws the same samples regardless of how many threads
 * consume the blocks.
 */
class RngStream
{
  public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    RngStream split(std::uint64_t index) const;

    result_type operator()() { return engine_(); }
    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }

    // Uniform on [0, 1).
    double uniform();
    double normal();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

  private:
    RngStream(std::uint64_t seed,
              std::uint64_t stream_id,
              std::vector<std::uint32_t> key);
    void reseed();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::vector<std::uint32_t> key_;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace infograd
