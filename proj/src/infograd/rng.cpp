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

#include "infograd/rng.hpp"

namespace infograd
{
namespace
{
void push_u64(std::vector<std::uint32_t>& key, std::uint64_t v)
{
    key.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    key.push_back(static_cast<std::uint32_t>(v >> 32));
}
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id)
{
    push_u64(key_, seed);
    push_u64(key_, stream_id);
    reseed();
}

RngStream::RngStream(std::uint64_t seed,
                     std::uint64_t stream_id,
                     std::vector<std::uint32_t> key)
    : seed_(seed), stream_id_(stream_id), key_(std::move(key))
{
    reseed();
}

void RngStream::reseed()
{
    std::seed_seq seq(key_.begin(), key_.end());
    engine_.seed(seq);
}

RngStream RngStream::split(std::uint64_t index) const
{
    auto key = key_;
    // Level marker keeps split(a).split(b) distinct from a flat key.
    key.push_back(0x9e3779b9u);
    push_u64(key, index);
    return RngStream(seed_, stream_id_, std::move(key));
}

double RngStream::uniform()
{
    return uniform_(engine_);
}

double RngStream::normal()
{
    return normal_(engine_);
}

}  // namespace infograd
