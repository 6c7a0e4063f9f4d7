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

#include <cstddef>
#include <algorithm>
#include <exception>
#include <functional>
#include <optional>
#include <vector>

#include "infograd/rng.hpp"

namespace infograd
{

// Worker cap; initial value from INFOGRAD_THREADS, else hardware concurrency.
std::size_t max_threads();
// 0 restores the initial value.
void set_max_threads(std::size_t n);

namespace detail
{
void run_indexed(std::size_t count, const std::function<void(std::size_t)>& body);
}

/*!
 * Evaluate fn(i) for i in [0, count) on up to max_threads() workers and
 * return the results in index order. The first exception (by index) is
 * rethrown after all workers finish.
 */
template <class F>
auto parallel_map(std::size_t count, F&& fn)
{
    using T = decltype(fn(std::size_t{0}));
    std::vector<std::optional<T>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    detail::run_indexed(count, [&](std::size_t i) {
        try
        {
            slots[i].emplace(fn(i));
        }
        catch (...)
        {
            errors[i] = std::current_exception();
        }
    });
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(count);
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

inline constexpr std::size_t mc_block_size = 8192;

/*!
 * Monte Carlo over fixed-size sample blocks. Block b draws from rng.split(b)
 * and accumulates into its own copy of init; results are merged by block
 * index, so the outcome does not depend on the thread count.
 */
template <class Acc, class Step>
Acc mc_reduce(std::size_t samples, const RngStream& rng, const Acc& init, Step step)
{
    const std::size_t blocks = (samples + mc_block_size - 1) / mc_block_size;
    auto partial = parallel_map(blocks, [&](std::size_t b) {
        Acc acc = init;
        RngStream stream = rng.split(b);
        const std::size_t begin = b * mc_block_size;
        const std::size_t end = std::min(samples, begin + mc_block_size);
        for (std::size_t s = begin; s < end; ++s)
            step(acc, stream);
        return acc;
    });
    Acc total = init;
    for (const auto& p : partial)
        total.merge(p);
    return total;
}

}  // namespace infograd
