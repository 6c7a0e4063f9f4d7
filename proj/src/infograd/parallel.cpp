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

#include "infograd/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>

namespace infograd
{
namespace
{
std::size_t initial_threads()
{
    if (const char* env = std::getenv("INFOGRAD_THREADS"))
    {
        try
        {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        }
        catch (const std::exception&)
        {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<std::size_t>& thread_cap()
{
    static std::atomic<std::size_t> cap{initial_threads()};
    return cap;
}
}  // namespace

std::size_t max_threads()
{
    return thread_cap().load();
}

void set_max_threads(std::size_t n)
{
    thread_cap().store(n == 0 ? initial_threads() : n);
}

namespace detail
{
void run_indexed(std::size_t count, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = std::min(max_threads(), count);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++)
            body(i);
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
}
}  // namespace detail

}  // namespace infograd
