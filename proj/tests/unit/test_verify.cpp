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

#include <doctest.h>

#include "infograd/parallel.hpp"
#include "infograd/verify.hpp"

using namespace infograd;

TEST_CASE("verify suites pass and are deterministic")
{
    const auto a = run_verify(VerifySuite::all, 7);
    for (const auto& c : a.checks)
        CHECK_MESSAGE((!c.asserted || c.passed), c.name);
    CHECK(a.passed());
    set_max_threads(1);
    const auto b = run_verify(VerifySuite::all, 7);
    set_max_threads(0);
    CHECK(a.to_json().dump() == b.to_json().dump());
    const auto other = run_verify(VerifySuite::bregman, 8);
    CHECK(other.passed());
    CHECK(other.checks.size() < a.checks.size());
}

TEST_CASE("suite names")
{
    CHECK(parse_verify_suite("gradients") == VerifySuite::gradients);
    CHECK(to_string(VerifySuite::all) == "all");
    CHECK_THROWS(parse_verify_suite("everything"));
}
