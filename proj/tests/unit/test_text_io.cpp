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

#include <cmath>
#include <filesystem>
#include <limits>

#include "infograd/text_io.hpp"

using namespace infograd;
namespace fs = std::filesystem;

namespace
{
fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("infograd_text_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}
}  // namespace

TEST_CASE("doubles round trip bit-exactly")
{
    RngStream rng(21, 0);
    for (int t = 0; t < 5000; ++t)
    {
        const double v = (rng.uniform() - 0.5) * std::pow(10.0, 40.0 * rng.uniform() - 20.0);
        CHECK(parse_double(format_double(v)) == v);
    }
    for (double v : {0.0, -0.0, 1e-310, std::numeric_limits<double>::max(), 0.1, 1.0 / 3.0})
        CHECK(std::signbit(parse_double(format_double(v))) == std::signbit(v));
    CHECK(parse_double(" +2.5\r") == 2.5);
    CHECK_THROWS_AS(parse_double("1.2.3"), Error);
    CHECK_THROWS_AS(parse_double(""), Error);
    CHECK_THROWS_AS(parse_double("nan"), Error);
    CHECK_THROWS_AS(parse_double("1,5"), Error);
    CHECK_THROWS_AS(format_double(std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("CSV matrices")
{
    Mat a(2, 3);
    a << 0.1, -2.0 / 3.0, 1e-300, 5.0, 6.25, -7e22;
    const auto text = matrix_to_csv(a);
    CHECK(parse_csv_matrix(text) == a);
    CHECK(parse_csv_matrix("1,2\n\n3,4\n") == (Mat(2, 2) << 1, 2, 3, 4).finished());
    CHECK(parse_csv_matrix("1, 2\r\n3 ,4") == (Mat(2, 2) << 1, 2, 3, 4).finished());
    CHECK_THROWS_AS(parse_csv_matrix("1,2\n3\n"), Error);
    CHECK_THROWS_AS(parse_csv_matrix(""), Error);
    CHECK_THROWS_AS(parse_csv_matrix("1,,2\n"), Error);
    CHECK_THROWS_AS(parse_csv_matrix("a,b\n"), Error);
}

TEST_CASE("CSV vectors")
{
    Vec v(3);
    v << 1.5, -0.25, 3.0;
    CHECK(parse_csv_vector(vector_to_csv(v)) == v);
    CHECK(parse_csv_vector("1.5,-0.25,3") == v);
    CHECK_THROWS_AS(parse_csv_vector("1,2\n3,4\n"), Error);
}

TEST_CASE("files")
{
    const auto dir = scratch_dir("files");
    Mat a(1, 2);
    a << 0.3, 0.7;
    write_text_file(dir / "a.csv", matrix_to_csv(a));
    CHECK(load_csv_matrix(dir / "a.csv") == a);
    try
    {
        read_text_file(dir / "missing.csv");
        FAIL("expected an io error");
    }
    catch (const Error& e)
    {
        CHECK(e.kind() == ErrorKind::io);
    }
    fs::remove_all(dir);
}

TEST_CASE("prior JSON")
{
    const auto j = nlohmann::json::parse(R"({"atoms": [1, 3], "probs": [0.5, 0.5]})");
    const auto d = prior_from_json(j);
    CHECK(d.size() == 2);
    CHECK(d.dim() == 1);
    CHECK(d.atom(1)[0] == 3.0);
    const auto back = prior_from_json(prior_to_json(d));
    CHECK(back.atom(0) == d.atom(0));
    CHECK(back.probs() == d.probs());
    CHECK_THROWS_AS(prior_from_json(nlohmann::json::parse(R"({"atoms": [[1, 2], [3]], "probs": [0.5, 0.5]})")), Error);
    CHECK_THROWS_AS(prior_from_json(nlohmann::json::parse(R"({"atoms": [1, 3]})")), Error);
    CHECK_THROWS_AS(prior_from_json(nlohmann::json::parse(R"({"atoms": [1, 3], "probs": [0.7, 0.7]})")), Error);
}

TEST_CASE("channel and design JSON with relative paths")
{
    const auto dir = scratch_dir("channels");
    fs::create_directories(dir / "sub");
    write_text_file(dir / "sub" / "phi.csv", "1,0.5\n0.2,1\n");
    write_text_file(dir / "sub" / "dark.csv", "0.1\n0.1\n");
    write_text_file(dir / "sub" / "ch.json", R"({"type": "poisson", "phi": "phi.csv", "dark": "dark.csv"})");
    const auto ch = load_channel(dir / "sub" / "ch.json");
    REQUIRE(std::holds_alternative<PoissonChannel>(ch));
    const auto& pc = std::get<PoissonChannel>(ch);
    CHECK(pc.phi()(0, 1) == 0.5);
    CHECK(pc.dark()[1] == 0.1);

    const auto inline_ch
        = channel_from_json(nlohmann::json::parse(R"({"type": "poisson", "phi": [[1, 2]], "dark": 0.3})"), dir);
    CHECK(std::get<PoissonChannel>(inline_ch).dark()[0] == 0.3);
    const auto gauss = channel_from_json(nlohmann::json::parse(R"({"type": "gaussian", "phi": [[1, 0], [0, 1]]})"), dir);
    CHECK(std::holds_alternative<GaussianChannel>(gauss));
    CHECK_THROWS_AS(channel_from_json(nlohmann::json::parse(R"({"type": "poisson", "phi": [[1]]})"), dir), Error);
    CHECK_THROWS_AS(channel_from_json(nlohmann::json::parse(R"({"type": "binary", "phi": [[1]]})"), dir), Error);
    CHECK_THROWS_AS(channel_from_json(nlohmann::json::parse(R"({"type": "poisson", "phi": "none.csv", "dark": 1})"), dir),
                    Error);

    write_text_file(dir / "sub" / "prior.json", R"({"atoms": [[1, 0], [0, 1]], "probs": [0.5, 0.5]})");
    write_text_file(dir / "sub" / "init.csv", "0.5,0.5\n");
    write_text_file(dir / "sub" / "design.json",
                    R"({"prior": "prior.json", "m": 1, "dark": 0.2, "constraint": {"kind": "row_sum", "total": 2},
                        "init": "init.csv"})");
    const auto p = load_design_problem(dir / "sub" / "design.json");
    CHECK(p.m == 1);
    CHECK(p.constraint.kind == ConstraintKind::row_sum);
    CHECK(p.constraint.row_sum == 2.0);
    REQUIRE(p.init.has_value());
    CHECK((*p.init)(0, 1) == 0.5);
    const auto q = design_problem_from_json(
        nlohmann::json::parse(R"({"prior": {"atoms": [1, 2], "probs": [0.5, 0.5]}, "m": 2, "dark": [0.1, 0.2],
                                  "constraint": "box01", "init": {"seed": 5}})"),
        dir);
    CHECK(q.init_seed == 5);
    CHECK_FALSE(q.init.has_value());
    CHECK(q.dark[1] == 0.2);
    fs::remove_all(dir);
}
