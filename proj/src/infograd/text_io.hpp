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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "infograd/channels.hpp"
#include "infograd/design.hpp"
#include "infograd/input_model.hpp"
#include "infograd/numerics.hpp"

namespace infograd
{

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

/*!
 * CSV matrices: one row per line, comma separated, no header, '.' decimal
 * separator. Blank lines are ignored; all rows must have equal length.
 */
std::string matrix_to_csv(const Mat& a);
Mat parse_csv_matrix(std::string_view text);
// A vector is written as one column; either one row or one column parses.
std::string vector_to_csv(const Vec& v);
Vec parse_csv_vector(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
Mat load_csv_matrix(const std::filesystem::path& path);
Vec load_csv_vector(const std::filesystem::path& path);

// {"atoms": [[...], ...], "probs": [...]}
FiniteDistribution prior_from_json(const nlohmann::json& j);
nlohmann::json prior_to_json(const FiniteDistribution& d);
FiniteDistribution load_prior(const std::filesystem::path& path);

/*!
 * {"type": "poisson" | "gaussian", "phi": <CSV path | nested rows>,
 *  "dark": <CSV path | array | scalar>}. Relative paths resolve against the
 * directory of the JSON file. The dark current is required for Poisson.
 */
using AnyChannel = std::variant<PoissonChannel, GaussianChannel>;
AnyChannel channel_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
AnyChannel load_channel(const std::filesystem::path& path);

/*!
 * {"prior": <path | inline prior>, "m": count, "dark": <array | scalar>,
 *  "constraint": "box01" | "nonneg" | {"kind": "row_sum", "total": c},
 *  "init": <CSV path | nested rows | {"seed": s}>}
 */
DesignProblem design_problem_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
DesignProblem load_design_problem(const std::filesystem::path& path);

}  // namespace infograd
