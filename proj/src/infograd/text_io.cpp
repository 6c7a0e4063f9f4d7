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

#include "infograd/text_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace infograd
{

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v)
{
    if (!std::isfinite(v)) throw_numerical("cannot format a non-finite value");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc()) throw_numerical("number formatting failed");
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
        throw_invalid("malformed number '" + std::string(text) + "'");
    return v;
}

std::string matrix_to_csv(const Mat& a)
{
    std::string out;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < a.cols(); ++j)
        {
            if (j) out += ',';
            out += format_double(a(i, j));
        }
        out += '\n';
    }
    return out;
}

Mat parse_csv_matrix(std::string_view text)
{
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    while (!text.empty())
    {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        std::vector<double> row;
        while (true)
        {
            const auto comma = line.find(',');
            try
            {
                row.push_back(parse_double(line.substr(0, comma)));
            }
            catch (const Error& e)
            {
                throw_invalid("CSV line " + std::to_string(line_no) + ": " + e.what());
            }
            if (comma == std::string_view::npos) break;
            line = line.substr(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw_invalid("CSV line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                          " values, expected " + std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    require(!rows.empty(), "CSV matrix is empty");
    Mat a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return a;
}

std::string vector_to_csv(const Vec& v)
{
    return matrix_to_csv(Mat(v));
}

Vec parse_csv_vector(std::string_view text)
{
    const Mat a = parse_csv_matrix(text);
    if (a.cols() == 1) return a.col(0);
    if (a.rows() == 1) return a.row(0).transpose();
    throw_invalid("CSV vector must be a single row or a single column");
}

std::string read_text_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorKind::io, "cannot read '" + path.string() + "'");
    return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
}

Mat load_csv_matrix(const fs::path& path)
{
    try
    {
        return parse_csv_matrix(read_text_file(path));
    }
    catch (const Error& e)
    {
        if (e.kind() == ErrorKind::io) throw;
        throw_invalid(path.string() + ": " + e.what());
    }
}

Vec load_csv_vector(const fs::path& path)
{
    try
    {
        return parse_csv_vector(read_text_file(path));
    }
    catch (const Error& e)
    {
        if (e.kind() == ErrorKind::io) throw;
        throw_invalid(path.string() + ": " + e.what());
    }
}

namespace
{
json parse_json_file(const fs::path& path)
{
    const std::string text = read_text_file(path);
    try
    {
        return json::parse(text);
    }
    catch (const json::exception& e)
    {
        throw_invalid(path.string() + ": " + e.what());
    }
}

double number(const json& j, const std::string& what)
{
    if (!j.is_number()) throw_invalid(what + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw_invalid(what + " must be finite");
    return v;
}

Vec number_array(const json& j, const std::string& what)
{
    if (!j.is_array()) throw_invalid(what + " must be an array of numbers");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = number(j[i], what + "[" + std::to_string(i) + "]");
    return v;
}

Mat nested_rows(const json& j, const std::string& what)
{
    if (!j.is_array() || j.empty()) throw_invalid(what + " must be a non-empty array of rows");
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < j.size(); ++i)
        rows.push_back(number_array(j[i], what + "[" + std::to_string(i) + "]"));
    Mat a(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        if (rows[i].size() != a.cols()) throw_invalid(what + " rows must have equal length");
        a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return a;
}

fs::path resolve(const fs::path& base_dir, const std::string& rel)
{
    const fs::path p(rel);
    return p.is_absolute() ? p : base_dir / p;
}

Mat matrix_field(const json& j, const std::string& what, const fs::path& base_dir)
{
    if (j.is_string()) return load_csv_matrix(resolve(base_dir, j.get<std::string>()));
    return nested_rows(j, what);
}

Vec vector_field(const json& j, const std::string& what, const fs::path& base_dir, Eigen::Index broadcast)
{
    if (j.is_string()) return load_csv_vector(resolve(base_dir, j.get<std::string>()));
    if (j.is_number()) return Vec::Constant(broadcast, number(j, what));
    return number_array(j, what);
}

const json& field(const json& j, const char* key, const std::string& what)
{
    if (!j.is_object()) throw_invalid(what + " must be a JSON object");
    const auto it = j.find(key);
    if (it == j.end()) throw_invalid(what + " is missing \"" + key + "\"");
    return *it;
}

fs::path parent_of(const fs::path& path)
{
    const fs::path parent = path.parent_path();
    return parent.empty() ? fs::path(".") : parent;
}
}  // namespace

FiniteDistribution prior_from_json(const json& j)
{
    const json& atoms = field(j, "atoms", "prior");
    const json& probs = field(j, "probs", "prior");
    if (!atoms.is_array()) throw_invalid("prior atoms must be an array");
    std::vector<Vec> xs;
    for (std::size_t k = 0; k < atoms.size(); ++k)
    {
        // Scalar atoms may be written as plain numbers.
        if (atoms[k].is_number())
            xs.push_back(Vec::Constant(1, number(atoms[k], "atoms[" + std::to_string(k) + "]")));
        else
            xs.push_back(number_array(atoms[k], "atoms[" + std::to_string(k) + "]"));
    }
    const Vec p = number_array(probs, "probs");
    return FiniteDistribution(std::move(xs), std::vector<double>(p.data(), p.data() + p.size()));
}

json prior_to_json(const FiniteDistribution& d)
{
    json atoms = json::array();
    for (const auto& a : d.atoms())
        atoms.push_back(std::vector<double>(a.data(), a.data() + a.size()));
    return {{"atoms", atoms}, {"probs", d.probs()}};
}

FiniteDistribution load_prior(const fs::path& path)
{
    try
    {
        return prior_from_json(parse_json_file(path));
    }
    catch (const Error& e)
    {
        if (e.kind() == ErrorKind::io) throw;
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

AnyChannel channel_from_json(const json& j, const fs::path& base_dir)
{
    const json& type = field(j, "type", "channel");
    if (!type.is_string()) throw_invalid("channel type must be a string");
    const std::string kind = type.get<std::string>();
    const Mat phi = matrix_field(field(j, "phi", "channel"), "phi", base_dir);
    if (kind == "poisson")
        return PoissonChannel(phi, vector_field(field(j, "dark", "channel"), "dark", base_dir, phi.rows()));
    if (kind == "gaussian") return GaussianChannel(phi);
    throw_invalid("unknown channel type '" + kind + "' (expected poisson or gaussian)");
}

AnyChannel load_channel(const fs::path& path)
{
    try
    {
        return channel_from_json(parse_json_file(path), parent_of(path));
    }
    catch (const Error& e)
    {
        if (e.kind() == ErrorKind::io) throw;
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

DesignProblem design_problem_from_json(const json& j, const fs::path& base_dir)
{
    const json& prior_j = field(j, "prior", "design problem");
    FiniteDistribution prior = prior_j.is_string() ? load_prior(resolve(base_dir, prior_j.get<std::string>()))
                                                   : prior_from_json(prior_j);

    const json& m_j = field(j, "m", "design problem");
    if (!m_j.is_number_integer() || m_j.get<long long>() < 1) throw_invalid("m must be a positive integer");
    const auto m = static_cast<Eigen::Index>(m_j.get<long long>());

    Constraint constraint;
    if (const auto it = j.find("constraint"); it != j.end())
    {
        if (it->is_string())
        {
            constraint.kind = parse_constraint_kind(it->get<std::string>());
        }
        else
        {
            const json& kind = field(*it, "kind", "constraint");
            if (!kind.is_string()) throw_invalid("constraint kind must be a string");
            constraint.kind = parse_constraint_kind(kind.get<std::string>());
            if (const auto total = it->find("total"); total != it->end())
                constraint.row_sum = number(*total, "constraint total");
        }
        if (constraint.kind == ConstraintKind::row_sum && it->is_string())
            throw_invalid("row_sum constraint needs {\"kind\": \"row_sum\", \"total\": c}");
    }

    DesignProblem p{std::move(prior), m, vector_field(field(j, "dark", "design problem"), "dark", base_dir, m),
                    constraint, std::nullopt, 0};
    if (const auto it = j.find("init"); it != j.end())
    {
        if (it->is_object())
        {
            const json& seed = field(*it, "seed", "init");
            if (!seed.is_number_unsigned()) throw_invalid("init seed must be a nonnegative integer");
            p.init_seed = seed.get<std::uint64_t>();
        }
        else
        {
            p.init = matrix_field(*it, "init", base_dir);
        }
    }
    p.validate();
    return p;
}

DesignProblem load_design_problem(const fs::path& path)
{
    try
    {
        return design_problem_from_json(parse_json_file(path), parent_of(path));
    }
    catch (const Error& e)
    {
        if (e.kind() == ErrorKind::io) throw;
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

}  // namespace infograd
