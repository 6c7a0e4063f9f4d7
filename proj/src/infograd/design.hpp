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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infograd/channels.hpp"
#include "infograd/information.hpp"
#include "infograd/input_model.hpp"
#include "infograd/numerics.hpp"

namespace infograd
{

enum class ConstraintKind
{
    box01,    // 0 <= phi_ij <= 1
    nonneg,   // phi_ij >= 0
    row_sum,  // phi_ij >= 0, sum_j phi_ij = c for every row
};

std::string_view to_string(ConstraintKind k);
ConstraintKind parse_constraint_kind(std::string_view name);

struct Constraint
{
    ConstraintKind kind = ConstraintKind::box01;
    double row_sum = 1.0;  // used by ConstraintKind::row_sum only

    void validate() const;
};

// Euclidean projection onto the constraint set.
Mat project(const Constraint& c, const Mat& phi);
// Projection of v onto {w >= 0, sum w = total}.
Vec project_row_simplex(const Vec& v, double total);

struct DesignProblem
{
    FiniteDistribution prior;
    Eigen::Index m = 1;
    Vec dark;  // fixed during design, entries > 0
    Constraint constraint;
    std::optional<Mat> init;  // m x n; drawn from init_seed when absent
    std::uint64_t init_seed = 0;

    void validate() const;
    // init, or the seeded uniform draw projected onto the constraint set.
    Mat initial_phi() const;
};

struct DesignOptions
{
    std::size_t max_iters = 100;
    double tol = 1e-6;
    MiMethod mi_method = MiMethod::enumeration;
    std::size_t budget = 100000;  // Monte Carlo samples per evaluation
    std::uint64_t seed = 0;       // common random numbers for Monte Carlo
    double epsilon = 1e-10;       // grid truncation for enumeration
    double max_cells = default_max_cells;
};

struct DesignIteration
{
    std::size_t iteration = 0;
    double mi = 0.0;
    double grad_norm = 0.0;
    // ||Proj(phi + grad) - phi||, zero at a constrained stationary point.
    double projected_grad_norm = 0.0;
    double step = 0.0;
    bool accepted = false;
};

struct DesignTrace
{
    std::vector<DesignIteration> iterations;
    Mat phi;
    double mi = 0.0;
    std::string stop_reason;

    // MI values of the initial point and every accepted step.
    std::vector<double> accepted_mi() const;
};

/*!
 * Projected gradient ascent on I(X;Y) over phi with the dark current held
 * fixed. Each step backtracks from eta = 1 by halving until the MI increases
 * or eta < 1e-8; the ascent stops when the relative gain drops below tol, the
 * projected gradient vanishes to tol * (1 + |MI|), or max_iters is reached.
 */
DesignTrace design_phi(const DesignProblem& p, const DesignOptions& opts);

// MI of the Poisson channel with the problem's prior and dark current.
MiEstimate design_mi(const DesignProblem& p, const Mat& phi, const DesignOptions& opts);

// Entry-wise 1 where phi >= threshold, else 0; phi must lie in [0, 1].
Mat round_to_binary(const Mat& phi, double threshold);

struct RoundingReport
{
    Mat binary;
    double relaxed_mi = 0.0;
    double binary_mi = 0.0;
    double gap = 0.0;  // relaxed_mi - binary_mi
};

RoundingReport rounding_gap(const DesignProblem& p,
                            const Mat& phi,
                            double threshold,
                            const DesignOptions& opts);

}  // namespace infograd
