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
#include <string_view>

#include "infograd/channels.hpp"
#include "infograd/input_model.hpp"
#include "infograd/rng.hpp"

namespace infograd
{

enum class MiMethod
{
    enumeration,
    quadrature,
    monte_carlo,
};

std::string_view to_string(MiMethod m);
MiMethod parse_mi_method(std::string_view name);

/// Mutual information in nats.
struct MiEstimate
{
    double value = 0.0;
    MiMethod method = MiMethod::enumeration;
    // Deterministic bound for enumeration and quadrature, standard error for MC.
    double error_bound = 0.0;
    double truncation_mass_deficit = 0.0;
    std::size_t budget = 0;  // grid cells, nodes per axis or samples
};

/*!
 * Exact sum over the truncated output grid. The dropped cells contribute a
 * value in [0, deficit * log(1 / min_k p_k)], which is reported as the
 * error bound.
 */
MiEstimate mi_poisson_enum(const PoissonChannel& ch,
                           const FiniteDistribution& d,
                           double epsilon,
                           double max_cells = default_max_cells);
MiEstimate mi_poisson_on_grid(const PoissonChannel& ch,
                              const FiniteDistribution& d,
                              const OutputGrid& grid,
                              double max_cells = default_max_cells);
MiEstimate mi_poisson_mc(const PoissonChannel& ch,
                         const FiniteDistribution& d,
                         std::size_t budget,
                         const RngStream& rng);

inline constexpr std::size_t default_quadrature_nodes = 64;

// budget: samples for monte_carlo, Gauss-Hermite nodes per axis for quadrature.
MiEstimate mi_gaussian(const GaussianChannel& ch,
                       const FiniteDistribution& d,
                       MiMethod method,
                       std::size_t budget,
                       const RngStream& rng);
MiEstimate mi_gaussian_quadrature(const GaussianChannel& ch,
                                  const FiniteDistribution& d,
                                  std::size_t nodes = default_quadrature_nodes);
MiEstimate mi_gaussian_mc(const GaussianChannel& ch,
                          const FiniteDistribution& d,
                          std::size_t budget,
                          const RngStream& rng);

/// Nodes and weights for E[f(Z)], Z ~ N(0, 1); weights sum to one.
struct GaussHermiteRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussHermiteRule gauss_hermite_rule(std::size_t n);

}  // namespace infograd
