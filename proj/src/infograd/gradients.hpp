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
#include <optional>
#include <string_view>
#include <vector>

#include "infograd/channels.hpp"
#include "infograd/information.hpp"
#include "infograd/input_model.hpp"
#include "infograd/rng.hpp"

namespace infograd
{

enum class GradMethod
{
    theorem,
    finite_difference,
    monte_carlo,
    gaussian_mmse,
};

enum class ChannelKind
{
    poisson,
    gaussian,
};

std::string_view to_string(GradMethod m);
std::string_view to_string(ChannelKind k);

/*!
 * Gradient of I(X;Y) with respect to the scaling matrix (m x n, entry (i,j)
 * is dI/dphi_ij) and, for the Poisson channel, the dark current.
 *
 * For the theorem and Monte Carlo methods the gradient is reported as the
 * difference of its two expectations, prior_term - posterior_term:
 *   phi:  E[X_j log r_i(X)]  -  E[E[X_j|Y] log E[r_i(X)|Y]]
 *   dark: E[log r_i(X)]      -  E[log E[r_i(X)|Y]]
 * with r(x) = phi x + dark.
 */
struct GradientReport
{
    ChannelKind channel_kind = ChannelKind::poisson;
    GradMethod method = GradMethod::theorem;

    Mat grad_phi;
    Mat phi_error;
    std::optional<Vec> grad_dark;
    std::optional<Vec> dark_error;

    Mat phi_prior_term;
    Mat phi_posterior_term;
    Vec dark_prior_term;
    Vec dark_posterior_term;

    double truncation_mass_deficit = 0.0;
    std::size_t budget = 0;
};

// Both gradients by exact grid enumeration; needs dark > 0.
GradientReport grad_poisson(const PoissonChannel& ch,
                            const FiniteDistribution& d,
                            double epsilon,
                            double max_cells = default_max_cells);
GradientReport grad_poisson_on_grid(const PoissonChannel& ch,
                                    const FiniteDistribution& d,
                                    const OutputGrid& grid,
                                    double max_cells = default_max_cells);
// grad_poisson without the dark-current block.
GradientReport grad_phi_poisson(const PoissonChannel& ch,
                                const FiniteDistribution& d,
                                double epsilon,
                                double max_cells = default_max_cells);
GradientReport grad_dark_poisson(const PoissonChannel& ch,
                                 const FiniteDistribution& d,
                                 double epsilon,
                                 double max_cells = default_max_cells);

// Same expectations from sampled (X, Y) pairs with exact posteriors.
GradientReport grad_phi_poisson_mc(const PoissonChannel& ch,
                                   const FiniteDistribution& d,
                                   std::size_t budget,
                                   const RngStream& rng);

// phi * E with E the Monte Carlo MMSE matrix.
GradientReport grad_phi_gaussian(const GaussianChannel& ch,
                                 const FiniteDistribution& d,
                                 std::size_t mc_samples,
                                 const RngStream& rng);

struct FdTarget
{
    enum class Param
    {
        phi,
        dark,
    };
    Param param = Param::phi;
    Eigen::Index row = 0;
    Eigen::Index col = 0;

    static FdTarget phi_entry(Eigen::Index i, Eigen::Index j) { return {Param::phi, i, j}; }
    static FdTarget dark_entry(Eigen::Index i) { return {Param::dark, i, 0}; }
};

enum class FdScheme
{
    // Central difference, or forward difference with Richardson
    // extrapolation when a nonnegative parameter is below 2h.
    automatic,
    // Central difference only; leaving the domain is an error.
    central,
};

struct FdOptions
{
    double epsilon = 1e-12;  // Poisson grid truncation, grid fixed at the base point
    std::size_t quadrature_nodes = default_quadrature_nodes;
    FdScheme scheme = FdScheme::automatic;
    double max_cells = default_max_cells;
};

struct FdResult
{
    double derivative = 0.0;
    // Propagated MI truncation/discretization bound.
    double error = 0.0;
    bool forward = false;
};

FdResult grad_fd(const PoissonChannel& ch,
                 const FiniteDistribution& d,
                 FdTarget target,
                 double h,
                 const FdOptions& opts = {});
FdResult grad_fd(const GaussianChannel& ch,
                 const FiniteDistribution& d,
                 FdTarget target,
                 double h,
                 const FdOptions& opts = {});

// Every entry by finite differences; h <= 0 selects default_fd_step per entry.
GradientReport grad_fd_poisson(const PoissonChannel& ch,
                               const FiniteDistribution& d,
                               double h,
                               const FdOptions& opts = {});
GradientReport grad_fd_gaussian(const GaussianChannel& ch,
                                const FiniteDistribution& d,
                                double h,
                                const FdOptions& opts = {});

namespace scalar
{
/// dI/dphi and dI/dlambda of the scalar Poisson channel Pois(phi X + lambda).
struct PoissonDerivatives
{
    double dphi = 0.0;
    double dlambda = 0.0;
};

// Scalar-only evaluation over y = 0..B, independent of the vector code.
PoissonDerivatives poisson_derivatives(const std::vector<double>& atoms,
                                       const std::vector<double>& probs,
                                       double phi,
                                       double lambda,
                                       double epsilon);
}  // namespace scalar

}  // namespace infograd
