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
#include <vector>

#include "infograd/bregman.hpp"
#include "infograd/channels.hpp"
#include "infograd/input_model.hpp"
#include "infograd/numerics.hpp"
#include "infograd/rng.hpp"

namespace infograd
{

/*!
 * E[D_F(X, E[X|Y])] for the Poisson generator of the channel, summed over
 * (atom, output cell) pairs of the truncated grid. The result keeps the
 * generator's n x m orientation.
 */
Mat expected_divergence_poisson(const PoissonChannel& ch,
                                const FiniteDistribution& d,
                                double epsilon,
                                double max_cells = default_max_cells);
Mat expected_divergence_poisson_on_grid(const PoissonChannel& ch,
                                        const FiniteDistribution& d,
                                        const OutputGrid& grid,
                                        double max_cells = default_max_cells);

struct GaussianEquivalence
{
    Mat expected_divergence;  // m x n, mean of D_F(X, E[X|Y]) per sample
    Mat std_error;
    std::size_t samples = 0;
};

// Uses the draw sequence of mmse_matrix, so equal (rng, samples) pairs see the
// same (X, Y) pairs as grad_phi_gaussian.
GaussianEquivalence expected_divergence_gaussian_mc(const GaussianChannel& ch,
                                                    const FiniteDistribution& d,
                                                    std::size_t samples,
                                                    const RngStream& rng);

namespace scalar
{
/*!
 * E[D_f(X, E[X|Y])] for the scalar Poisson generator
 * f(x) = x log(phi x + lambda) - x + 1, summed over y = 0..B by a scalar loop.
 */
double poisson_expected_divergence(const std::vector<double>& atoms,
                                   const std::vector<double>& probs,
                                   double phi,
                                   double lambda,
                                   double epsilon);

/*!
 * phi E[(X - E[X|Y])^2] for Y = phi X + N(0, 1), by a scalar loop that reads
 * the same random numbers as the vector Gaussian estimators.
 */
struct GaussianScalar
{
    double value = 0.0;
    double std_error = 0.0;
};
GaussianScalar gaussian_expected_divergence(const FiniteDistribution& d,
                                            double phi,
                                            std::size_t samples,
                                            const RngStream& rng);
}  // namespace scalar

}  // namespace infograd
