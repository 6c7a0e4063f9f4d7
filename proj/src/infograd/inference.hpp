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
#include <functional>
#include <span>
#include <vector>

#include "infograd/channels.hpp"
#include "infograd/input_model.hpp"
#include "infograd/numerics.hpp"
#include "infograd/rng.hpp"

namespace infograd
{

/// P(X = atom_k | Y = y) for one observed output.
struct Posterior
{
    std::vector<double> weights;
    // log P(y) = log sum_k p_k P(y | atom_k)
    double log_evidence = 0.0;
};

/*!
 * Bayes rule on the prior atoms from per-atom log-likelihoods, normalized
 * through log-sum-exp. Throws when every atom has zero likelihood.
 */
Posterior posterior_from_loglik(const FiniteDistribution& d, std::span<const double> loglik);
Posterior posterior(const FiniteDistribution& d, const std::function<double(const Vec&)>& loglik);

Posterior poisson_posterior(const PoissonChannel& ch,
                            const FiniteDistribution& d,
                            std::span<const std::int64_t> y);
Posterior gaussian_posterior(const GaussianChannel& ch, const FiniteDistribution& d, const Vec& y);

Vec conditional_mean(const FiniteDistribution& d, const Posterior& post);
// E[phi X + dark | Y] = phi E[X | Y] + dark
Vec conditional_rate(const PoissonChannel& ch, const FiniteDistribution& d, const Posterior& post);

/// Monte Carlo MMSE matrix E[(X - E[X|Y])(X - E[X|Y])^T].
struct MmseEstimate
{
    Mat matrix;     // symmetrized
    Mat std_error;  // per entry
    std::size_t samples = 0;
};

MmseEstimate mmse_matrix(const GaussianChannel& ch,
                         const FiniteDistribution& d,
                         std::size_t mc_samples,
                         const RngStream& rng);

/// One (X, Y) draw through the Gaussian channel with its exact posterior mean.
struct GaussianDraw
{
    std::size_t atom = 0;
    Vec y;
    Vec estimate;  // E[X | Y = y]
};

/*!
 * Draw sequence shared by every Gaussian Monte Carlo estimator: the same
 * (rng, samples) pair reproduces the same draws across modules.
 */
GaussianDraw draw_gaussian(const GaussianChannel& ch, const FiniteDistribution& d, RngStream& rng);

}  // namespace infograd
