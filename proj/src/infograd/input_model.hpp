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

#include "infograd/numerics.hpp"
#include "infograd/rng.hpp"

namespace infograd
{

/*!
 * Finite-support prior on the channel input.
 *
 * Probabilities are nonnegative and sum to one within 1e-12; atoms share one
 * length and are pairwise distinct. Signed atoms are accepted here, the
 * Poisson path calls require_nonnegative().
 */
class FiniteDistribution
{
  public:
    FiniteDistribution(std::vector<Vec> atoms, std::vector<double> probs);

    std::size_t size() const { return atoms_.size(); }
    Eigen::Index dim() const { return atoms_.front().size(); }
    const Vec& atom(std::size_t k) const { return atoms_[k]; }
    double prob(std::size_t k) const { return probs_[k]; }
    const std::vector<Vec>& atoms() const { return atoms_; }
    const std::vector<double>& probs() const { return probs_; }

    Vec mean() const;
    double min_prob_positive() const;
    bool is_deterministic() const;

    bool is_nonnegative() const;
    void require_nonnegative() const;

    std::size_t sample_index(RngStream& rng) const;
    const Vec& sample(RngStream& rng) const { return atoms_[sample_index(rng)]; }

  private:
    std::vector<Vec> atoms_;
    std::vector<double> probs_;
    std::vector<double> cdf_;
};

}  // namespace infograd
