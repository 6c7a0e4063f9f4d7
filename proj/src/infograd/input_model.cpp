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

#include "infograd/input_model.hpp"

#include <algorithm>
#include <sstream>

namespace infograd
{

FiniteDistribution::FiniteDistribution(std::vector<Vec> atoms, std::vector<double> probs)
    : atoms_(std::move(atoms)), probs_(std::move(probs))
{
    require(!atoms_.empty(), "distribution needs at least one atom");
    require(atoms_.size() == probs_.size(), "atom and probability counts differ");
    const auto n = atoms_.front().size();
    require(n > 0, "atoms must have positive length");
    CompensatedSum total;
    for (std::size_t k = 0; k < atoms_.size(); ++k)
    {
        std::ostringstream os;
        os << "atom " << k;
        require(atoms_[k].size() == n, os.str() + " has a different length");
        require(all_finite(atoms_[k]), os.str() + " has non-finite entries");
        require(std::isfinite(probs_[k]) && probs_[k] >= 0.0,
                os.str() + " has a negative or non-finite probability");
        total += probs_[k];
    }
    if (std::abs(total.value() - 1.0) > 1e-12)
    {
        std::ostringstream os;
        os.precision(17);
        os << "probabilities sum to " << total.value() << ", expected 1 within 1e-12";
        throw_invalid(os.str());
    }
    for (std::size_t a = 0; a < atoms_.size(); ++a)
        for (std::size_t b = a + 1; b < atoms_.size(); ++b)
            if (atoms_[a] == atoms_[b])
            {
                std::ostringstream os;
                os << "atoms " << a << " and " << b << " coincide";
                throw_invalid(os.str());
            }

    cdf_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k)
    {
        acc += probs_[k];
        cdf_[k] = acc;
    }
}

Vec FiniteDistribution::mean() const
{
    Vec m = Vec::Zero(dim());
    for (std::size_t k = 0; k < atoms_.size(); ++k)
        m += probs_[k] * atoms_[k];
    return m;
}

double FiniteDistribution::min_prob_positive() const
{
    double lo = 1.0;
    for (double p : probs_)
        if (p > 0.0) lo = std::min(lo, p);
    return lo;
}

bool FiniteDistribution::is_deterministic() const
{
    return std::count_if(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; })
           == 1;
}

bool FiniteDistribution::is_nonnegative() const
{
    return std::all_of(atoms_.begin(), atoms_.end(),
                       [](const Vec& a) { return (a.array() >= 0.0).all(); });
}

void FiniteDistribution::require_nonnegative() const
{
    require(is_nonnegative(), "Poisson channel inputs must have nonnegative atom entries");
}

std::size_t FiniteDistribution::sample_index(RngStream& rng) const
{
    const double u = rng.uniform() * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    auto k = static_cast<std::size_t>(it - cdf_.begin());
    return std::min(k, cdf_.size() - 1);
}

}  // namespace infograd
