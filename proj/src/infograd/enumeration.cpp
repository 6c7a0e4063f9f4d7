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

#include "infograd/enumeration.hpp"

namespace infograd::detail
{

PoissonCellSolver::PoissonCellSolver(const PoissonChannel& ch, const FiniteDistribution& d)
{
    for (std::size_t k = 0; k < d.size(); ++k)
    {
        Vec r = ch.rates(d.atom(k));
        Vec lr(r.size());
        for (Eigen::Index i = 0; i < r.size(); ++i)
            lr[i] = r[i] > 0.0 ? std::log(r[i]) : -std::numeric_limits<double>::infinity();
        rates_.push_back(std::move(r));
        log_rates_.push_back(std::move(lr));
        log_prior_.push_back(d.prob(k) > 0.0 ? std::log(d.prob(k))
                                             : -std::numeric_limits<double>::infinity());
    }
}

double PoissonCellSolver::solve(const Counts& y,
                                std::vector<double>& weights,
                                std::vector<double>& loglik) const
{
    const std::size_t K = rates_.size();
    weights.resize(K);
    loglik.resize(K);
    double log_factorials = 0.0;
    for (auto yi : y)
        log_factorials += std::lgamma(static_cast<double>(yi) + 1.0);
    for (std::size_t k = 0; k < K; ++k)
    {
        double ll = -log_factorials;
        const Vec& r = rates_[k];
        const Vec& lr = log_rates_[k];
        for (std::size_t i = 0; i < y.size(); ++i)
        {
            const auto ii = static_cast<Eigen::Index>(i);
            if (r[ii] == 0.0)
            {
                if (y[i] != 0)
                {
                    ll = -std::numeric_limits<double>::infinity();
                    break;
                }
                continue;
            }
            ll += static_cast<double>(y[i]) * lr[ii] - r[ii];
        }
        loglik[k] = ll;
        weights[k] = log_prior_[k] + ll;
    }
    const double lev = log_sum_exp(weights);
    if (!(lev > -std::numeric_limits<double>::infinity()))
    {
        // Cell unreachable from every atom (zero-rate coordinates).
        std::fill(weights.begin(), weights.end(), 0.0);
        return lev;
    }
    for (std::size_t k = 0; k < K; ++k)
        weights[k] = std::exp(weights[k] - lev);
    return lev;
}

}  // namespace infograd::detail
