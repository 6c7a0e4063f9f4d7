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

#include "infograd/inference.hpp"

#include "infograd/parallel.hpp"

namespace infograd
{

Posterior posterior_from_loglik(const FiniteDistribution& d, std::span<const double> loglik)
{
    require(loglik.size() == d.size(), "one log-likelihood per atom is required");
    std::vector<double> joint(d.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        joint[k] = d.prob(k) > 0.0 ? std::log(d.prob(k)) + loglik[k]
                                   : -std::numeric_limits<double>::infinity();
    Posterior post;
    post.log_evidence = log_sum_exp(joint);
    if (!(post.log_evidence > -std::numeric_limits<double>::infinity()))
        throw_invalid("output outside channel support");
    if (!std::isfinite(post.log_evidence)) throw_numerical("non-finite posterior evidence");
    post.weights.resize(d.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        post.weights[k] = std::exp(joint[k] - post.log_evidence);
    return post;
}

Posterior posterior(const FiniteDistribution& d, const std::function<double(const Vec&)>& loglik)
{
    std::vector<double> ll(d.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        ll[k] = loglik(d.atom(k));
    return posterior_from_loglik(d, ll);
}

Posterior poisson_posterior(const PoissonChannel& ch,
                            const FiniteDistribution& d,
                            std::span<const std::int64_t> y)
{
    std::vector<double> ll(d.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        ll[k] = poisson_log_pmf(ch, d.atom(k), y);
    return posterior_from_loglik(d, ll);
}

Posterior gaussian_posterior(const GaussianChannel& ch, const FiniteDistribution& d, const Vec& y)
{
    std::vector<double> ll(d.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        ll[k] = gaussian_log_pdf(ch, d.atom(k), y);
    return posterior_from_loglik(d, ll);
}

Vec conditional_mean(const FiniteDistribution& d, const Posterior& post)
{
    require(post.weights.size() == d.size(), "posterior does not match the prior");
    Vec m = Vec::Zero(d.dim());
    for (std::size_t k = 0; k < d.size(); ++k)
        m += post.weights[k] * d.atom(k);
    return m;
}

Vec conditional_rate(const PoissonChannel& ch, const FiniteDistribution& d, const Posterior& post)
{
    return ch.rates(conditional_mean(d, post));
}

GaussianDraw draw_gaussian(const GaussianChannel& ch, const FiniteDistribution& d, RngStream& rng)
{
    GaussianDraw draw;
    draw.atom = d.sample_index(rng);
    draw.y = gaussian_sample(ch, d.atom(draw.atom), rng);
    draw.estimate = conditional_mean(d, gaussian_posterior(ch, d, draw.y));
    return draw;
}

MmseEstimate mmse_matrix(const GaussianChannel& ch,
                         const FiniteDistribution& d,
                         std::size_t mc_samples,
                         const RngStream& rng)
{
    require(mc_samples >= 1, "mc_samples must be at least 1");
    ch.require_compatible(d);
    const auto n = d.dim();
    MatMoments moments = mc_reduce(mc_samples, rng, MatMoments(n, n),
                                   [&](MatMoments& acc, RngStream& stream) {
                                       const GaussianDraw draw = draw_gaussian(ch, d, stream);
                                       const Vec e = d.atom(draw.atom) - draw.estimate;
                                       acc.add(e * e.transpose());
                                   });
    MmseEstimate out;
    const Mat raw = moments.mean();
    out.matrix = 0.5 * (raw + raw.transpose());
    out.std_error = moments.std_error();
    out.samples = moments.count();
    return out;
}

}  // namespace infograd
