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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "infograd/equivalence.hpp"
#include "infograd/gradients.hpp"
#include "infograd/inference.hpp"
#include "infograd/instances.hpp"
#include "oracles.hpp"

using namespace infograd;

namespace
{
oracle::Model v1_model()
{
    return {{{1, 0}, {0, 1}, {1, 1}},
            {oracle::Real("0.4"), oracle::Real("0.4"), oracle::Real("0.2")},
            {{1, oracle::Real("0.5")}, {oracle::Real("0.2"), 1}},
            {oracle::Real("0.1"), oracle::Real("0.1")}};
}

// E[D_F(X, E[X|Y])] from the oracle posterior and divergence, n x m.
oracle::RealMat oracle_expected_divergence(const oracle::Model& md, std::int64_t bound)
{
    const std::size_t n = md.atoms[0].size(), m = md.dark.size();
    oracle::RealMat total(n, oracle::RealVec(m, 0));
    std::vector<std::int64_t> y(m, 0);
    while (true)
    {
        const auto w = oracle::poisson_posterior(md, y);
        oracle::RealVec mean(n, 0);
        for (std::size_t k = 0; k < w.size(); ++k)
            for (std::size_t j = 0; j < n; ++j)
                mean[j] += w[k] * md.atoms[k][j];
        for (std::size_t k = 0; k < w.size(); ++k)
        {
            const auto r = oracle::rates(md, k);
            oracle::Real lik = 1;
            for (std::size_t i = 0; i < m; ++i)
                lik *= oracle::pois_pmf(r[i], y[i]);
            const auto d = oracle::poisson_generator_divergence(md.phi, md.dark, md.atoms[k], mean);
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < m; ++i)
                    total[j][i] += md.probs[k] * lik * d[j][i];
        }
        std::size_t i = m;
        while (i > 0 && y[i - 1] == bound)
            y[--i] = 0;
        if (i == 0) break;
        ++y[i - 1];
    }
    return total;
}
}  // namespace

TEST_CASE("Poisson expected divergence equals the gradient")
{
    for (const auto& [ch, d] : {std::pair{instances::s1_channel(), instances::s1_prior()},
                                std::pair{instances::v1_channel(), instances::v1_prior()}})
    {
        const Mat ed = expected_divergence_poisson(ch, d, 1e-12);
        const Mat g = grad_phi_poisson(ch, d, 1e-12).grad_phi;
        CHECK(ed.rows() == ch.inputs());
        CHECK((ed.transpose() - g).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("V1 expected divergence against the oracle")
{
    const auto ref = oracle_expected_divergence(v1_model(), 24);
    const Mat ed = expected_divergence_poisson(instances::v1_channel(), instances::v1_prior(), 1e-14);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(std::abs(ed(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) - oracle::to_double(ref[j][i]))
                  <= 1e-13);
}

TEST_CASE("Gaussian expected divergence matches phi E per sample")
{
    const auto g = instances::v1_gaussian_channel();
    const auto d = instances::v1_prior();
    const RngStream rng(77, 4);
    const auto eq = expected_divergence_gaussian_mc(g, d, 50000, rng);
    const auto grad = grad_phi_gaussian(g, d, 50000, rng);
    CHECK(eq.samples == 50000);
    CHECK((eq.expected_divergence - grad.grad_phi).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("scalar reductions agree with the vector code")
{
    const std::vector<double> atoms{1.0, 3.0}, probs{0.5, 0.5};
    const double s = scalar::poisson_expected_divergence(atoms, probs, 1.0, 0.5, 1e-12);
    const Mat v = expected_divergence_poisson(instances::s1_channel(), instances::s1_prior(), 1e-12);
    CHECK(std::abs(s - v(0, 0)) <= 1e-12);

    const auto prior = instances::s1_prior();
    const RngStream rng(5, 9);
    const auto gs = scalar::gaussian_expected_divergence(prior, 0.8, 30000, rng);
    const GaussianChannel ch(Mat::Constant(1, 1, 0.8));
    const auto gv = grad_phi_gaussian(ch, prior, 30000, rng);
    CHECK(std::abs(gs.value - gv.grad_phi(0, 0)) <= 1e-12);
    CHECK(gs.std_error > 0.0);
}
