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

#include "gaussian_oracle.hpp"
#include "infograd/inference.hpp"
#include "infograd/instances.hpp"
#include "oracles.hpp"

using namespace infograd;

namespace
{
Vec vec(std::initializer_list<double> v)
{
    Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

oracle::Model s1_model()
{
    return {{{1}, {3}}, {oracle::Real("0.5"), oracle::Real("0.5")}, {{1}}, {oracle::Real("0.5")}};
}
}  // namespace

TEST_CASE("posterior basics")
{
    FiniteDistribution one({vec({2.0})}, {1.0});
    const auto p1 = posterior(one, [](const Vec&) { return -3.0; });
    CHECK(p1.weights == std::vector<double>{1.0});
    FiniteDistribution two({vec({1.0}), vec({3.0})}, {0.5, 0.5});
    const auto p2 = posterior(two, [](const Vec&) { return -1.0; });
    CHECK(p2.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p2.weights[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(conditional_mean(two, p2)[0] == doctest::Approx(2.0).epsilon(1e-15));
    try
    {
        posterior(two, [](const Vec&) { return -std::numeric_limits<double>::infinity(); });
        FAIL("expected an error");
    }
    catch (const Error& e)
    {
        CHECK(std::string(e.what()).find("output outside channel support") != std::string::npos);
    }
}

TEST_CASE("S1 posterior at y = 0")
{
    const auto ref = oracle::poisson_posterior(s1_model(), {0});
    const auto post = poisson_posterior(instances::s1_channel(), instances::s1_prior(), Counts{0});
    CHECK(std::abs(post.weights[0] - oracle::to_double(ref[0])) <= 1e-15);
    CHECK(std::abs(post.weights[1] - oracle::to_double(ref[1])) <= 1e-15);
    CHECK(post.weights[0] == doctest::Approx(0.880797).epsilon(1e-6));
    CHECK(post.weights[1] == doctest::Approx(0.119203).epsilon(1e-5));

    const auto prior = instances::s1_prior();
    const double mean = conditional_mean(prior, post)[0];
    const double mean_ref = oracle::to_double(ref[0] + 3 * ref[1]);
    CHECK(std::abs(mean - mean_ref) <= 1e-15);
    CHECK(mean == doctest::Approx(1.238406).epsilon(1e-6));
    CHECK(conditional_rate(instances::s1_channel(), prior, post)[0] == doctest::Approx(1.738406).epsilon(1e-6));
}

TEST_CASE("V1 posterior against the oracle")
{
    oracle::Model md{{{1, 0}, {0, 1}, {1, 1}},
                     {oracle::Real("0.4"), oracle::Real("0.4"), oracle::Real("0.2")},
                     {{1, oracle::Real("0.5")}, {oracle::Real("0.2"), 1}},
                     {oracle::Real("0.1"), oracle::Real("0.1")}};
    const auto ch = instances::v1_channel();
    const auto d = instances::v1_prior();
    for (std::int64_t a = 0; a < 5; ++a)
        for (std::int64_t b = 0; b < 5; ++b)
        {
            const auto ref = oracle::poisson_posterior(md, {a, b});
            const auto post = poisson_posterior(ch, d, Counts{a, b});
            for (std::size_t k = 0; k < 3; ++k)
                CHECK(std::abs(post.weights[k] - oracle::to_double(ref[k])) <= 1e-14);
        }
}

TEST_CASE("impossible output is rejected")
{
    PoissonChannel ch(Mat::Constant(1, 1, 1.0), vec({0.0}));
    FiniteDistribution d({vec({0.0})}, {1.0});
    CHECK_THROWS_AS(poisson_posterior(ch, d, Counts{2}), Error);
}

TEST_CASE("conditional rate special cases")
{
    FiniteDistribution det({vec({2.0, 1.0})}, {1.0});
    PoissonChannel ch(instances::v1_channel().phi(), vec({0.1, 0.3}));
    const auto post = poisson_posterior(ch, det, Counts{1, 1});
    const Vec r = conditional_rate(ch, det, post);
    CHECK((r - ch.rates(det.atom(0))).norm() <= 1e-15);
    PoissonChannel blank(Mat::Zero(2, 2), vec({0.1, 0.3}));
    const auto d = instances::v1_prior();
    const Vec r0 = conditional_rate(blank, d, poisson_posterior(blank, d, Counts{1, 0}));
    CHECK(r0 == vec({0.1, 0.3}));
}

TEST_CASE("MMSE special cases")
{
    FiniteDistribution det({vec({2.0, 1.0})}, {1.0});
    const auto g = instances::v1_gaussian_channel();
    const auto m0 = mmse_matrix(g, det, 1000, RngStream(1, 0));
    CHECK(m0.matrix == Mat::Zero(2, 2));
    const auto s1 = instances::s1_prior();
    GaussianChannel blank(Mat::Zero(1, 1));
    const auto m1 = mmse_matrix(blank, s1, 1000, RngStream(1, 0));
    CHECK(m1.matrix(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("V1 Gaussian MMSE matrix")
{
    // Regression golden from a seeded run with 10^6 samples; the midpoint-rule
    // oracle bounds it independently.
    const auto g = instances::v1_gaussian_channel();
    const auto d = instances::v1_prior();
    const auto est = mmse_matrix(g, d, 1000000, RngStream(2026, 0));
    Mat golden(2, 2);
    golden << 0.20504502833493018, -0.13444209926461392, -0.13444209926461392, 0.20035983973359928;
    CHECK((est.matrix - golden).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(est.samples == 1000000);

    oracle::gaussian::Model2 md{{{1, 0}, {0, 1}, {1, 1}}, {0.4, 0.4, 0.2}, {{1, 0.5}, {0.2, 1}}};
    const auto ref = oracle::gaussian::integrate(md);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            CHECK(std::abs(est.matrix(r, c) - ref.mmse[r][c]) <= 4.0 * est.std_error(r, c));
}

TEST_CASE("Gaussian draws reproduce across calls")
{
    const auto g = instances::v1_gaussian_channel();
    const auto d = instances::v1_prior();
    RngStream a(11, 2), b(11, 2);
    for (int i = 0; i < 10; ++i)
    {
        const auto x = draw_gaussian(g, d, a);
        const auto y = draw_gaussian(g, d, b);
        CHECK(x.atom == y.atom);
        CHECK(x.y == y.y);
        CHECK(x.estimate == y.estimate);
        const auto post = gaussian_posterior(g, d, x.y);
        CHECK((conditional_mean(d, post) - x.estimate).norm() <= 1e-15);
    }
}
