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

#include "infograd/bregman.hpp"
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

MatrixGenerator stacked_positive()
{
    using namespace generators;
    return stacked_generator({negative_entropy(), burg_entropy(), squared_norm(), exponential()}, 2, 2, 2);
}

// Real domain, so the V1 atoms with zero coordinates are admissible.
MatrixGenerator stacked_real()
{
    using namespace generators;
    return stacked_generator({squared_norm(), exponential(), half_squared_norm(), exponential()}, 2, 2, 2);
}
}  // namespace

TEST_CASE("classical divergence examples")
{
    using namespace generators;
    CHECK(bregman_scalar(squared_norm(), vec({1, 2}), vec({0, 0})) == 5.0);
    const double kl = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
    CHECK(bregman_scalar(negative_entropy(), vec({0.5, 0.5}), vec({0.9, 0.1})) == doctest::Approx(kl).epsilon(1e-14));
    CHECK(kl == doctest::Approx(0.510826).epsilon(1e-6));
    for (const auto& g : closed_form_catalog())
    {
        const Vec x = g.domain == Domain::negative ? vec({-0.4, -2.0}) : vec({0.4, 2.0});
        CHECK(bregman_scalar(g, x, x) == 0.0);
    }
    CHECK_THROWS_AS(bregman_scalar(negative_entropy(), vec({-1.0}), vec({1.0})), Error);
    CHECK_THROWS_AS(bregman_scalar(burg_entropy(), vec({1.0}), vec({0.0})), Error);
    CHECK_THROWS_AS(bregman_scalar(squared_norm(), vec({1.0}), vec({1.0, 2.0})), Error);
    CHECK_THROWS_AS(by_name("nope"), Error);
    CHECK(by_name("itakura_saito").name == burg_entropy().name);
}

TEST_CASE("Legendre duality at a closed-form point")
{
    const auto g = generators::unnormalized_entropy();
    const auto dual = legendre_dual(g);
    const Vec x = vec({2.0}), y = vec({0.5});
    const double expect = 2.0 * std::log(4.0) - 1.5;
    CHECK(bregman_scalar(g, x, y) == doctest::Approx(expect).epsilon(1e-15));
    CHECK(bregman_scalar(dual, vec({std::log(0.5)}), vec({std::log(2.0)})) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(duality_gap(g, dual, x, y) <= 1e-14);
}

TEST_CASE("Legendre duality on random pairs")
{
    RngStream rng(31, 0);
    for (const auto& g : generators::closed_form_catalog())
    {
        const auto dual = legendre_dual(g);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t)
        {
            const Vec x = sample_domain(g.domain, 3, rng);
            const Vec y = sample_domain(g.domain, 3, rng);
            worst = std::max(worst, duality_gap(g, dual, x, y));
        }
        CHECK_MESSAGE(worst <= 1e-9, g.name);
    }
}

TEST_CASE("numerical conjugate of a separable generator")
{
    auto g = generators::unnormalized_entropy();
    g.conjugate.reset();
    const auto dual = legendre_dual(g);
    const auto closed = legendre_dual(generators::unnormalized_entropy());
    RngStream rng(32, 0);
    for (int t = 0; t < 200; ++t)
    {
        const Vec s = sample_domain(Domain::real, 2, rng);
        CHECK(std::abs(dual.eval(s) - closed.eval(s)) <= 1e-10 * (1.0 + std::abs(closed.eval(s))));
    }
    auto flat = generators::squared_norm();
    flat.conjugate.reset();
    flat.grad = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
    flat.eval = [](const Vec&) { return 0.0; };
    const auto bad = legendre_dual(flat);
    CHECK_THROWS_AS(bad.grad(vec({1.0})), Error);
}

TEST_CASE("Gaussian generator identity")
{
    const auto g = gaussian_generator(Mat::Identity(2, 2));
    const Mat d = bregman_generalized(g, vec({1.5, 0.2}), vec({0.5, -0.8}));
    Mat expect(2, 2);
    expect << 1, 1, 1, 1;
    CHECK((d - expect).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(bregman_generalized(g, vec({0.3, 0.3}), vec({0.3, 0.3})) == Mat::Zero(2, 2));
    CHECK(g.convex_in_cone);
    CHECK(g.cone == ConeKind::psd_square);
    const auto gv = gaussian_generator(instances::v1_gaussian_channel().phi());
    CHECK_FALSE(gv.convex_in_cone);
    const Vec x = vec({1.0, 0.0}), y = vec({0.6, 0.6});
    const Mat expect_v = instances::v1_gaussian_channel().phi() * (x - y) * (x - y).transpose();
    CHECK((bregman_generalized(gv, x, y) - expect_v).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("Poisson generator against the direct expansion")
{
    const auto ch = instances::v1_channel();
    const auto g = poisson_generator(ch.phi(), ch.dark());
    CHECK(g.orientation == Orientation::input_by_output);
    CHECK(g.rows == 2);
    const Mat d = bregman_generalized(g, vec({1.0, 0.0}), vec({0.6, 0.6}));
    const oracle::RealMat phi{{1, oracle::Real("0.5")}, {oracle::Real("0.2"), 1}};
    const oracle::RealVec dark{oracle::Real("0.1"), oracle::Real("0.1")};
    const auto ref = oracle::poisson_generator_divergence(phi, dark, {1, 0}, {oracle::Real("0.6"), oracle::Real("0.6")});
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
            CHECK(std::abs(d(j, i) - oracle::to_double(ref[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])) <= 1e-15);
    CHECK(to_gradient_orientation(g, d) == d.transpose());
    CHECK_THROWS_AS(poisson_generator(ch.phi(), vec({0.1, 0.0})), Error);
}

TEST_CASE("scalar Poisson generator at unit gain")
{
    const auto g = poisson_generator(Mat::Constant(1, 1, 1.0), vec({1e-300}));
    CHECK(std::abs(g.eval(vec({1.0}))(0, 0)) <= 1e-15);
    CHECK(g.eval(vec({2.0}))(0, 0) == doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("Frechet derivative")
{
    const auto ch = instances::v1_channel();
    const auto g = poisson_generator(ch.phi(), ch.dark());
    const Vec y = vec({0.6, 0.6}), h = vec({1e-3, -1e-3});
    const Mat exact = g.frechet(y, h);
    const Mat fd = (g.eval(y + h) - g.eval(y - h)) / 2.0;
    CHECK((exact - fd).norm() / exact.norm() <= 1e-6);
    CHECK(g.frechet(y, 2.0 * h) == 2.0 * exact);
    const auto rep = check_frechet(g, 200, RngStream(3, 0));
    CHECK(rep.max_relative_error <= 1e-6);
    const auto rep2 = check_frechet(stacked_positive(), 200, RngStream(3, 0));
    CHECK(rep2.max_relative_error <= 1e-6);
}

TEST_CASE("property sweeps")
{
    const auto stacked = stacked_positive();
    using namespace generators;
    const auto companion
        = stacked_generator({half_squared_norm(), unnormalized_entropy(), exponential(), squared_norm()}, 2, 2, 2);
    const auto rs = check_properties(stacked, ConeOrder(ConeKind::entrywise_nonneg), 10000, RngStream(4, 0), &companion);
    CHECK(rs.asserted);
    CHECK(rs.trials == 10000);
    CHECK(rs.violations() == 0);
    CHECK(rs.max_linearity_residual <= 1e-10);

    const auto gauss = gaussian_generator(Mat::Identity(2, 2));
    const auto rg = check_properties(gauss, ConeOrder(ConeKind::psd_square), 10000, RngStream(5, 0));
    CHECK(rg.violations() == 0);

    // Not declared convex: the sweep runs and records what it finds.
    const auto ch = instances::v1_channel();
    const auto rp = check_properties(poisson_generator(ch.phi(), ch.dark()), ConeOrder(ConeKind::entrywise_nonneg),
                                     1000, RngStream(6, 0));
    CHECK_FALSE(rp.asserted);
    CHECK(rp.trials == 1000);
    CHECK(rp.witnesses.size() <= 9);
}

TEST_CASE("cone orders")
{
    const ConeOrder ent(ConeKind::entrywise_nonneg), psd(ConeKind::psd_square);
    Mat a(2, 2);
    a << 2, -1, -1, 2;
    CHECK_FALSE(ent.contains(a, 0.0));
    CHECK(psd.contains(a, 0.0));
    CHECK(psd.margin(a) == doctest::Approx(1.0));
    CHECK(ent.margin(a) == -1.0);
    CHECK(ent.precedes(Mat::Zero(2, 2), a.cwiseAbs(), 0.0));
}

TEST_CASE("conditional-mean minimizer")
{
    const auto d = instances::v1_prior();
    const auto stacked = stacked_real();
    const auto trivial = trivial_partition(d);
    const auto rep = minimizer_check(stacked, d, trivial, 2000, RngStream(7, 0));
    CHECK(rep.dominating == 0);
    CHECK(rep.trials == 2000);
    CHECK((rep.conditional_means[0] - vec({0.6, 0.6})).norm() <= 1e-15);

    const auto finest = finest_partition(d);
    const auto means = cell_means(d, finest);
    CHECK(expected_divergence(stacked, d, finest, means).cwiseAbs().maxCoeff() == 0.0);

    const auto ch = instances::v1_channel();
    const auto parity = poisson_parity_partition(ch, d, 0);
    REQUIRE(parity.cell_mass.size() == 2);
    double total = 0.0;
    for (const auto& cell : parity.cell_mass)
        for (double v : cell)
            total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    // Odd mass given atom (1,0): rate 1.1, P(odd) = (1 - exp(-2.2)) / 2
    CHECK(parity.cell_mass[1][0] == doctest::Approx(0.4 * 0.5 * -std::expm1(-2.2)).epsilon(1e-14));
    const auto rp = minimizer_check(stacked, d, parity, 2000, RngStream(8, 0));
    CHECK(rp.dominating == 0);

    Partition empty{"empty", {{0.4, 0.4, 0.2}, {0.0, 0.0, 0.0}}};
    CHECK_THROWS_AS(cell_means(d, empty), Error);
}

TEST_CASE("squared-norm minimizer is the prior mean")
{
    const auto g = stacked_generator({generators::squared_norm()}, 1, 1, 2);
    const auto d = instances::v1_prior();
    const Vec y = minimize_expected_divergence(g, d.atoms(), d.probs(), vec({2.0, -1.0}));
    CHECK((y - d.mean()).norm() <= 1e-9);
}

TEST_CASE("combination and domains")
{
    using namespace generators;
    const auto a = stacked_generator({squared_norm()}, 1, 1, 1);
    const auto b = stacked_generator({exponential()}, 1, 1, 1);
    const auto c = combine(2.0, a, 3.0, b);
    const Vec x = vec({0.7}), y = vec({-0.2});
    CHECK(bregman_generalized(c, x, y)(0, 0)
          == doctest::Approx(2.0 * bregman_generalized(a, x, y)(0, 0) + 3.0 * bregman_generalized(b, x, y)(0, 0))
                 .epsilon(1e-14));
    const auto n = stacked_generator({negative_entropy()}, 1, 1, 1);
    const auto neg = stacked_generator({legendre_dual(burg_entropy())}, 1, 1, 1);
    CHECK(neg.domain == Domain::negative);
    CHECK_THROWS_AS(combine(1.0, n, 1.0, neg), Error);
    CHECK_THROWS_AS(combine(-1.0, a, 1.0, b), Error);
    CHECK_THROWS_AS(combine(1.0, a, 1.0, stacked_generator({squared_norm(), squared_norm()}, 1, 2, 1)), Error);
    CHECK(in_domain(Domain::positive, vec({0.1})));
    CHECK_FALSE(in_domain(Domain::positive, vec({0.0})));
    CHECK(in_domain(Domain::nonnegative, vec({0.0})));
    CHECK_FALSE(in_domain(Domain::negative, vec({0.0})));
}
