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

#include "infograd/verify.hpp"

#include <algorithm>
#include <cmath>

#include "infograd/bregman.hpp"
#include "infograd/equivalence.hpp"
#include "infograd/gradients.hpp"
#include "infograd/information.hpp"
#include "infograd/instances.hpp"
#include "infograd/text_io.hpp"

namespace infograd
{

using nlohmann::json;

std::string_view to_string(VerifySuite s)
{
    switch (s)
    {
        case VerifySuite::bregman: return "bregman";
        case VerifySuite::gradients: return "gradients";
        case VerifySuite::all: return "all";
    }
    return "unknown";
}

VerifySuite parse_verify_suite(std::string_view name)
{
    if (name == "bregman") return VerifySuite::bregman;
    if (name == "gradients") return VerifySuite::gradients;
    if (name == "all") return VerifySuite::all;
    throw_invalid("unknown suite '" + std::string(name) + "' (expected bregman, gradients or all)");
}

bool VerifyReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return !c.asserted || c.passed; });
}

json VerifyReport::to_json() const
{
    json list = json::array();
    for (const auto& c : checks)
        list.push_back({{"name", c.name},
                        {"kind", c.asserted ? "assertion" : "finding"},
                        {"passed", c.passed},
                        {"metric", c.metric},
                        {"tolerance", c.tolerance},
                        {"details", c.details}});
    return {{"suite", to_string(suite)}, {"seed", seed}, {"passed", passed()}, {"checks", list}};
}

namespace
{
json vec_json(const Vec& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

json mat_json(const Mat& a)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i)
    {
        const Vec r = a.row(i).transpose();
        rows.push_back(vec_json(r));
    }
    return rows;
}

// Clamp non-finite margins (empty sweeps) so the report stays valid JSON.
double finite_or(double v, double fallback)
{
    return std::isfinite(v) ? v : fallback;
}

VerifyCheck assertion(std::string name, double metric, double tolerance, json details = json::object())
{
    VerifyCheck c;
    c.name = std::move(name);
    c.metric = metric;
    c.tolerance = tolerance;
    c.passed = std::isfinite(metric) && metric <= tolerance;
    c.details = std::move(details);
    return c;
}

json property_json(const PropertyReport& r)
{
    json witnesses = json::array();
    for (const auto& w : r.witnesses)
        witnesses.push_back({{"property", w.property},
                             {"x", vec_json(w.x)},
                             {"x2", vec_json(w.x2)},
                             {"y", vec_json(w.y)},
                             {"theta", w.theta},
                             {"value", w.value}});
    return {{"generator", r.generator},
            {"cone", to_string(r.cone)},
            {"declared_convex", r.asserted},
            {"trials", r.trials},
            {"nonneg_violations", r.nonneg_violations},
            {"convexity_violations", r.convexity_violations},
            {"linearity_violations", r.linearity_violations},
            {"min_nonneg_margin", finite_or(r.min_nonneg_margin, 0.0)},
            {"min_convexity_margin", finite_or(r.min_convexity_margin, 0.0)},
            {"max_linearity_residual", r.max_linearity_residual},
            {"witnesses", witnesses}};
}

json minimizer_json(const MinimizerReport& r)
{
    json means = json::array();
    for (const auto& c : r.conditional_means)
        means.push_back(vec_json(c));
    json worst = json::array();
    for (const auto& c : r.worst_candidate)
        worst.push_back(vec_json(c));
    json dom = json::array();
    for (const auto& c : r.dominating_candidate)
        dom.push_back(vec_json(c));
    return {{"partition", r.partition},
            {"conditional_means", means},
            {"expected_at_mean", mat_json(r.expected_at_mean)},
            {"trials", r.trials},
            {"dominating", r.dominating},
            {"min_margin", finite_or(r.min_margin, 0.0)},
            {"worst_margin_matrix", mat_json(r.worst_margin_matrix)},
            {"worst_candidate", worst},
            {"ties", r.ties},
            {"dominating_candidate", dom},
            {"dominating_margin_matrix", mat_json(r.dominating_margin_matrix)}};
}

double max_abs(const Mat& a)
{
    return a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
}

double max_rel(const Mat& a, const Mat& ref)
{
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - ref(i, j)) / std::abs(ref(i, j)));
    return worst;
}

// Entry generators for the stacked checks.
MatrixGenerator stacked_positive()
{
    using namespace generators;
    return stacked_generator({negative_entropy(), burg_entropy(), squared_norm(), exponential()}, 2, 2, 2);
}

MatrixGenerator stacked_positive_companion()
{
    using namespace generators;
    return stacked_generator({half_squared_norm(), unnormalized_entropy(), exponential(), squared_norm()}, 2, 2, 2);
}

// Real-domain entries, so the V1 atoms on the boundary are admissible.
MatrixGenerator stacked_real()
{
    using namespace generators;
    return stacked_generator({squared_norm(), exponential(), half_squared_norm(), exponential()}, 2, 2, 2);
}

MatrixGenerator single(const ScalarGenerator& g, Eigen::Index dim)
{
    return stacked_generator({g}, 1, 1, dim);
}

void bregman_suite(std::vector<VerifyCheck>& out, const RngStream& root)
{
    using namespace generators;

    {
        const Vec x = (Vec(2) << 1.0, 2.0).finished();
        const double sq = bregman_scalar(squared_norm(), x, Vec::Zero(2));
        const Vec p = (Vec(2) << 0.5, 0.5).finished();
        const Vec q = (Vec(2) << 0.9, 0.1).finished();
        const double kl = bregman_scalar(negative_entropy(), p, q);
        const double kl_ref = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
        out.push_back(assertion("scalar_divergence_examples", std::max(std::abs(sq - 5.0), std::abs(kl - kl_ref)),
                                1e-12, {{"squared_norm", sq}, {"kl", kl}}));
    }

    {
        RngStream rng = root.split(10);
        double worst = 0.0;
        json per = json::object();
        for (const auto& g : closed_form_catalog())
        {
            double gen_worst = 0.0;
            for (int t = 0; t < 100; ++t)
            {
                const Vec x = sample_domain(g.domain, 3, rng);
                gen_worst = std::max(gen_worst, std::abs(bregman_scalar(g, x, x)));
            }
            per[g.name] = gen_worst;
            worst = std::max(worst, gen_worst);
        }
        out.push_back(assertion("scalar_zero_at_identity", worst, 1e-12, per));
    }

    {
        // Identity of indiscernibles: minimizing D(x, .) from a nearby start
        // returns x.
        RngStream rng = root.split(11);
        double worst = 0.0;
        json per = json::object();
        for (const auto& g : closed_form_catalog())
        {
            const Vec x = sample_domain(g.domain, 2, rng);
            Vec start = x;
            start[0] += g.domain == Domain::negative ? -0.01 : 0.01;
            const Vec y = minimize_expected_divergence(single(g, 2), {x}, {1.0}, start);
            per[g.name] = (y - x).norm();
            worst = std::max(worst, (y - x).norm());
        }
        out.push_back(assertion("scalar_identity_of_indiscernibles", worst, 1e-9, per));
    }

    {
        RngStream rng = root.split(12);
        double worst = 0.0;
        json per = json::object();
        for (const auto& g : closed_form_catalog())
        {
            const ScalarGenerator dual = legendre_dual(g);
            double gen_worst = 0.0;
            for (int t = 0; t < 1000; ++t)
            {
                const Vec x = sample_domain(g.domain, 2, rng);
                const Vec y = sample_domain(g.domain, 2, rng);
                gen_worst = std::max(gen_worst, duality_gap(g, dual, x, y));
            }
            per[g.name] = gen_worst;
            worst = std::max(worst, gen_worst);
        }
        out.push_back(assertion("legendre_duality_closed_form", worst, 1e-9, per));
    }

    {
        // Same identity with the conjugate obtained by gradient inversion.
        RngStream rng = root.split(13);
        double worst = 0.0;
        json per = json::object();
        for (auto g : {unnormalized_entropy(), burg_entropy(), exponential()})
        {
            g.conjugate.reset();
            const ScalarGenerator dual = legendre_dual(g);
            double gen_worst = 0.0;
            for (int t = 0; t < 100; ++t)
            {
                const Vec x = sample_domain(g.domain, 1, rng);
                const Vec y = sample_domain(g.domain, 1, rng);
                gen_worst = std::max(gen_worst, duality_gap(g, dual, x, y));
            }
            per[g.name] = gen_worst;
            worst = std::max(worst, gen_worst);
        }
        out.push_back(assertion("legendre_duality_numerical", worst, 1e-9, per));
    }

    {
        RngStream rng = root.split(14);
        Mat phi(2, 3);
        for (Eigen::Index i = 0; i < phi.size(); ++i)
            phi.data()[i] = rng.uniform() * 2.0 - 1.0;
        double worst = 0.0;
        for (const Mat& p : {phi, Mat(Mat::Identity(2, 2))})
        {
            const MatrixGenerator g = gaussian_generator(p);
            for (int t = 0; t < 1000; ++t)
            {
                const Vec x = sample_domain(Domain::real, p.cols(), rng);
                const Vec y = sample_domain(Domain::real, p.cols(), rng);
                const Vec e = x - y;
                worst = std::max(worst, max_abs(bregman_generalized(g, x, y) - p * e * e.transpose()));
            }
        }
        out.push_back(assertion("gaussian_generator_identity", worst, 1e-12));
    }

    {
        const RngStream rng = root.split(15);
        const PoissonChannel v1 = instances::v1_channel();
        json per = json::object();
        double rel = 0.0, lin = 0.0;
        for (const auto& g : {poisson_generator(v1.phi(), v1.dark()), gaussian_generator(v1.phi()), stacked_positive()})
        {
            const FrechetCheck fc = check_frechet(g, 1000, rng);
            per[g.name] = {{"max_relative_error", fc.max_relative_error},
                           {"max_linearity_residual", fc.max_linearity_residual}};
            rel = std::max(rel, fc.max_relative_error);
            lin = std::max(lin, fc.max_linearity_residual);
        }
        out.push_back(assertion("frechet_directional_derivative", rel, 1e-6, per));
        out.push_back(assertion("frechet_linearity", lin, 1e-9, per));

        const MatrixGenerator pg = poisson_generator(v1.phi(), v1.dark());
        const Vec y = Vec::Constant(2, 0.6);
        const Vec h = (Vec(2) << 1e-3, -1e-3).finished();
        const Mat numeric = 0.5 * (pg.eval(y + h) - pg.eval(y - h));
        const Mat exact = pg.frechet(y, h);
        out.push_back(assertion("poisson_frechet_v1_point", (numeric - exact).norm() / exact.norm(), 1e-6,
                                {{"frechet", mat_json(exact)}, {"central_difference", mat_json(numeric)}}));
    }

    {
        const RngStream rng = root.split(16);
        const PropertyReport gi = check_properties(gaussian_generator(Mat::Identity(2, 2)),
                                                   ConeOrder(ConeKind::psd_square), 10000, rng);
        out.push_back(assertion("properties_gaussian_identity_psd", static_cast<double>(gi.violations()), 0.0,
                                property_json(gi)));
        const MatrixGenerator companion = stacked_positive_companion();
        const PropertyReport st = check_properties(stacked_positive(), ConeOrder(ConeKind::entrywise_nonneg), 10000,
                                                   rng.split(1), &companion);
        out.push_back(assertion("properties_stacked_entrywise", static_cast<double>(st.violations()), 0.0,
                                property_json(st)));
        out.push_back(assertion("linearity_stacked", st.max_linearity_residual, 1e-10));

        const PoissonChannel v1 = instances::v1_channel();
        const PropertyReport pr = check_properties(poisson_generator(v1.phi(), v1.dark()),
                                                   ConeOrder(ConeKind::entrywise_nonneg), 10000, rng.split(2));
        VerifyCheck finding;
        finding.name = "properties_poisson_v1_entrywise";
        finding.asserted = false;
        finding.passed = pr.violations() == 0;
        finding.metric = static_cast<double>(pr.violations());
        finding.details = property_json(pr);
        out.push_back(finding);
        out.push_back(assertion("linearity_poisson", pr.max_linearity_residual, 1e-10));
    }

    {
        const RngStream rng = root.split(17);
        const FiniteDistribution prior = instances::v1_prior();
        const PoissonChannel v1 = instances::v1_channel();
        const MatrixGenerator stacked = stacked_real();
        const MinimizerReport triv = minimizer_check(stacked, prior, trivial_partition(prior), 10000, rng);
        out.push_back(assertion("minimizer_v1_trivial_stacked", static_cast<double>(triv.dominating), 0.0,
                                minimizer_json(triv)));
        const MinimizerReport par =
            minimizer_check(stacked, prior, poisson_parity_partition(v1, prior, 0), 10000, rng.split(1));
        out.push_back(assertion("minimizer_v1_parity_stacked", static_cast<double>(par.dominating), 0.0,
                                minimizer_json(par)));
        const MinimizerReport pois = minimizer_check(poisson_generator(v1.phi(), v1.dark()), prior,
                                                      poisson_parity_partition(v1, prior, 0), 10000, rng.split(2));
        out.push_back(assertion("minimizer_v1_parity_poisson", static_cast<double>(pois.dominating), 0.0,
                                minimizer_json(pois)));
        const MinimizerReport fine = minimizer_check(stacked, prior, finest_partition(prior), 1000, rng.split(3));
        out.push_back(assertion("minimizer_v1_finest_zero", max_abs(fine.expected_at_mean), 1e-12,
                                minimizer_json(fine)));

        const Vec y = minimize_expected_divergence(single(generators::squared_norm(), 2), prior.atoms(),
                                                   prior.probs(), Vec::Zero(2));
        out.push_back(assertion("minimizer_squared_norm_prior_mean", (y - prior.mean()).norm(), 1e-9,
                                {{"minimizer", vec_json(y)}, {"prior_mean", vec_json(prior.mean())}}));
    }
}

void gradients_suite(std::vector<VerifyCheck>& out, const RngStream& root)
{
    const FiniteDistribution s1 = instances::s1_prior();
    const PoissonChannel s1ch = instances::s1_channel();
    const FiniteDistribution v1 = instances::v1_prior();
    const PoissonChannel v1ch = instances::v1_channel();
    const double eps = 1e-12;

    {
        const GradientReport th = grad_poisson(s1ch, s1, eps);
        const FdResult fphi = grad_fd(s1ch, s1, FdTarget::phi_entry(0, 0), 1e-4);
        const FdResult fdark = grad_fd(s1ch, s1, FdTarget::dark_entry(0), 1e-4);
        const double rel_phi = std::abs(th.grad_phi(0, 0) - fphi.derivative) / std::abs(fphi.derivative);
        const double rel_dark = std::abs((*th.grad_dark)[0] - fdark.derivative) / std::abs(fdark.derivative);
        out.push_back(assertion("s1_theorem_vs_fd", std::max(rel_phi, rel_dark), 1e-5,
                                {{"grad_phi", th.grad_phi(0, 0)},
                                 {"fd_phi", fphi.derivative},
                                 {"grad_dark", (*th.grad_dark)[0]},
                                 {"fd_dark", fdark.derivative}}));
    }

    {
        const GradientReport th = grad_poisson(v1ch, v1, eps);
        const GradientReport fd = grad_fd_poisson(v1ch, v1, 1e-4);
        const double rel = std::max(max_rel(th.grad_phi, fd.grad_phi), max_rel(Mat(*th.grad_dark), Mat(*fd.grad_dark)));
        out.push_back(assertion("v1_theorem_vs_fd", rel, 1e-4,
                                {{"grad_phi", mat_json(th.grad_phi)},
                                 {"fd_phi", mat_json(fd.grad_phi)},
                                 {"grad_dark", vec_json(*th.grad_dark)},
                                 {"fd_dark", vec_json(*fd.grad_dark)}}));
    }

    {
        double worst = 0.0;
        json per = json::object();
        for (const auto& [name, ch, d] : {std::tuple{"s1", s1ch, s1}, std::tuple{"v1", v1ch, v1}})
        {
            const OutputGrid grid = build_output_grid(ch, d, eps);
            const Mat grad = grad_poisson_on_grid(ch, d, grid).grad_phi;
            const Mat div = expected_divergence_poisson_on_grid(ch, d, grid);
            const MatrixGenerator g = poisson_generator(ch.phi(), ch.dark());
            const double diff = max_abs(to_gradient_orientation(g, div) - grad);
            per[name] = {{"grad_phi", mat_json(grad)}, {"expected_divergence", mat_json(div)}, {"max_abs_diff", diff}};
            worst = std::max(worst, diff);
        }
        out.push_back(assertion("poisson_bregman_equivalence", worst, 1e-8, per));
    }

    {
        const GaussianChannel gch = instances::v1_gaussian_channel();
        const std::size_t samples = 100000;
        const RngStream rng = root.split(20);
        const GradientReport g = grad_phi_gaussian(gch, v1, samples, rng);
        const GaussianEquivalence eq = expected_divergence_gaussian_mc(gch, v1, samples, rng);
        out.push_back(assertion("gaussian_bregman_identity", max_abs(g.grad_phi - eq.expected_divergence), 1e-10));

        const GradientReport fd = grad_fd_gaussian(gch, v1, 1e-4);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < g.grad_phi.rows(); ++i)
            for (Eigen::Index j = 0; j < g.grad_phi.cols(); ++j)
            {
                const double allowed = std::max(1e-3, 3.0 * g.phi_error(i, j));
                worst = std::max(worst, std::abs(g.grad_phi(i, j) - fd.grad_phi(i, j)) / allowed);
            }
        out.push_back(assertion("gaussian_mmse_vs_fd_quadrature", worst, 1.0,
                                {{"grad_phi_mc", mat_json(g.grad_phi)},
                                 {"std_error", mat_json(g.phi_error)},
                                 {"fd_quadrature", mat_json(fd.grad_phi)},
                                 {"samples", samples}}));
    }

    {
        std::vector<double> atoms;
        for (const auto& a : s1.atoms())
            atoms.push_back(a[0]);
        const double phi = s1ch.phi()(0, 0), lambda = s1ch.dark()[0];
        const GradientReport vec = grad_poisson(s1ch, s1, eps);
        const auto sc = scalar::poisson_derivatives(atoms, s1.probs(), phi, lambda, eps);
        const double c1 = std::max(std::abs(sc.dphi - vec.grad_phi(0, 0)), std::abs(sc.dlambda - (*vec.grad_dark)[0]));
        const double c2 = std::abs(scalar::poisson_expected_divergence(atoms, s1.probs(), phi, lambda, eps) -
                                   expected_divergence_poisson(s1ch, s1, eps)(0, 0));
        const GaussianChannel gch(Mat::Constant(1, 1, 1.5));
        const RngStream rng = root.split(21);
        const double g_vec = grad_phi_gaussian(gch, s1, 50000, rng).grad_phi(0, 0);
        const double g_sc = scalar::gaussian_expected_divergence(s1, 1.5, 50000, rng).value;
        const double c3 = std::abs(g_vec - g_sc);
        out.push_back(assertion("scalar_reductions", std::max({c1, c2, c3}), 1e-12,
                                {{"poisson_derivatives", c1}, {"poisson_divergence", c2}, {"gaussian", c3}}));
    }
}
}  // namespace

VerifyReport run_verify(VerifySuite suite, std::uint64_t seed)
{
    VerifyReport rep;
    rep.suite = suite;
    rep.seed = seed;
    const RngStream root(seed, 0x766572696679ULL);
    if (suite == VerifySuite::bregman || suite == VerifySuite::all) bregman_suite(rep.checks, root.split(1));
    if (suite == VerifySuite::gradients || suite == VerifySuite::all) gradients_suite(rep.checks, root.split(2));
    return rep;
}

}  // namespace infograd
