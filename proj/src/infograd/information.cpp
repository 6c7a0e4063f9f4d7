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

#include "infograd/information.hpp"

#include <random>
#include <sstream>

#include "infograd/enumeration.hpp"
#include "infograd/parallel.hpp"

namespace infograd
{

std::string_view to_string(MiMethod m)
{
    switch (m)
    {
        case MiMethod::enumeration: return "enumeration";
        case MiMethod::quadrature: return "quadrature";
        case MiMethod::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

MiMethod parse_mi_method(std::string_view name)
{
    if (name == "enum" || name == "enumeration") return MiMethod::enumeration;
    if (name == "quad" || name == "quadrature") return MiMethod::quadrature;
    if (name == "mc" || name == "monte_carlo") return MiMethod::monte_carlo;
    throw_invalid("unknown mutual information method '" + std::string(name) + "'");
}

namespace
{
struct KlAccumulator
{
    CompensatedSum total;
    void merge(const KlAccumulator& o) { total.merge(o.total); }
};
}  // namespace

MiEstimate mi_poisson_on_grid(const PoissonChannel& ch,
                              const FiniteDistribution& d,
                              const OutputGrid& grid,
                              double max_cells)
{
    ch.require_compatible(d);
    require_feasible(grid, max_cells);
    const detail::PoissonCellSolver solver(ch, d);
    std::vector<double> log_prior(d.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        log_prior[k] = d.prob(k) > 0.0 ? std::log(d.prob(k)) : 0.0;

    // I = sum_y P(y) KL(P(X | y) || P(X)); every term is nonnegative.
    auto acc = detail::reduce_grid(grid, KlAccumulator{}, [&](KlAccumulator& a, const Counts& y) {
        thread_local std::vector<double> w, ll;
        const double lev = solver.solve(y, w, ll);
        if (!(lev > -std::numeric_limits<double>::infinity())) return;
        double kl = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k] > 0.0) kl += w[k] * (std::log(w[k]) - log_prior[k]);
        a.total += std::exp(lev) * kl;
    });

    MiEstimate est;
    est.method = MiMethod::enumeration;
    est.value = acc.total.value();
    est.truncation_mass_deficit = grid.deficit;
    est.error_bound = grid.deficit * std::log(1.0 / d.min_prob_positive());
    est.budget = static_cast<std::size_t>(grid.cell_count());
    if (!std::isfinite(est.value)) throw_numerical("non-finite mutual information");
    return est;
}

MiEstimate mi_poisson_enum(const PoissonChannel& ch,
                           const FiniteDistribution& d,
                           double epsilon,
                           double max_cells)
{
    return mi_poisson_on_grid(ch, d, build_output_grid(ch, d, epsilon), max_cells);
}

MiEstimate mi_poisson_mc(const PoissonChannel& ch,
                         const FiniteDistribution& d,
                         std::size_t budget,
                         const RngStream& rng)
{
    require(budget >= 1, "budget must be at least 1");
    ch.require_compatible(d);
    const detail::PoissonCellSolver solver(ch, d);
    auto moments = mc_reduce(budget, rng, ScalarMoments{}, [&](ScalarMoments& acc, RngStream& s) {
        thread_local std::vector<double> w, ll;
        const std::size_t k = d.sample_index(s);
        const Counts y = poisson_sample(ch, d.atom(k), s);
        const double lev = solver.solve(y, w, ll);
        acc.add(ll[k] - lev);
    });
    MiEstimate est;
    est.method = MiMethod::monte_carlo;
    est.value = moments.mean();
    est.error_bound = moments.std_error();
    est.budget = moments.count();
    return est;
}

GaussHermiteRule gauss_hermite_rule(std::size_t n)
{
    require(n >= 1, "quadrature needs at least one node");
    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite recurrence.
    Vec diag = Vec::Zero(static_cast<Eigen::Index>(n));
    Vec sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
    for (Eigen::Index k = 0; k < sub.size(); ++k)
        sub[k] = std::sqrt(static_cast<double>(k + 1));
    GaussHermiteRule rule;
    if (n == 1)
    {
        rule.nodes = {0.0};
        rule.weights = {1.0};
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    for (std::size_t i = 0; i < n; ++i)
    {
        const auto ii = static_cast<Eigen::Index>(i);
        rule.nodes.push_back(vals[ii]);
        rule.weights.push_back(vecs(0, ii) * vecs(0, ii));
    }
    // Exploit the symmetry of the rule to clean up rounding.
    for (std::size_t i = 0; i < n / 2; ++i)
    {
        const std::size_t j = n - 1 - i;
        const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = rule.weights[j] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

namespace
{
double quadrature_value(const GaussianChannel& ch, const FiniteDistribution& d, std::size_t nodes)
{
    const auto m = ch.outputs();
    const GaussHermiteRule rule = gauss_hermite_rule(nodes);
    std::vector<Vec> means;
    std::vector<double> log_prior;
    for (std::size_t k = 0; k < d.size(); ++k)
    {
        means.push_back(ch.phi() * d.atom(k));
        log_prior.push_back(d.prob(k) > 0.0 ? std::log(d.prob(k))
                                            : -std::numeric_limits<double>::infinity());
    }
    const std::size_t points = m == 1 ? nodes : nodes * nodes;
    CompensatedSum total;
    std::vector<double> terms(d.size());
    Vec z(m), y(m);
    for (std::size_t k = 0; k < d.size(); ++k)
    {
        if (d.prob(k) == 0.0) continue;
        CompensatedSum inner;
        for (std::size_t p = 0; p < points; ++p)
        {
            double w = 1.0;
            if (m == 1)
            {
                z[0] = rule.nodes[p];
                w = rule.weights[p];
            }
            else
            {
                z[0] = rule.nodes[p / nodes];
                z[1] = rule.nodes[p % nodes];
                w = rule.weights[p / nodes] * rule.weights[p % nodes];
            }
            y = means[k] + z;
            for (std::size_t l = 0; l < d.size(); ++l)
                terms[l] = log_prior[l] - 0.5 * (y - means[l]).squaredNorm();
            // log N(y; mu_k) - log p(y), normalizing constants cancel.
            inner += w * (-0.5 * z.squaredNorm() - log_sum_exp(terms));
        }
        total += d.prob(k) * inner.value();
    }
    return total.value();
}
}  // namespace

MiEstimate mi_gaussian_quadrature(const GaussianChannel& ch,
                                  const FiniteDistribution& d,
                                  std::size_t nodes)
{
    ch.require_compatible(d);
    if (ch.outputs() > 2)
    {
        std::ostringstream os;
        os << "quadrature requires at most 2 outputs, channel has " << ch.outputs();
        throw_invalid(os.str());
    }
    require(nodes >= 2, "quadrature needs at least 2 nodes per axis");
    MiEstimate est;
    est.method = MiMethod::quadrature;
    est.budget = nodes;
    // A single atom carries no information; skip the rounding-level residue.
    if (d.is_deterministic()) return est;
    est.value = quadrature_value(ch, d, nodes);
    // Discretization estimate from a rule of half the order.
    est.error_bound = std::abs(est.value - quadrature_value(ch, d, std::max<std::size_t>(1, nodes / 2)));
    est.budget = nodes;
    if (!std::isfinite(est.value)) throw_numerical("non-finite mutual information");
    return est;
}

MiEstimate mi_gaussian_mc(const GaussianChannel& ch,
                          const FiniteDistribution& d,
                          std::size_t budget,
                          const RngStream& rng)
{
    require(budget >= 1, "budget must be at least 1");
    ch.require_compatible(d);
    auto moments = mc_reduce(budget, rng, ScalarMoments{}, [&](ScalarMoments& acc, RngStream& s) {
        const std::size_t k = d.sample_index(s);
        const Vec y = gaussian_sample(ch, d.atom(k), s);
        std::vector<double> ll(d.size());
        for (std::size_t l = 0; l < d.size(); ++l)
            ll[l] = gaussian_log_pdf(ch, d.atom(l), y);
        std::vector<double> joint(d.size());
        for (std::size_t l = 0; l < d.size(); ++l)
            joint[l] = d.prob(l) > 0.0 ? std::log(d.prob(l)) + ll[l]
                                       : -std::numeric_limits<double>::infinity();
        acc.add(ll[k] - log_sum_exp(joint));
    });
    MiEstimate est;
    est.method = MiMethod::monte_carlo;
    est.value = moments.mean();
    est.error_bound = moments.std_error();
    est.budget = moments.count();
    return est;
}

MiEstimate mi_gaussian(const GaussianChannel& ch,
                       const FiniteDistribution& d,
                       MiMethod method,
                       std::size_t budget,
                       const RngStream& rng)
{
    switch (method)
    {
        case MiMethod::quadrature:
            return mi_gaussian_quadrature(ch, d, budget ? budget : default_quadrature_nodes);
        case MiMethod::monte_carlo: return mi_gaussian_mc(ch, d, budget, rng);
        case MiMethod::enumeration: break;
    }
    throw_invalid("enumeration is not available for the Gaussian channel; use quadrature or mc");
}

}  // namespace infograd
