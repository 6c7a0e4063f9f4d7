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

#include "infograd/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "infograd/enumeration.hpp"
#include "infograd/inference.hpp"
#include "infograd/parallel.hpp"

namespace infograd
{

namespace
{
struct DivergenceSums
{
    std::vector<CompensatedSum> entries;

    void merge(const DivergenceSums& o)
    {
        for (std::size_t i = 0; i < entries.size(); ++i)
            entries[i].merge(o.entries[i]);
    }
};
}  // namespace

Mat expected_divergence_poisson_on_grid(const PoissonChannel& ch,
                                        const FiniteDistribution& d,
                                        const OutputGrid& grid,
                                        double max_cells)
{
    ch.require_compatible(d);
    require_feasible(grid, max_cells);
    const MatrixGenerator g = poisson_generator(ch.phi(), ch.dark());
    const detail::PoissonCellSolver solver(ch, d);
    const auto size = static_cast<std::size_t>(g.rows * g.cols);
    DivergenceSums init{std::vector<CompensatedSum>(size)};

    const DivergenceSums sums = detail::reduce_grid(grid, init, [&](DivergenceSums& acc, const Counts& y) {
        thread_local std::vector<double> weights, loglik;
        const double log_py = solver.solve(y, weights, loglik);
        if (!std::isfinite(log_py)) return;
        const double py = std::exp(log_py);
        Vec estimate = Vec::Zero(d.dim());
        for (std::size_t k = 0; k < d.size(); ++k)
            estimate += weights[k] * d.atom(k);
        for (std::size_t k = 0; k < d.size(); ++k)
        {
            if (weights[k] <= 0.0) continue;
            const Mat div = bregman_generalized(g, d.atom(k), estimate);
            const double w = py * weights[k];
            for (Eigen::Index r = 0; r < div.rows(); ++r)
                for (Eigen::Index c = 0; c < div.cols(); ++c)
                    acc.entries[static_cast<std::size_t>(r * div.cols() + c)].add(w * div(r, c));
        }
    });

    Mat out(g.rows, g.cols);
    for (Eigen::Index r = 0; r < g.rows; ++r)
        for (Eigen::Index c = 0; c < g.cols; ++c)
            out(r, c) = sums.entries[static_cast<std::size_t>(r * g.cols + c)].value();
    if (!all_finite(out)) throw_numerical("non-finite expected divergence");
    return out;
}

Mat expected_divergence_poisson(const PoissonChannel& ch,
                                const FiniteDistribution& d,
                                double epsilon,
                                double max_cells)
{
    ch.require_compatible(d);
    ch.require_positive_dark();
    return expected_divergence_poisson_on_grid(ch, d, build_output_grid(ch, d, epsilon), max_cells);
}

GaussianEquivalence expected_divergence_gaussian_mc(const GaussianChannel& ch,
                                                    const FiniteDistribution& d,
                                                    std::size_t samples,
                                                    const RngStream& rng)
{
    require(samples >= 1, "mc_samples must be at least 1");
    ch.require_compatible(d);
    const MatrixGenerator g = gaussian_generator(ch.phi());
    MatMoments moments = mc_reduce(samples, rng, MatMoments(g.rows, g.cols),
                                   [&](MatMoments& acc, RngStream& stream) {
                                       const GaussianDraw draw = draw_gaussian(ch, d, stream);
                                       acc.add(bregman_generalized(g, d.atom(draw.atom), draw.estimate));
                                   });
    GaussianEquivalence out;
    out.expected_divergence = moments.mean();
    out.std_error = moments.std_error();
    out.samples = moments.count();
    return out;
}

namespace scalar
{
double poisson_expected_divergence(const std::vector<double>& atoms,
                                   const std::vector<double>& probs,
                                   double phi,
                                   double lambda,
                                   double epsilon)
{
    require(atoms.size() == probs.size() && !atoms.empty(), "atoms and probabilities must match");
    require(lambda > 0.0, "dark current must be positive for gradient");
    require(phi >= 0.0, "scaling factor must be nonnegative");
    const std::size_t K = atoms.size();
    double r_max = 0.0;
    for (std::size_t k = 0; k < K; ++k)
    {
        require(atoms[k] >= 0.0, "Poisson channel inputs must be nonnegative");
        r_max = std::max(r_max, phi * atoms[k] + lambda);
    }
    const std::int64_t bound = poisson_tail_bound(r_max, epsilon);

    double total = 0.0;
    std::vector<double> lw(K);
    for (std::int64_t y = 0; y <= bound; ++y)
    {
        const double yd = static_cast<double>(y);
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < K; ++k)
        {
            const double r = phi * atoms[k] + lambda;
            lw[k] = probs[k] > 0.0 ? std::log(probs[k]) + yd * std::log(r) - r - std::lgamma(yd + 1.0)
                                   : -std::numeric_limits<double>::infinity();
            peak = std::max(peak, lw[k]);
        }
        double z = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            z += std::exp(lw[k] - peak);
        const double log_py = peak + std::log(z);
        double xhat = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            xhat += std::exp(lw[k] - log_py) * atoms[k];
        const double rhat = phi * xhat + lambda;
        for (std::size_t k = 0; k < K; ++k)
        {
            const double joint = std::exp(lw[k]);
            if (joint == 0.0) continue;
            const double x = atoms[k];
            // f(x) - f(xhat) - f'(xhat) (x - xhat)
            const double d = x * std::log((phi * x + lambda) / rhat) - phi * xhat * (x - xhat) / rhat;
            total += joint * d;
        }
    }
    return total;
}

GaussianScalar gaussian_expected_divergence(const FiniteDistribution& d,
                                            double phi,
                                            std::size_t samples,
                                            const RngStream& rng)
{
    require(samples >= 1, "mc_samples must be at least 1");
    require(d.dim() == 1, "scalar path needs a scalar prior");
    require(std::isfinite(phi), "scaling factor must be finite");
    const ScalarMoments acc = mc_reduce(samples, rng, ScalarMoments{}, [&](ScalarMoments& a, RngStream& s) {
        const std::size_t k = d.sample_index(s);
        const double x = d.atom(k)[0];
        const double y = phi * x + s.normal();
        double peak = -std::numeric_limits<double>::infinity();
        std::vector<double> lw(d.size());
        for (std::size_t j = 0; j < d.size(); ++j)
        {
            const double resid = y - phi * d.atom(j)[0];
            lw[j] = d.prob(j) > 0.0 ? std::log(d.prob(j)) - 0.5 * resid * resid
                                    : -std::numeric_limits<double>::infinity();
            peak = std::max(peak, lw[j]);
        }
        double z = 0.0, num = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j)
        {
            const double w = std::exp(lw[j] - peak);
            z += w;
            num += w * d.atom(j)[0];
        }
        const double e = x - num / z;
        a.add(phi * e * e);
    });
    return {acc.mean(), acc.std_error()};
}
}  // namespace scalar

}  // namespace infograd
