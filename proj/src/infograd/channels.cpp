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

#include "infograd/channels.hpp"

#include <algorithm>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

namespace infograd
{

PoissonChannel::PoissonChannel(Mat phi, Vec dark) : phi_(std::move(phi)), dark_(std::move(dark))
{
    require(phi_.rows() > 0 && phi_.cols() > 0, "phi must be non-empty");
    require(dark_.size() == phi_.rows(), "dark current length must equal the number of phi rows");
    require(all_finite(phi_) && all_finite(dark_), "channel parameters must be finite");
    require((phi_.array() >= 0.0).all(), "Poisson phi entries must be nonnegative");
    require((dark_.array() >= 0.0).all(), "dark current entries must be nonnegative");
}

void PoissonChannel::require_positive_dark() const
{
    for (Eigen::Index i = 0; i < dark_.size(); ++i)
        if (!(dark_[i] > 0.0))
        {
            std::ostringstream os;
            os << "dark current must be positive for gradient (dark[" << i << "] = " << dark_[i]
               << ")";
            throw_invalid(os.str());
        }
}

void PoissonChannel::require_compatible(const FiniteDistribution& d) const
{
    require(d.dim() == phi_.cols(), "prior dimension must equal the number of phi columns");
    d.require_nonnegative();
}

GaussianChannel::GaussianChannel(Mat phi) : phi_(std::move(phi))
{
    require(phi_.rows() > 0 && phi_.cols() > 0, "phi must be non-empty");
    require(all_finite(phi_), "channel parameters must be finite");
}

void GaussianChannel::require_compatible(const FiniteDistribution& d) const
{
    require(d.dim() == phi_.cols(), "prior dimension must equal the number of phi columns");
}

double poisson_log_pmf_rates(const Vec& rates, std::span<const std::int64_t> y)
{
    require(static_cast<Eigen::Index>(y.size()) == rates.size(), "output length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
    {
        require(y[i] >= 0, "Poisson outputs must be nonnegative integers");
        const double r = rates[static_cast<Eigen::Index>(i)];
        const double k = static_cast<double>(y[i]);
        if (r == 0.0)
        {
            if (y[i] != 0) return -std::numeric_limits<double>::infinity();
            continue;
        }
        total += k * std::log(r) - r - std::lgamma(k + 1.0);
    }
    return total;
}

double poisson_log_pmf(const PoissonChannel& ch, const Vec& x, std::span<const std::int64_t> y)
{
    return poisson_log_pmf_rates(ch.rates(x), y);
}

Counts poisson_sample(const PoissonChannel& ch, const Vec& x, RngStream& rng)
{
    const Vec r = ch.rates(x);
    Counts y(static_cast<std::size_t>(r.size()), 0);
    for (Eigen::Index i = 0; i < r.size(); ++i)
    {
        if (r[i] <= 0.0) continue;
        std::poisson_distribution<std::int64_t> pois(r[i]);
        y[static_cast<std::size_t>(i)] = pois(rng);
    }
    return y;
}

double gaussian_log_pdf(const GaussianChannel& ch, const Vec& x, const Vec& y)
{
    require(y.size() == ch.outputs() && x.size() == ch.inputs(), "shape mismatch");
    const double m = static_cast<double>(ch.outputs());
    return -0.5 * m * std::log(2.0 * std::numbers::pi) - 0.5 * (y - ch.phi() * x).squaredNorm();
}

Vec gaussian_sample(const GaussianChannel& ch, const Vec& x, RngStream& rng)
{
    Vec y = ch.phi() * x;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        y[i] += rng.normal();
    return y;
}

double poisson_upper_tail(double rate, std::int64_t bound)
{
    if (bound < 0) return 1.0;
    if (rate <= 0.0) return 0.0;
    // P(Y > b) = P(b + 1, rate), the regularized lower incomplete gamma.
    return boost::math::gamma_p(static_cast<double>(bound) + 1.0, rate);
}

std::int64_t poisson_tail_bound(double rate, double delta)
{
    if (rate <= 0.0) return 0;
    // Exponential search for an upper bracket, then bisection.
    std::int64_t hi = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(rate)));
    while (poisson_upper_tail(rate, hi) > delta)
        hi *= 2;
    std::int64_t lo = -1;  // tail(-1) = 1 > delta
    while (hi - lo > 1)
    {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (poisson_upper_tail(rate, mid) <= delta)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double OutputGrid::cell_count() const
{
    double cells = 1.0;
    for (auto b : bounds)
        cells *= static_cast<double>(b + 1);
    return cells;
}

void OutputGrid::decode(std::size_t index, Counts& y) const
{
    y.assign(bounds.size(), 0);
    for (std::size_t i = bounds.size(); i-- > 0;)
    {
        const auto radix = static_cast<std::size_t>(bounds[i] + 1);
        y[i] = static_cast<std::int64_t>(index % radix);
        index /= radix;
    }
}

bool OutputGrid::advance(Counts& y) const
{
    for (std::size_t i = bounds.size(); i-- > 0;)
    {
        if (y[i] < bounds[i])
        {
            ++y[i];
            return true;
        }
        y[i] = 0;
    }
    return false;
}

bool OutputGrid::on_boundary(const Counts& y) const
{
    for (std::size_t i = 0; i < bounds.size(); ++i)
        if (y[i] == bounds[i]) return true;
    return false;
}

OutputGrid grid_with_bounds(const PoissonChannel& ch,
                            const FiniteDistribution& d,
                            std::vector<std::int64_t> bounds,
                            double mass_floor)
{
    require(static_cast<Eigen::Index>(bounds.size()) == ch.outputs(), "grid rank mismatch");
    OutputGrid grid;
    grid.bounds = std::move(bounds);
    grid.mass_floor = mass_floor;
    // Coordinates are independent given x, so the captured mass factorizes.
    CompensatedSum missing;
    for (std::size_t k = 0; k < d.size(); ++k)
    {
        const Vec r = ch.rates(d.atom(k));
        double log_inside = 0.0;
        for (Eigen::Index i = 0; i < r.size(); ++i)
            log_inside += std::log1p(-poisson_upper_tail(r[i], grid.bounds[static_cast<std::size_t>(i)]));
        missing += d.prob(k) * -std::expm1(log_inside);
    }
    grid.deficit = std::max(0.0, missing.value());
    grid.achieved_mass = 1.0 - grid.deficit;
    return grid;
}

OutputGrid build_output_grid(const PoissonChannel& ch, const FiniteDistribution& d, double epsilon)
{
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
    ch.require_compatible(d);
    const auto m = static_cast<std::size_t>(ch.outputs());
    const double per_coordinate = epsilon / static_cast<double>(m);
    std::vector<std::int64_t> bounds(m, 0);
    for (std::size_t i = 0; i < m; ++i)
    {
        double r_max = 0.0;
        for (const auto& x : d.atoms())
            r_max = std::max(r_max, ch.rates(x)[static_cast<Eigen::Index>(i)]);
        bounds[i] = poisson_tail_bound(r_max, per_coordinate);
    }
    return grid_with_bounds(ch, d, std::move(bounds), 1.0 - epsilon);
}

void require_feasible(const OutputGrid& grid, double max_cells)
{
    if (grid.cell_count() > max_cells)
    {
        std::ostringstream os;
        os << "output grid has " << grid.cell_count() << " cells (cap " << max_cells
           << "); use the Monte Carlo method instead";
        throw_infeasible(os.str());
    }
}

}  // namespace infograd
