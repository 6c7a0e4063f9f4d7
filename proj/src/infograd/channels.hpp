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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "infograd/input_model.hpp"
#include "infograd/numerics.hpp"
#include "infograd/rng.hpp"

namespace infograd
{

using Counts = std::vector<std::int64_t>;

/// Y_i ~ Pois((phi x)_i + dark_i), independent across i.
class PoissonChannel
{
  public:
    PoissonChannel(Mat phi, Vec dark);

    const Mat& phi() const { return phi_; }
    const Vec& dark() const { return dark_; }
    Eigen::Index outputs() const { return phi_.rows(); }
    Eigen::Index inputs() const { return phi_.cols(); }

    Vec rates(const Vec& x) const { return phi_ * x + dark_; }

    // Gradient formulas take log of the rates; they need dark > 0.
    void require_positive_dark() const;
    void require_compatible(const FiniteDistribution& d) const;

    PoissonChannel with_phi(Mat phi) const { return {std::move(phi), dark_}; }
    PoissonChannel with_dark(Vec dark) const { return {phi_, std::move(dark)}; }

  private:
    Mat phi_;
    Vec dark_;
};

/// Y = phi x + N with N ~ N(0, I).
class GaussianChannel
{
  public:
    explicit GaussianChannel(Mat phi);

    const Mat& phi() const { return phi_; }
    Eigen::Index outputs() const { return phi_.rows(); }
    Eigen::Index inputs() const { return phi_.cols(); }

    void require_compatible(const FiniteDistribution& d) const;
    GaussianChannel with_phi(Mat phi) const { return GaussianChannel(std::move(phi)); }

  private:
    Mat phi_;
};

// Sum of y log r - r - log y! over coordinates; a zero rate gives 0 for
// y = 0 and -inf otherwise.
double poisson_log_pmf_rates(const Vec& rates, std::span<const std::int64_t> y);
double poisson_log_pmf(const PoissonChannel& ch, const Vec& x, std::span<const std::int64_t> y);
Counts poisson_sample(const PoissonChannel& ch, const Vec& x, RngStream& rng);

double gaussian_log_pdf(const GaussianChannel& ch, const Vec& x, const Vec& y);
Vec gaussian_sample(const GaussianChannel& ch, const Vec& x, RngStream& rng);

// P(Y > bound) for Y ~ Pois(rate).
double poisson_upper_tail(double rate, std::int64_t bound);
// Smallest bound with P(Y > bound) <= delta.
std::int64_t poisson_tail_bound(double rate, double delta);

/*!
 * Box truncation {0..bounds[0]} x ... x {0..bounds[m-1]} of the Poisson
 * output space, with the prior-averaged mass it captures.
 */
struct OutputGrid
{
    std::vector<std::int64_t> bounds;
    double mass_floor = 1.0;
    double achieved_mass = 1.0;
    // 1 - achieved_mass, computed without cancellation.
    double deficit = 0.0;

    double cell_count() const;
    // Decode a linear cell index (last coordinate fastest).
    void decode(std::size_t index, Counts& y) const;
    // Odometer step; returns false after the last cell.
    bool advance(Counts& y) const;
    bool on_boundary(const Counts& y) const;
};

inline constexpr double default_max_cells = 1e8;

OutputGrid build_output_grid(const PoissonChannel& ch,
                             const FiniteDistribution& d,
                             double epsilon);

// Grid with fixed bounds, mass recomputed for this channel.
OutputGrid grid_with_bounds(const PoissonChannel& ch,
                            const FiniteDistribution& d,
                            std::vector<std::int64_t> bounds,
                            double mass_floor);

void require_feasible(const OutputGrid& grid, double max_cells);

}  // namespace infograd
