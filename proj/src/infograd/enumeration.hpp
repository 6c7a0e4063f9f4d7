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

// Shared machinery for exact sums over a truncated Poisson output grid.

#include <cstddef>
#include <vector>

#include "infograd/channels.hpp"
#include "infograd/input_model.hpp"
#include "infograd/parallel.hpp"

namespace infograd::detail
{

/// Per-atom rates cached once so each grid cell costs O(K m).
class PoissonCellSolver
{
  public:
    PoissonCellSolver(const PoissonChannel& ch, const FiniteDistribution& d);

    // Writes the posterior weights for output y and returns log P(y).
    double solve(const Counts& y, std::vector<double>& weights, std::vector<double>& loglik) const;

    const Vec& rates(std::size_t k) const { return rates_[k]; }
    std::size_t atoms() const { return rates_.size(); }

  private:
    std::vector<Vec> rates_;
    std::vector<Vec> log_rates_;
    std::vector<double> log_prior_;
};

inline constexpr std::size_t grid_chunk_cells = 4096;

/*!
 * Visit every cell of the grid in fixed chunks. visit(acc, y) is called once
 * per cell; chunk accumulators are merged in chunk order.
 */
template <class Acc, class Visit>
Acc reduce_grid(const OutputGrid& grid, const Acc& init, Visit visit)
{
    const auto cells = static_cast<std::size_t>(grid.cell_count());
    const std::size_t chunks = (cells + grid_chunk_cells - 1) / grid_chunk_cells;
    auto partial = parallel_map(chunks, [&](std::size_t c) {
        Acc acc = init;
        const std::size_t begin = c * grid_chunk_cells;
        const std::size_t end = std::min(cells, begin + grid_chunk_cells);
        Counts y;
        grid.decode(begin, y);
        for (std::size_t idx = begin; idx < end; ++idx)
        {
            visit(acc, y);
            grid.advance(y);
        }
        return acc;
    });
    Acc total = init;
    for (const auto& p : partial)
        total.merge(p);
    return total;
}

}  // namespace infograd::detail
