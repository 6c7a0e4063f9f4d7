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

// Rectangle-rule integration of the Gaussian channel over a wide output box,
// independent of the library's Gauss-Hermite quadrature. The integrands are
// smooth and decay like a Gaussian, so the midpoint rule converges
// exponentially in the grid spacing.

#include <cmath>
#include <vector>

namespace oracle::gaussian
{

struct Model2
{
    std::vector<std::vector<double>> atoms;  // K x n
    std::vector<double> probs;
    std::vector<std::vector<double>> phi;  // 2 x n
};

struct Integrals
{
    double mi = 0.0;
    // E[(X - E[X|Y])(X - E[X|Y])^T], n x n
    std::vector<std::vector<double>> mmse;
};

inline Integrals integrate(const Model2& md, double step = 0.02, double pad = 9.0)
{
    const std::size_t K = md.atoms.size();
    const std::size_t n = md.atoms[0].size();
    std::vector<std::vector<double>> means(K, std::vector<double>(2, 0.0));
    double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
    for (std::size_t k = 0; k < K; ++k)
        for (int i = 0; i < 2; ++i)
        {
            for (std::size_t j = 0; j < n; ++j)
                means[k][i] += md.phi[i][j] * md.atoms[k][j];
            lo[i] = std::min(lo[i], means[k][i] - pad);
            hi[i] = std::max(hi[i], means[k][i] + pad);
        }
    const double two_pi = 2.0 * std::acos(-1.0);
    Integrals out;
    out.mmse.assign(n, std::vector<double>(n, 0.0));
    long double mi = 0.0L;
    std::vector<long double> mm(n * n, 0.0L);
    std::vector<double> lik(K), xhat(n);
    for (double y0 = lo[0] + 0.5 * step; y0 < hi[0]; y0 += step)
        for (double y1 = lo[1] + 0.5 * step; y1 < hi[1]; y1 += step)
        {
            double py = 0.0;
            for (std::size_t k = 0; k < K; ++k)
            {
                const double a = y0 - means[k][0], b = y1 - means[k][1];
                lik[k] = std::exp(-0.5 * (a * a + b * b)) / two_pi;
                py += md.probs[k] * lik[k];
            }
            if (py <= 0.0) continue;
            for (std::size_t j = 0; j < n; ++j)
            {
                xhat[j] = 0.0;
                for (std::size_t k = 0; k < K; ++k)
                    xhat[j] += md.probs[k] * lik[k] * md.atoms[k][j] / py;
            }
            const double area = step * step;
            for (std::size_t k = 0; k < K; ++k)
            {
                const double joint = md.probs[k] * lik[k] * area;
                if (joint <= 0.0) continue;
                mi += joint * std::log(lik[k] / py);
                for (std::size_t r = 0; r < n; ++r)
                    for (std::size_t c = 0; c < n; ++c)
                        mm[r * n + c] += joint * (md.atoms[k][r] - xhat[r]) * (md.atoms[k][c] - xhat[c]);
            }
        }
    out.mi = static_cast<double>(mi);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            out.mmse[r][c] = static_cast<double>(mm[r * n + c]);
    return out;
}

}  // namespace oracle::gaussian
