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

// Reference computations for the tests. They share no code with the library:
// sums run in 50-digit decimal arithmetic over output boxes far wider than
// the library's truncation grids.

#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace oracle
{

using Real = boost::multiprecision::cpp_dec_float_50;
using RealVec = std::vector<Real>;
using RealMat = std::vector<RealVec>;  // row-major rows

struct Model
{
    RealMat atoms;  // K x n
    RealVec probs;
    RealMat phi;    // m x n
    RealVec dark;   // m
};

inline Real pois_pmf(const Real& rate, std::int64_t y)
{
    using boost::multiprecision::exp;
    using boost::multiprecision::pow;
    if (rate == 0) return y == 0 ? Real(1) : Real(0);
    Real fact = 1;
    for (std::int64_t i = 2; i <= y; ++i)
        fact *= i;
    return exp(-rate) * pow(rate, static_cast<int>(y)) / fact;
}

inline RealVec rates(const Model& md, std::size_t k)
{
    RealVec r(md.dark);
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < md.atoms[k].size(); ++j)
            r[i] += md.phi[i][j] * md.atoms[k][j];
    return r;
}

// Visit every y in {0..bound}^m with the per-atom likelihoods P(y | x_k).
inline void for_each_output(const Model& md, std::int64_t bound, const std::function<void(const RealVec&)>& visit)
{
    const std::size_t m = md.dark.size();
    const std::size_t K = md.atoms.size();
    // pmf tables per atom and coordinate
    std::vector<std::vector<RealVec>> table(K, std::vector<RealVec>(m));
    for (std::size_t k = 0; k < K; ++k)
    {
        const RealVec r = rates(md, k);
        for (std::size_t i = 0; i < m; ++i)
            for (std::int64_t y = 0; y <= bound; ++y)
                table[k][i].push_back(pois_pmf(r[i], y));
    }
    std::vector<std::int64_t> y(m, 0);
    RealVec lik(K);
    while (true)
    {
        for (std::size_t k = 0; k < K; ++k)
        {
            lik[k] = 1;
            for (std::size_t i = 0; i < m; ++i)
                lik[k] *= table[k][i][static_cast<std::size_t>(y[i])];
        }
        visit(lik);
        std::size_t i = m;
        while (i > 0 && y[i - 1] == bound)
            y[--i] = 0;
        if (i == 0) break;
        ++y[i - 1];
    }
}

// I(X;Y) in nats for the Poisson channel, summed over {0..bound}^m.
inline Real poisson_mi(const Model& md, std::int64_t bound)
{
    using boost::multiprecision::log;
    Real total = 0;
    for_each_output(md, bound, [&](const RealVec& lik) {
        Real py = 0;
        for (std::size_t k = 0; k < lik.size(); ++k)
            py += md.probs[k] * lik[k];
        if (py == 0) return;
        for (std::size_t k = 0; k < lik.size(); ++k)
            if (lik[k] > 0 && md.probs[k] > 0) total += md.probs[k] * lik[k] * log(lik[k] / py);
    });
    return total;
}

// dI/dparameter by a central difference of poisson_mi with a tiny step; the
// step error is O(h^2) and rounding is negligible at 50 digits. param must
// point into md.
inline Real poisson_mi_derivative(const Model& md, Real* param, std::int64_t bound)
{
    const Real h("1e-12");
    const Real v0 = *param;
    *param = v0 + h;
    const Real up = poisson_mi(md, bound);
    *param = v0 - h;
    const Real down = poisson_mi(md, bound);
    *param = v0;
    return (up - down) / (2 * h);
}

inline Real dmi_dphi(const Model& md, std::size_t i, std::size_t j, std::int64_t bound)
{
    Model copy = md;
    return poisson_mi_derivative(copy, &copy.phi[i][j], bound);
}

inline Real dmi_ddark(const Model& md, std::size_t i, std::int64_t bound)
{
    Model copy = md;
    return poisson_mi_derivative(copy, &copy.dark[i], bound);
}

// Posterior weights of the atoms given y.
inline RealVec poisson_posterior(const Model& md, const std::vector<std::int64_t>& y)
{
    RealVec w(md.atoms.size());
    Real z = 0;
    for (std::size_t k = 0; k < w.size(); ++k)
    {
        const RealVec r = rates(md, k);
        w[k] = md.probs[k];
        for (std::size_t i = 0; i < r.size(); ++i)
            w[k] *= pois_pmf(r[i], y[i]);
        z += w[k];
    }
    for (auto& v : w)
        v /= z;
    return w;
}

/*!
 * Generalized divergence of the Poisson generator entry by entry, written
 * out from F(x)_ji = x_j log r_i(x) - x_j + 1 and its derivative:
 *   D_ji = x_j log(r_i(x) / r_i(y)) - y_j (r_i(x) - r_i(y)) / r_i(y)
 * Returned n x m.
 */
inline RealMat poisson_generator_divergence(const RealMat& phi, const RealVec& dark, const RealVec& x, const RealVec& y)
{
    using boost::multiprecision::log;
    const std::size_t m = dark.size(), n = x.size();
    RealVec rx(dark), ry(dark);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
        {
            rx[i] += phi[i][j] * x[j];
            ry[i] += phi[i][j] * y[j];
        }
    RealMat d(n, RealVec(m));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i)
            d[j][i] = x[j] * log(rx[i] / ry[i]) - y[j] * (rx[i] - ry[i]) / ry[i];
    return d;
}

inline double to_double(const Real& v)
{
    return v.convert_to<double>();
}

}  // namespace oracle
