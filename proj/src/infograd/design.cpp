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

#include "infograd/design.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "infograd/gradients.hpp"
#include "infograd/rng.hpp"

namespace infograd
{

std::string_view to_string(ConstraintKind k)
{
    switch (k)
    {
        case ConstraintKind::box01: return "box01";
        case ConstraintKind::nonneg: return "nonneg";
        case ConstraintKind::row_sum: return "row_sum";
    }
    return "unknown";
}

ConstraintKind parse_constraint_kind(std::string_view name)
{
    if (name == "box01") return ConstraintKind::box01;
    if (name == "nonneg") return ConstraintKind::nonneg;
    if (name == "row_sum") return ConstraintKind::row_sum;
    throw_invalid("unknown constraint '" + std::string(name) + "' (expected box01, nonneg or row_sum)");
}

void Constraint::validate() const
{
    if (kind == ConstraintKind::row_sum)
        require(std::isfinite(row_sum) && row_sum > 0.0, "row_sum constraint needs a positive finite total");
}

Vec project_row_simplex(const Vec& v, double total)
{
    require(total > 0.0, "simplex total must be positive");
    require(all_finite(v), "cannot project a non-finite vector");
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double prefix = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
    {
        prefix += u[j];
        const double candidate = (prefix - total) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0.0) theta = candidate;
    }
    return (v.array() - theta).cwiseMax(0.0);
}

Mat project(const Constraint& c, const Mat& phi)
{
    c.validate();
    switch (c.kind)
    {
        case ConstraintKind::box01: return phi.cwiseMax(0.0).cwiseMin(1.0);
        case ConstraintKind::nonneg: return phi.cwiseMax(0.0);
        case ConstraintKind::row_sum:
        {
            Mat out(phi.rows(), phi.cols());
            for (Eigen::Index i = 0; i < phi.rows(); ++i)
                out.row(i) = project_row_simplex(phi.row(i).transpose(), c.row_sum).transpose();
            return out;
        }
    }
    return phi;
}

void DesignProblem::validate() const
{
    require(m >= 1, "design needs at least one measurement row");
    prior.require_nonnegative();
    require(dark.size() == m, "dark current must have one entry per measurement row");
    for (Eigen::Index i = 0; i < dark.size(); ++i)
    {
        if (!(dark[i] > 0.0))
        {
            std::ostringstream os;
            os << "dark current must be positive for gradient (dark[" << i << "] = " << dark[i] << ")";
            throw_invalid(os.str());
        }
    }
    constraint.validate();
    if (init)
    {
        require(init->rows() == m && init->cols() == prior.dim(), "initial phi must be m x n");
        require(all_finite(*init), "initial phi must be finite");
    }
}

Mat DesignProblem::initial_phi() const
{
    if (init) return project(constraint, *init);
    RngStream rng(init_seed, 0x64657369676eULL);
    Mat phi(m, prior.dim());
    for (Eigen::Index i = 0; i < phi.rows(); ++i)
        for (Eigen::Index j = 0; j < phi.cols(); ++j)
            phi(i, j) = rng.uniform();
    return project(constraint, phi);
}

std::vector<double> DesignTrace::accepted_mi() const
{
    std::vector<double> out;
    for (const auto& it : iterations)
        if (it.accepted) out.push_back(it.mi);
    return out;
}

namespace
{
constexpr std::uint64_t mi_stream = 0x6d69;
constexpr std::uint64_t grad_stream = 0x67726164;

Mat design_gradient(const DesignProblem& p, const Mat& phi, const DesignOptions& opts)
{
    // A point-mass input carries no information for any phi.
    if (p.prior.is_deterministic()) return Mat::Zero(phi.rows(), phi.cols());
    const PoissonChannel ch(phi, p.dark);
    if (opts.mi_method == MiMethod::monte_carlo)
        return grad_phi_poisson_mc(ch, p.prior, opts.budget, RngStream(opts.seed, grad_stream)).grad_phi;
    return grad_phi_poisson(ch, p.prior, opts.epsilon, opts.max_cells).grad_phi;
}
}  // namespace

MiEstimate design_mi(const DesignProblem& p, const Mat& phi, const DesignOptions& opts)
{
    const PoissonChannel ch(phi, p.dark);
    switch (opts.mi_method)
    {
        case MiMethod::enumeration: return mi_poisson_enum(ch, p.prior, opts.epsilon, opts.max_cells);
        case MiMethod::monte_carlo:
            // Fixed stream: every call sees the same random numbers.
            return mi_poisson_mc(ch, p.prior, opts.budget, RngStream(opts.seed, mi_stream));
        case MiMethod::quadrature: break;
    }
    throw_invalid("design supports enumeration or monte_carlo MI");
}

DesignTrace design_phi(const DesignProblem& p, const DesignOptions& opts)
{
    p.validate();
    require(std::isfinite(opts.tol) && opts.tol >= 0.0, "tol must be finite and nonnegative");
    require(opts.mi_method != MiMethod::quadrature, "design supports enumeration or monte_carlo MI");
    if (opts.mi_method == MiMethod::monte_carlo) require(opts.budget >= 1, "budget must be at least 1");

    DesignTrace trace;
    Mat phi = p.initial_phi();
    double mi = design_mi(p, phi, opts).value;

    auto gradient_at = [&](const Mat& at, std::size_t iteration) {
        try
        {
            Mat g = design_gradient(p, at, opts);
            if (!all_finite(g)) throw_numerical("non-finite gradient entries");
            return g;
        }
        catch (const Error& e)
        {
            if (e.kind() != ErrorKind::numerical) throw;
            std::ostringstream os;
            os << e.what() << " at design iteration " << iteration;
            throw_numerical(os.str());
        }
    };

    Mat grad = gradient_at(phi, 0);
    auto pg_norm = [&](const Mat& at, const Mat& g) { return (project(p.constraint, at + g) - at).norm(); };
    double pg = pg_norm(phi, grad);
    trace.iterations.push_back({0, mi, grad.norm(), pg, 0.0, true});
    trace.stop_reason = "max_iters";

    if (pg == 0.0)
    {
        trace.stop_reason = "stationary";
    }
    else
    {
        for (std::size_t it = 1; it <= opts.max_iters; ++it)
        {
            if (pg <= opts.tol * (1.0 + std::abs(mi)))
            {
                trace.stop_reason = "stationary";
                break;
            }
            double eta = 1.0;
            bool accepted = false;
            Mat candidate;
            double candidate_mi = mi;
            while (eta >= 1e-8)
            {
                candidate = project(p.constraint, phi + eta * grad);
                candidate_mi = design_mi(p, candidate, opts).value;
                if (candidate_mi > mi)
                {
                    accepted = true;
                    break;
                }
                eta *= 0.5;
            }
            if (!accepted)
            {
                trace.iterations.push_back({it, mi, grad.norm(), pg, eta, false});
                trace.stop_reason = "line_search";
                break;
            }
            const double gain = (candidate_mi - mi) / std::max(std::abs(mi), 1e-300);
            phi = std::move(candidate);
            mi = candidate_mi;
            grad = gradient_at(phi, it);
            pg = pg_norm(phi, grad);
            trace.iterations.push_back({it, mi, grad.norm(), pg, eta, true});
            if (gain < opts.tol)
            {
                trace.stop_reason = "relative_gain";
                break;
            }
        }
    }
    trace.phi = phi;
    trace.mi = mi;
    return trace;
}

Mat round_to_binary(const Mat& phi, double threshold)
{
    require(threshold > 0.0 && threshold < 1.0, "rounding threshold must lie in (0, 1)");
    require(all_finite(phi) && phi.minCoeff() >= 0.0 && phi.maxCoeff() <= 1.0,
            "rounding needs entries in [0, 1]");
    return (phi.array() >= threshold).cast<double>();
}

RoundingReport rounding_gap(const DesignProblem& p,
                            const Mat& phi,
                            double threshold,
                            const DesignOptions& opts)
{
    RoundingReport rep;
    rep.binary = round_to_binary(phi, threshold);
    rep.relaxed_mi = design_mi(p, phi, opts).value;
    rep.binary_mi = design_mi(p, rep.binary, opts).value;
    rep.gap = rep.relaxed_mi - rep.binary_mi;
    return rep;
}

}  // namespace infograd
