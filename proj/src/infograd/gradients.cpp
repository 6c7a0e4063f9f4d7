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

#include "infograd/gradients.hpp"

#include <algorithm>
#include <sstream>

#include "infograd/enumeration.hpp"
#include "infograd/inference.hpp"
#include "infograd/parallel.hpp"

namespace infograd
{

std::string_view to_string(GradMethod m)
{
    switch (m)
    {
        case GradMethod::theorem: return "theorem";
        case GradMethod::finite_difference: return "finite_difference";
        case GradMethod::monte_carlo: return "monte_carlo";
        case GradMethod::gaussian_mmse: return "gaussian_mmse";
    }
    return "unknown";
}

std::string_view to_string(ChannelKind k)
{
    return k == ChannelKind::poisson ? "poisson" : "gaussian";
}

namespace
{
struct TermSums
{
    std::vector<CompensatedSum> phi;  // row-major m x n
    std::vector<CompensatedSum> dark;

    void merge(const TermSums& o)
    {
        for (std::size_t i = 0; i < phi.size(); ++i)
            phi[i].merge(o.phi[i]);
        for (std::size_t i = 0; i < dark.size(); ++i)
            dark[i].merge(o.dark[i]);
    }
};

void check_finite(const GradientReport& r)
{
    if (!all_finite(r.grad_phi) || (r.grad_dark && !all_finite(*r.grad_dark)))
        throw_numerical("non-finite gradient entries");
}
}  // namespace

GradientReport grad_poisson_on_grid(const PoissonChannel& ch,
                                    const FiniteDistribution& d,
                                    const OutputGrid& grid,
                                    double max_cells)
{
    ch.require_compatible(d);
    ch.require_positive_dark();
    require_feasible(grid, max_cells);
    const auto m = ch.outputs();
    const auto n = ch.inputs();
    const auto mn = static_cast<std::size_t>(m * n);

    Vec rate_min = Vec::Constant(m, std::numeric_limits<double>::infinity());
    Vec rate_max = Vec::Zero(m);
    Vec x_max = Vec::Zero(n);
    std::vector<Vec> log_rates(d.size());
    for (std::size_t k = 0; k < d.size(); ++k)
    {
        const Vec r = ch.rates(d.atom(k));
        rate_min = rate_min.cwiseMin(r);
        rate_max = rate_max.cwiseMax(r);
        x_max = x_max.cwiseMax(d.atom(k));
        log_rates[k] = r.array().log().matrix();
    }

    // Both expectations are summed over the same grid cells, the prior term
    // as sum_k P(y, x_k) x_kj log r_i(x_k). Truncation then drops matching
    // pieces of the two terms, so they cancel exactly whenever E[X|Y] = X or
    // the rate does not depend on X.
    const detail::PoissonCellSolver solver(ch, d);
    struct Terms
    {
        TermSums prior;
        TermSums post;
        void merge(const Terms& o)
        {
            prior.merge(o.prior);
            post.merge(o.post);
        }
    };
    const TermSums zero{std::vector<CompensatedSum>(mn), std::vector<CompensatedSum>(static_cast<std::size_t>(m))};
    const Terms sums = detail::reduce_grid(grid, Terms{zero, zero}, [&](Terms& acc, const Counts& y) {
        thread_local std::vector<double> w, ll;
        const double lev = solver.solve(y, w, ll);
        if (!(lev > -std::numeric_limits<double>::infinity())) return;
        const double py = std::exp(lev);
        Vec xhat = Vec::Zero(n);
        for (std::size_t k = 0; k < w.size(); ++k)
            xhat += w[k] * d.atom(k);
        const Vec rhat = ch.rates(xhat);
        for (Eigen::Index i = 0; i < m; ++i)
        {
            double prior_dark = 0.0;
            Vec prior_phi = Vec::Zero(n);
            for (std::size_t k = 0; k < w.size(); ++k)
            {
                const double wl = w[k] * log_rates[k][i];
                prior_dark += wl;
                prior_phi += wl * d.atom(k);
            }
            const double lr = std::log(rhat[i]);
            acc.prior.dark[static_cast<std::size_t>(i)] += py * prior_dark;
            acc.post.dark[static_cast<std::size_t>(i)] += py * lr;
            for (Eigen::Index j = 0; j < n; ++j)
            {
                acc.prior.phi[static_cast<std::size_t>(i * n + j)] += py * prior_phi[j];
                acc.post.phi[static_cast<std::size_t>(i * n + j)] += py * xhat[j] * lr;
            }
        }
    });
    const TermSums& prior = sums.prior;
    const TermSums& post = sums.post;

    GradientReport rep;
    rep.channel_kind = ChannelKind::poisson;
    rep.method = GradMethod::theorem;
    rep.truncation_mass_deficit = grid.deficit;
    rep.budget = static_cast<std::size_t>(grid.cell_count());
    rep.phi_prior_term.resize(m, n);
    rep.phi_posterior_term.resize(m, n);
    rep.dark_prior_term.resize(m);
    rep.dark_posterior_term.resize(m);
    Mat phi_err(m, n);
    Vec dark_err(m);
    for (Eigen::Index i = 0; i < m; ++i)
    {
        const auto si = static_cast<std::size_t>(i);
        rep.dark_prior_term[i] = prior.dark[si].value();
        rep.dark_posterior_term[i] = post.dark[si].value();
        // E[r_i|Y] lies in [rate_min_i, rate_max_i] and E[X_j|Y] <= x_max_j,
        // which bounds the integrand on the dropped cells.
        const double log_bound = std::max(std::abs(std::log(rate_min[i])), std::abs(std::log(rate_max[i])));
        dark_err[i] = grid.deficit * log_bound;
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const auto s = static_cast<std::size_t>(i * n + j);
            rep.phi_prior_term(i, j) = prior.phi[s].value();
            rep.phi_posterior_term(i, j) = post.phi[s].value();
            phi_err(i, j) = grid.deficit * x_max[j] * log_bound;
        }
    }
    rep.grad_phi = rep.phi_prior_term - rep.phi_posterior_term;
    rep.phi_error = phi_err;
    rep.grad_dark = rep.dark_prior_term - rep.dark_posterior_term;
    rep.dark_error = dark_err;
    check_finite(rep);
    return rep;
}

GradientReport grad_poisson(const PoissonChannel& ch,
                            const FiniteDistribution& d,
                            double epsilon,
                            double max_cells)
{
    ch.require_compatible(d);
    ch.require_positive_dark();
    return grad_poisson_on_grid(ch, d, build_output_grid(ch, d, epsilon), max_cells);
}

GradientReport grad_phi_poisson(const PoissonChannel& ch,
                                const FiniteDistribution& d,
                                double epsilon,
                                double max_cells)
{
    GradientReport rep = grad_poisson(ch, d, epsilon, max_cells);
    rep.grad_dark.reset();
    rep.dark_error.reset();
    return rep;
}

GradientReport grad_dark_poisson(const PoissonChannel& ch,
                                 const FiniteDistribution& d,
                                 double epsilon,
                                 double max_cells)
{
    return grad_poisson(ch, d, epsilon, max_cells);
}

namespace
{
struct PoissonMcAcc
{
    MatMoments phi_prior, phi_post, phi, dark_prior, dark_post, dark;

    void merge(const PoissonMcAcc& o)
    {
        phi_prior.merge(o.phi_prior);
        phi_post.merge(o.phi_post);
        phi.merge(o.phi);
        dark_prior.merge(o.dark_prior);
        dark_post.merge(o.dark_post);
        dark.merge(o.dark);
    }
};
}  // namespace

GradientReport grad_phi_poisson_mc(const PoissonChannel& ch,
                                   const FiniteDistribution& d,
                                   std::size_t budget,
                                   const RngStream& rng)
{
    require(budget >= 1, "budget must be at least 1");
    ch.require_compatible(d);
    ch.require_positive_dark();
    const auto m = ch.outputs();
    const auto n = ch.inputs();
    const detail::PoissonCellSolver solver(ch, d);
    const PoissonMcAcc init{MatMoments(m, n), MatMoments(m, n), MatMoments(m, n),
                            MatMoments(m, 1), MatMoments(m, 1), MatMoments(m, 1)};
    PoissonMcAcc acc = mc_reduce(budget, rng, init, [&](PoissonMcAcc& a, RngStream& s) {
        thread_local std::vector<double> w, ll;
        const std::size_t k = d.sample_index(s);
        const Vec& x = d.atom(k);
        const Counts y = poisson_sample(ch, x, s);
        solver.solve(y, w, ll);
        Vec xhat = Vec::Zero(n);
        for (std::size_t l = 0; l < w.size(); ++l)
            xhat += w[l] * d.atom(l);
        const Vec& r = solver.rates(k);
        const Vec rhat = ch.rates(xhat);
        Mat pp(m, n), qq(m, n), dp(m, 1), dq(m, 1);
        for (Eigen::Index i = 0; i < m; ++i)
        {
            const double lr = std::log(r[i]);
            const double lrh = std::log(rhat[i]);
            dp(i, 0) = lr;
            dq(i, 0) = lrh;
            for (Eigen::Index j = 0; j < n; ++j)
            {
                pp(i, j) = x[j] * lr;
                qq(i, j) = xhat[j] * lrh;
            }
        }
        a.phi_prior.add(pp);
        a.phi_post.add(qq);
        a.phi.add(pp - qq);
        a.dark_prior.add(dp);
        a.dark_post.add(dq);
        a.dark.add(dp - dq);
    });

    GradientReport rep;
    rep.channel_kind = ChannelKind::poisson;
    rep.method = GradMethod::monte_carlo;
    rep.phi_prior_term = acc.phi_prior.mean();
    rep.phi_posterior_term = acc.phi_post.mean();
    rep.grad_phi = acc.phi.mean();
    rep.phi_error = acc.phi.std_error();
    rep.dark_prior_term = acc.dark_prior.mean().col(0);
    rep.dark_posterior_term = acc.dark_post.mean().col(0);
    rep.grad_dark = Vec(acc.dark.mean().col(0));
    rep.dark_error = Vec(acc.dark.std_error().col(0));
    rep.budget = acc.phi.count();
    check_finite(rep);
    return rep;
}

namespace
{
struct GaussianMcAcc
{
    MatMoments outer;      // e e^T
    MatMoments projected;  // phi e e^T

    void merge(const GaussianMcAcc& o)
    {
        outer.merge(o.outer);
        projected.merge(o.projected);
    }
};
}  // namespace

GradientReport grad_phi_gaussian(const GaussianChannel& ch,
                                 const FiniteDistribution& d,
                                 std::size_t mc_samples,
                                 const RngStream& rng)
{
    require(mc_samples >= 1, "mc_samples must be at least 1");
    ch.require_compatible(d);
    const auto n = ch.inputs();
    const GaussianMcAcc init{MatMoments(n, n), MatMoments(ch.outputs(), n)};
    GaussianMcAcc acc = mc_reduce(mc_samples, rng, init, [&](GaussianMcAcc& a, RngStream& s) {
        const GaussianDraw draw = draw_gaussian(ch, d, s);
        const Vec e = d.atom(draw.atom) - draw.estimate;
        const Mat outer = e * e.transpose();
        a.outer.add(outer);
        a.projected.add(ch.phi() * outer);
    });
    const Mat raw = acc.outer.mean();
    const Mat mmse = 0.5 * (raw + raw.transpose());

    GradientReport rep;
    rep.channel_kind = ChannelKind::gaussian;
    rep.method = GradMethod::gaussian_mmse;
    rep.grad_phi = ch.phi() * mmse;
    // Standard error of the per-sample phi e e^T, i.e. the exact linear
    // propagation of the MMSE sampling error through phi.
    rep.phi_error = acc.projected.std_error();
    rep.budget = acc.outer.count();
    check_finite(rep);
    return rep;
}

namespace
{
double& parameter_ref(Mat& phi, Vec& dark, FdTarget t)
{
    if (t.param == FdTarget::Param::phi)
    {
        require(t.row >= 0 && t.row < phi.rows() && t.col >= 0 && t.col < phi.cols(),
                "phi entry out of range");
        return phi(t.row, t.col);
    }
    require(t.row >= 0 && t.row < dark.size(), "dark entry out of range");
    return dark[t.row];
}

std::string target_name(FdTarget t)
{
    std::ostringstream os;
    if (t.param == FdTarget::Param::phi)
        os << "phi[" << t.row << "][" << t.col << "]";
    else
        os << "dark[" << t.row << "]";
    return os.str();
}

/*!
 * Derivative of mi(v) at v0 for a parameter constrained to v >= lower
 * (lower = -inf for unconstrained parameters).
 */
template <class MiAt>
FdResult difference(MiAt mi_at, double v0, double h, double lower, FdScheme scheme, const std::string& name)
{
    require(h > 0.0 && std::isfinite(h), "finite difference step must be positive");
    FdResult res;
    const bool near_edge = v0 - lower < 2.0 * h;
    if (near_edge && scheme == FdScheme::central && v0 - h < lower)
    {
        std::ostringstream os;
        os << "perturbed parameter leaves the valid domain (" << name << " - h < " << lower
           << "); use a smaller h";
        throw_invalid(os.str());
    }
    if (near_edge && scheme == FdScheme::automatic)
    {
        // Forward differences at h and h/2, Richardson-combined to O(h^2).
        const auto f0 = mi_at(v0);
        const auto f1 = mi_at(v0 + 0.5 * h);
        const auto f2 = mi_at(v0 + h);
        const double d_half = (f1.value - f0.value) / (0.5 * h);
        const double d_full = (f2.value - f0.value) / h;
        res.derivative = 2.0 * d_half - d_full;
        res.error = (4.0 * (f0.error_bound + f1.error_bound) + 2.0 * (f0.error_bound + f2.error_bound)) / h;
        res.forward = true;
        return res;
    }
    const auto fp = mi_at(v0 + h);
    const auto fm = mi_at(v0 - h);
    res.derivative = (fp.value - fm.value) / (2.0 * h);
    res.error = (fp.error_bound + fm.error_bound) / (2.0 * h);
    return res;
}
}  // namespace

FdResult grad_fd(const PoissonChannel& ch,
                 const FiniteDistribution& d,
                 FdTarget target,
                 double h,
                 const FdOptions& opts)
{
    ch.require_compatible(d);
    const OutputGrid base = build_output_grid(ch, d, opts.epsilon);
    require_feasible(base, opts.max_cells);
    Mat phi = ch.phi();
    Vec dark = ch.dark();
    const double v0 = parameter_ref(phi, dark, target);
    auto mi_at = [&](double v) {
        Mat p = phi;
        Vec l = dark;
        parameter_ref(p, l, target) = v;
        const PoissonChannel perturbed(std::move(p), std::move(l));
        return mi_poisson_on_grid(perturbed, d, grid_with_bounds(perturbed, d, base.bounds, base.mass_floor),
                                  opts.max_cells);
    };
    return difference(mi_at, v0, h, 0.0, opts.scheme, target_name(target));
}

FdResult grad_fd(const GaussianChannel& ch,
                 const FiniteDistribution& d,
                 FdTarget target,
                 double h,
                 const FdOptions& opts)
{
    ch.require_compatible(d);
    require(target.param == FdTarget::Param::phi, "the Gaussian channel has no dark current");
    Mat phi = ch.phi();
    Vec unused;
    const double v0 = parameter_ref(phi, unused, target);
    auto mi_at = [&](double v) {
        Mat p = phi;
        p(target.row, target.col) = v;
        return mi_gaussian_quadrature(GaussianChannel(std::move(p)), d, opts.quadrature_nodes);
    };
    return difference(mi_at, v0, h, -std::numeric_limits<double>::infinity(), opts.scheme,
                      target_name(target));
}

GradientReport grad_fd_poisson(const PoissonChannel& ch,
                               const FiniteDistribution& d,
                               double h,
                               const FdOptions& opts)
{
    const auto m = ch.outputs();
    const auto n = ch.inputs();
    GradientReport rep;
    rep.channel_kind = ChannelKind::poisson;
    rep.method = GradMethod::finite_difference;
    rep.grad_phi.resize(m, n);
    rep.phi_error.resize(m, n);
    Vec gd(m), ge(m);
    for (Eigen::Index i = 0; i < m; ++i)
    {
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const double step = h > 0.0 ? h : default_fd_step(ch.phi()(i, j));
            const FdResult r = grad_fd(ch, d, FdTarget::phi_entry(i, j), step, opts);
            rep.grad_phi(i, j) = r.derivative;
            rep.phi_error(i, j) = r.error;
        }
        const double step = h > 0.0 ? h : default_fd_step(ch.dark()[i]);
        const FdResult r = grad_fd(ch, d, FdTarget::dark_entry(i), step, opts);
        gd[i] = r.derivative;
        ge[i] = r.error;
    }
    rep.grad_dark = gd;
    rep.dark_error = ge;
    rep.truncation_mass_deficit = build_output_grid(ch, d, opts.epsilon).deficit;
    return rep;
}

GradientReport grad_fd_gaussian(const GaussianChannel& ch,
                                const FiniteDistribution& d,
                                double h,
                                const FdOptions& opts)
{
    const auto m = ch.outputs();
    const auto n = ch.inputs();
    GradientReport rep;
    rep.channel_kind = ChannelKind::gaussian;
    rep.method = GradMethod::finite_difference;
    rep.grad_phi.resize(m, n);
    rep.phi_error.resize(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const double step = h > 0.0 ? h : default_fd_step(ch.phi()(i, j));
            const FdResult r = grad_fd(ch, d, FdTarget::phi_entry(i, j), step, opts);
            rep.grad_phi(i, j) = r.derivative;
            rep.phi_error(i, j) = r.error;
        }
    rep.budget = opts.quadrature_nodes;
    return rep;
}

namespace scalar
{
PoissonDerivatives poisson_derivatives(const std::vector<double>& atoms,
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
    double e_x_log = 0.0;
    double e_log = 0.0;
    for (std::size_t k = 0; k < K; ++k)
    {
        require(atoms[k] >= 0.0, "Poisson channel inputs must be nonnegative");
        const double r = phi * atoms[k] + lambda;
        r_max = std::max(r_max, r);
    }
    const std::int64_t bound = poisson_tail_bound(r_max, epsilon);

    double e_xhat_log = 0.0;
    double e_log_hat = 0.0;
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
        const double py = std::exp(log_py);
        for (std::size_t k = 0; k < K; ++k)
        {
            // Prior terms over the same cells as the posterior terms.
            const double w = std::exp(lw[k] - log_py);
            const double log_r = std::log(phi * atoms[k] + lambda);
            xhat += w * atoms[k];
            e_x_log += py * w * atoms[k] * log_r;
            e_log += py * w * log_r;
        }
        const double log_rhat = std::log(phi * xhat + lambda);
        e_xhat_log += py * xhat * log_rhat;
        e_log_hat += py * log_rhat;
    }
    return {e_x_log - e_xhat_log, e_log - e_log_hat};
}
}  // namespace scalar

}  // namespace infograd
