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

#include "infograd/bregman.hpp"

#include <algorithm>
#include <sstream>

#include <boost/math/tools/roots.hpp>

namespace infograd
{

bool in_domain(Domain dom, const Vec& x)
{
    if (!x.allFinite()) return false;
    switch (dom)
    {
        case Domain::real: return true;
        case Domain::nonnegative: return (x.array() >= 0.0).all();
        case Domain::positive: return (x.array() > 0.0).all();
        case Domain::negative: return (x.array() < 0.0).all();
    }
    return false;
}

Vec sample_domain(Domain dom, Eigen::Index dim, RngStream& rng)
{
    double lo = -3.0, hi = 3.0;
    switch (dom)
    {
        case Domain::real: break;
        case Domain::nonnegative: lo = 0.0; break;
        case Domain::positive: lo = 0.05; break;
        case Domain::negative:
            lo = -3.0;
            hi = -0.05;
            break;
    }
    Vec x(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        x[i] = lo + (hi - lo) * rng.uniform();
    return x;
}

namespace
{
void require_domain(const std::string& name, Domain dom, const Vec& x)
{
    if (!in_domain(dom, x))
        throw_invalid("argument outside the domain of generator '" + name + "'");
}

// The more restrictive of two coordinatewise domains.
Domain intersect(Domain a, Domain b)
{
    if (a == b) return a;
    if (a == Domain::real) return b;
    if (b == Domain::real) return a;
    if (a == Domain::negative || b == Domain::negative)
        throw_invalid("generators with disjoint domains cannot be combined");
    return Domain::positive;
}
}  // namespace

double bregman_scalar(const ScalarGenerator& g, const Vec& x, const Vec& y)
{
    require(x.size() == y.size(), "divergence arguments must have equal length");
    require_domain(g.name, g.domain, x);
    require_domain(g.name, g.domain, y);
    return g.eval(x) - g.eval(y) - g.grad(y).dot(x - y);
}

namespace generators
{
namespace
{
ScalarGenerator make(std::string name,
                     Domain dom,
                     std::function<double(const Vec&)> f,
                     std::function<Vec(const Vec&)> df)
{
    ScalarGenerator g;
    g.name = std::move(name);
    g.domain = dom;
    g.separable = true;
    g.eval = std::move(f);
    g.grad = std::move(df);
    return g;
}

ScalarGenerator with_conjugate(ScalarGenerator g, ScalarGenerator conj)
{
    g.conjugate = std::make_shared<const ScalarGenerator>(std::move(conj));
    return g;
}

ScalarGenerator xlogx_minus_x()
{
    return make(
        "unnormalized_entropy", Domain::positive,
        [](const Vec& x) { return (x.array() * x.array().log() - x.array()).sum(); },
        [](const Vec& x) { return Vec(x.array().log()); });
}

ScalarGenerator sum_exp()
{
    return make(
        "exponential", Domain::real, [](const Vec& s) { return s.array().exp().sum(); },
        [](const Vec& s) { return Vec(s.array().exp()); });
}

ScalarGenerator slogs_minus_s()
{
    return xlogx_minus_x();
}
}  // namespace

ScalarGenerator squared_norm()
{
    auto conj = make(
        "squared_norm_conjugate", Domain::real, [](const Vec& s) { return 0.25 * s.squaredNorm(); },
        [](const Vec& s) { return Vec(0.5 * s); });
    return with_conjugate(make(
                              "squared_norm", Domain::real, [](const Vec& x) { return x.squaredNorm(); },
                              [](const Vec& x) { return Vec(2.0 * x); }),
                          std::move(conj));
}

ScalarGenerator half_squared_norm()
{
    auto base = make(
        "half_squared_norm", Domain::real, [](const Vec& x) { return 0.5 * x.squaredNorm(); },
        [](const Vec& x) { return x; });
    return with_conjugate(base, base);
}

ScalarGenerator negative_entropy()
{
    auto conj = make(
        "negative_entropy_conjugate", Domain::real,
        [](const Vec& s) { return (s.array() - 1.0).exp().sum(); },
        [](const Vec& s) { return Vec((s.array() - 1.0).exp()); });
    return with_conjugate(make(
                              "negative_entropy", Domain::positive,
                              [](const Vec& x) { return (x.array() * x.array().log()).sum(); },
                              [](const Vec& x) { return Vec(x.array().log() + 1.0); }),
                          std::move(conj));
}

ScalarGenerator unnormalized_entropy()
{
    auto conj = sum_exp();
    conj.name = "unnormalized_entropy_conjugate";
    return with_conjugate(xlogx_minus_x(), std::move(conj));
}

ScalarGenerator exponential()
{
    auto conj = slogs_minus_s();
    conj.name = "exponential_conjugate";
    return with_conjugate(sum_exp(), std::move(conj));
}

ScalarGenerator burg_entropy()
{
    auto conj = make(
        "burg_entropy_conjugate", Domain::negative,
        [](const Vec& s) { return (-1.0 - (-s.array()).log()).sum(); },
        [](const Vec& s) { return Vec(-1.0 / s.array()); });
    return with_conjugate(make(
                              "burg_entropy", Domain::positive,
                              [](const Vec& x) { return -x.array().log().sum(); },
                              [](const Vec& x) { return Vec(-1.0 / x.array()); }),
                          std::move(conj));
}

std::vector<ScalarGenerator> closed_form_catalog()
{
    return {squared_norm(), half_squared_norm(), negative_entropy(), unnormalized_entropy(),
            exponential(), burg_entropy()};
}

ScalarGenerator by_name(std::string_view name)
{
    for (auto& g : closed_form_catalog())
        if (g.name == name) return g;
    if (name == "itakura_saito") return burg_entropy();
    throw_invalid("unknown generator '" + std::string(name) + "'");
}
}  // namespace generators

namespace
{
// Solve f'(x) = s for a strictly convex separable 1-D generator.
double invert_gradient(const ScalarGenerator& g, double s)
{
    auto slope = [&](double x) { return g.grad(Vec::Constant(1, x))[0]; };
    auto fail = [&]() -> double {
        std::ostringstream os;
        os << "gradient of '" << g.name << "' is not invertible at s = " << s;
        throw_invalid(os.str());
    };
    double lo = 0.0, hi = 0.0;
    switch (g.domain)
    {
        case Domain::real:
            lo = -1.0;
            hi = 1.0;
            break;
        case Domain::nonnegative:
        case Domain::positive:
            lo = 0.5;
            hi = 1.0;
            break;
        case Domain::negative:
            lo = -1.0;
            hi = -0.5;
            break;
    }
    for (int it = 0; slope(lo) > s; ++it)
    {
        if (it > 1100) return fail();
        if (g.domain == Domain::real || g.domain == Domain::negative)
            lo = lo * 2.0 - 1.0;
        else
            lo *= 0.5;
        if (lo == 0.0 && g.domain == Domain::positive) return fail();
    }
    for (int it = 0; slope(hi) < s; ++it)
    {
        if (it > 1100) return fail();
        if (g.domain == Domain::negative)
            hi *= 0.5;
        else
            hi = hi * 2.0 + 1.0;
        if (!std::isfinite(hi)) return fail();
    }
    std::uintmax_t iters = 200;
    auto root = boost::math::tools::toms748_solve([&](double x) { return slope(x) - s; }, lo, hi,
                                                  boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (root.first + root.second);
}
}  // namespace

ScalarGenerator legendre_dual(const ScalarGenerator& g)
{
    if (g.conjugate) return *g.conjugate;
    if (!g.separable)
        throw_invalid("generator '" + g.name +
                      "' has no closed-form conjugate and is not separable");
    auto base = std::make_shared<const ScalarGenerator>(g);
    ScalarGenerator dual;
    dual.name = g.name + "_conjugate";
    dual.domain = Domain::real;
    dual.separable = true;
    dual.grad = [base](const Vec& s) {
        Vec x(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i)
            x[i] = invert_gradient(*base, s[i]);
        return x;
    };
    dual.eval = [base](const Vec& s) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
        {
            const double x = invert_gradient(*base, s[i]);
            total += s[i] * x - base->eval(Vec::Constant(1, x));
        }
        return total;
    };
    dual.conjugate = base;
    return dual;
}

double duality_gap(const ScalarGenerator& g, const ScalarGenerator& dual, const Vec& x, const Vec& y)
{
    const Vec xs = g.grad(x);
    const Vec ys = g.grad(y);
    const double primal = bregman_scalar(g, x, y);
    const double dual_value = dual.eval(ys) - dual.eval(xs) - dual.grad(xs).dot(ys - xs);
    return std::abs(primal - dual_value);
}

std::string_view to_string(ConeKind c)
{
    return c == ConeKind::entrywise_nonneg ? "entrywise_nonneg" : "psd_square";
}

double ConeOrder::margin(const Mat& a) const
{
    if (kind_ == ConeKind::entrywise_nonneg) return a.minCoeff();
    require(a.rows() == a.cols(), "the PSD cone needs square matrices");
    const Mat sym = 0.5 * (a + a.transpose());
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Mat> eig(sym, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() - asym;
}

bool ConeOrder::contains(const Mat& a, double tol) const
{
    return margin(a) >= -tol;
}

Mat bregman_generalized(const MatrixGenerator& g, const Vec& x, const Vec& y)
{
    require(x.size() == g.input_dim && y.size() == g.input_dim,
            "divergence arguments must match the generator input dimension");
    require_domain(g.name, g.domain, x);
    require_domain(g.name, g.domain, y);
    return g.eval(x) - g.eval(y) - g.frechet(y, x - y);
}

MatrixGenerator poisson_generator(const Mat& phi, const Vec& dark)
{
    const PoissonChannel ch(phi, dark);
    ch.require_positive_dark();
    const auto m = phi.rows();
    const auto n = phi.cols();
    MatrixGenerator g;
    g.name = "poisson";
    g.input_dim = n;
    g.rows = n;
    g.cols = m;
    g.domain = Domain::nonnegative;
    g.cone = ConeKind::entrywise_nonneg;
    g.convex_in_cone = false;
    g.orientation = Orientation::input_by_output;
    g.eval = [phi, dark, m, n](const Vec& x) {
        const Vec log_rate = (phi * x + dark).array().log();
        Mat out = x * log_rate.transpose();
        out -= x * Vec::Ones(m).transpose();
        out.array() += 1.0;
        (void)n;
        return out;
    };
    g.frechet = [phi, dark, m](const Vec& y, const Vec& h) {
        const Vec rate = phi * y + dark;
        const Vec log_rate = rate.array().log();
        const Vec scaled = (phi * h).cwiseQuotient(rate);
        Mat out = h * log_rate.transpose() + y * scaled.transpose();
        out -= h * Vec::Ones(m).transpose();
        return out;
    };
    return g;
}

MatrixGenerator gaussian_generator(const Mat& phi)
{
    require(phi.rows() > 0 && phi.cols() > 0 && all_finite(phi), "phi must be a finite non-empty matrix");
    MatrixGenerator g;
    g.name = "gaussian";
    g.input_dim = phi.cols();
    g.rows = phi.rows();
    g.cols = phi.cols();
    g.domain = Domain::real;
    g.orientation = Orientation::output_by_input;
    if (phi.rows() == phi.cols())
    {
        g.cone = ConeKind::psd_square;
        // phi v v^T is symmetric PSD for every v only when phi = c I, c >= 0.
        const double c = phi(0, 0);
        const Mat scaled_identity = c * Mat::Identity(phi.rows(), phi.cols());
        g.convex_in_cone = c >= 0.0 && phi == scaled_identity;
    }
    else
    {
        g.cone = ConeKind::entrywise_nonneg;
        g.convex_in_cone = false;
    }
    g.eval = [phi](const Vec& x) { return Mat(phi * (x * x.transpose())); };
    g.frechet = [phi](const Vec& y, const Vec& h) {
        return Mat(phi * (h * y.transpose() + y * h.transpose()));
    };
    return g;
}

MatrixGenerator stacked_generator(std::vector<ScalarGenerator> entries,
                                  Eigen::Index rows,
                                  Eigen::Index cols,
                                  Eigen::Index input_dim)
{
    require(rows > 0 && cols > 0 && input_dim > 0, "stacked generator needs positive shape");
    require(static_cast<Eigen::Index>(entries.size()) == rows * cols,
            "stacked generator needs rows * cols scalar entries");
    MatrixGenerator g;
    g.name = "stacked";
    g.input_dim = input_dim;
    g.rows = rows;
    g.cols = cols;
    g.domain = Domain::real;
    for (const auto& e : entries)
    {
        g.domain = intersect(g.domain, e.domain);
        g.name += ":" + e.name;
    }
    g.cone = ConeKind::entrywise_nonneg;
    g.convex_in_cone = true;
    g.orientation = Orientation::output_by_input;
    auto shared = std::make_shared<const std::vector<ScalarGenerator>>(std::move(entries));
    g.eval = [shared, rows, cols](const Vec& x) {
        Mat out(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                out(r, c) = (*shared)[static_cast<std::size_t>(r * cols + c)].eval(x);
        return out;
    };
    g.frechet = [shared, rows, cols](const Vec& y, const Vec& h) {
        Mat out(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                out(r, c) = (*shared)[static_cast<std::size_t>(r * cols + c)].grad(y).dot(h);
        return out;
    };
    return g;
}

MatrixGenerator combine(double c1, const MatrixGenerator& f, double c2, const MatrixGenerator& g)
{
    require(c1 > 0.0 && c2 > 0.0, "combination weights must be positive");
    require(f.rows == g.rows && f.cols == g.cols && f.input_dim == g.input_dim,
            "combined generators must have equal shapes");
    MatrixGenerator out;
    std::ostringstream name;
    name << c1 << "*" << f.name << "+" << c2 << "*" << g.name;
    out.name = name.str();
    out.input_dim = f.input_dim;
    out.rows = f.rows;
    out.cols = f.cols;
    out.domain = intersect(f.domain, g.domain);
    out.cone = f.cone;
    out.convex_in_cone = f.convex_in_cone && g.convex_in_cone && f.cone == g.cone;
    out.orientation = f.orientation;
    auto fe = f.eval, ge = g.eval;
    auto ff = f.frechet, gf = g.frechet;
    out.eval = [=](const Vec& x) { return Mat(c1 * fe(x) + c2 * ge(x)); };
    out.frechet = [=](const Vec& y, const Vec& h) { return Mat(c1 * ff(y, h) + c2 * gf(y, h)); };
    return out;
}

Mat to_gradient_orientation(const MatrixGenerator& g, const Mat& value)
{
    if (g.orientation == Orientation::input_by_output) return value.transpose();
    return value;
}

namespace
{
constexpr std::size_t max_witnesses = 3;

double scale_of(const Mat& a)
{
    return a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
}
}  // namespace

PropertyReport check_properties(const MatrixGenerator& g,
                                const ConeOrder& cone,
                                std::size_t trials,
                                const RngStream& rng,
                                const MatrixGenerator* companion)
{
    const MatrixGenerator& other = companion ? *companion : g;
    PropertyReport rep;
    rep.generator = g.name;
    rep.cone = cone.kind();
    rep.asserted = g.convex_in_cone && g.cone == cone.kind();
    rep.trials = trials;
    rep.min_nonneg_margin = std::numeric_limits<double>::infinity();
    rep.min_convexity_margin = std::numeric_limits<double>::infinity();
    std::size_t nonneg_w = 0, conv_w = 0, lin_w = 0;
    const Domain dom = intersect(g.domain, other.domain);

    RngStream stream = rng.split(0);
    for (std::size_t t = 0; t < trials; ++t)
    {
        const Vec x1 = sample_domain(dom, g.input_dim, stream);
        const Vec x2 = sample_domain(dom, g.input_dim, stream);
        const Vec y = sample_domain(dom, g.input_dim, stream);
        const double theta = stream.uniform();
        const double c1 = 0.1 + 4.9 * stream.uniform();
        const double c2 = 0.1 + 4.9 * stream.uniform();

        const Mat d1 = bregman_generalized(g, x1, y);
        const Mat d2 = bregman_generalized(g, x2, y);
        const Vec mix = theta * x1 + (1.0 - theta) * x2;
        const Mat dmix = bregman_generalized(g, mix, y);
        const double scale = 1.0 + std::max({scale_of(g.eval(x1)), scale_of(g.eval(x2)), scale_of(g.eval(y))});
        const double tol = 1e-10 * scale;

        const double m1 = cone.margin(d1);
        rep.min_nonneg_margin = std::min(rep.min_nonneg_margin, m1);
        if (m1 < -tol)
        {
            ++rep.nonneg_violations;
            if (nonneg_w++ < max_witnesses) rep.witnesses.push_back({"nonnegativity", x1, Vec(), y, 0.0, m1});
        }

        const Mat gap = theta * d1 + (1.0 - theta) * d2 - dmix;
        const double m3 = cone.margin(gap);
        rep.min_convexity_margin = std::min(rep.min_convexity_margin, m3);
        if (m3 < -tol)
        {
            ++rep.convexity_violations;
            if (conv_w++ < max_witnesses) rep.witnesses.push_back({"convexity", x1, x2, y, theta, m3});
        }

        const MatrixGenerator mixed = combine(c1, g, c2, other);
        const Mat lhs = bregman_generalized(mixed, x1, y);
        const Mat rhs = c1 * d1 + c2 * bregman_generalized(other, x1, y);
        const double resid = (lhs - rhs).cwiseAbs().maxCoeff();
        rep.max_linearity_residual = std::max(rep.max_linearity_residual, resid);
        if (resid > 1e-10)
        {
            ++rep.linearity_violations;
            if (lin_w++ < max_witnesses) rep.witnesses.push_back({"linearity", x1, Vec(), y, 0.0, resid});
        }
    }
    return rep;
}

FrechetCheck check_frechet(const MatrixGenerator& g, std::size_t trials, const RngStream& rng)
{
    FrechetCheck out;
    RngStream stream = rng.split(1);
    for (std::size_t t = 0; t < trials; ++t)
    {
        Vec y = sample_domain(g.domain, g.input_dim, stream);
        if (g.domain != Domain::real) y.array() += 0.1;  // keep y +- step inside
        Vec h1(g.input_dim), h2(g.input_dim);
        for (Eigen::Index i = 0; i < g.input_dim; ++i)
        {
            h1[i] = stream.uniform() - 0.5;
            h2[i] = stream.uniform() - 0.5;
        }
        const double a = stream.uniform() * 4.0 - 2.0;
        const double b = stream.uniform() * 4.0 - 2.0;
        const Mat lin = g.frechet(y, a * h1 + b * h2) - a * g.frechet(y, h1) - b * g.frechet(y, h2);
        out.max_linearity_residual = std::max(out.max_linearity_residual, lin.cwiseAbs().maxCoeff());

        const double step = 1e-4;
        const Mat numeric = (g.eval(y + step * h1) - g.eval(y - step * h1)) / (2.0 * step);
        const Mat exact = g.frechet(y, h1);
        // Relative to |DF(y)(h)|, floored so that a near-zero derivative does
        // not turn rounding noise into a large ratio.
        const double denom = std::max(exact.norm(), 1e-3 * (1.0 + g.eval(y).norm()));
        out.max_relative_error = std::max(out.max_relative_error, (numeric - exact).norm() / denom);
    }
    return out;
}

Partition trivial_partition(const FiniteDistribution& d)
{
    return {"trivial", {d.probs()}};
}

Partition finest_partition(const FiniteDistribution& d)
{
    Partition p{"finest", {}};
    for (std::size_t c = 0; c < d.size(); ++c)
    {
        std::vector<double> row(d.size(), 0.0);
        row[c] = d.prob(c);
        p.cell_mass.push_back(std::move(row));
    }
    return p;
}

Partition poisson_parity_partition(const PoissonChannel& ch, const FiniteDistribution& d, Eigen::Index coordinate)
{
    ch.require_compatible(d);
    require(coordinate >= 0 && coordinate < ch.outputs(), "parity coordinate out of range");
    std::ostringstream name;
    name << "parity_y" << coordinate;
    Partition p{name.str(), {std::vector<double>(d.size()), std::vector<double>(d.size())}};
    for (std::size_t k = 0; k < d.size(); ++k)
    {
        const double r = ch.rates(d.atom(k))[coordinate];
        // P(Y even) = (1 + e^{-2r}) / 2 for Y ~ Pois(r)
        const double odd = -0.5 * std::expm1(-2.0 * r);
        p.cell_mass[0][k] = d.prob(k) * (1.0 - odd);
        p.cell_mass[1][k] = d.prob(k) * odd;
    }
    return p;
}

std::vector<Vec> cell_means(const FiniteDistribution& d, const Partition& p)
{
    require(!p.cell_mass.empty(), "partition has no cells");
    std::vector<Vec> means;
    for (std::size_t c = 0; c < p.cell_mass.size(); ++c)
    {
        const auto& mass = p.cell_mass[c];
        require(mass.size() == d.size(), "partition masses must cover every atom");
        double total = 0.0;
        Vec m = Vec::Zero(d.dim());
        for (std::size_t k = 0; k < d.size(); ++k)
        {
            total += mass[k];
            m += mass[k] * d.atom(k);
        }
        if (!(total > 0.0))
        {
            std::ostringstream os;
            os << "partition cell " << c << " is empty";
            throw_invalid(os.str());
        }
        means.push_back(m / total);
    }
    return means;
}

Mat expected_divergence(const MatrixGenerator& g,
                        const FiniteDistribution& d,
                        const Partition& p,
                        const std::vector<Vec>& estimate)
{
    require(estimate.size() == p.cell_mass.size(), "one estimate per partition cell is required");
    Mat total = Mat::Zero(g.rows, g.cols);
    for (std::size_t c = 0; c < p.cell_mass.size(); ++c)
        for (std::size_t k = 0; k < d.size(); ++k)
            if (p.cell_mass[c][k] > 0.0) total += p.cell_mass[c][k] * bregman_generalized(g, d.atom(k), estimate[c]);
    return total;
}

namespace
{
Vec clamp_into(Domain dom, Vec v)
{
    switch (dom)
    {
        case Domain::real: break;
        case Domain::nonnegative: v = v.cwiseMax(0.0); break;
        case Domain::positive: v = v.cwiseMax(1e-9); break;
        case Domain::negative: v = v.cwiseMin(-1e-9); break;
    }
    return v;
}
}  // namespace

MinimizerReport minimizer_check(const MatrixGenerator& g,
                                const FiniteDistribution& d,
                                const Partition& p,
                                std::size_t trials,
                                const RngStream& rng)
{
    MinimizerReport rep;
    rep.partition = p.name;
    rep.conditional_means = cell_means(d, p);
    for (const auto& c : rep.conditional_means)
        require(in_domain(g.domain, c), "conditional mean outside the generator domain");
    rep.expected_at_mean = expected_divergence(g, d, p, rep.conditional_means);
    rep.trials = trials;
    rep.min_margin = std::numeric_limits<double>::infinity();
    const ConeOrder cone(g.cone);
    const double tol = 1e-12 * (1.0 + scale_of(rep.expected_at_mean));
    const std::size_t cells = rep.conditional_means.size();

    RngStream stream = rng.split(2);
    for (std::size_t t = 0; t < trials; ++t)
    {
        std::vector<Vec> candidate = rep.conditional_means;
        const double mode = stream.uniform();
        const double sigma = std::pow(10.0, -4.0 + 4.0 * stream.uniform());
        auto perturb = [&](Vec& v) {
            for (Eigen::Index i = 0; i < v.size(); ++i)
                v[i] += sigma * stream.normal();
            v = clamp_into(g.domain, v);
        };
        if (mode < 0.4)
        {
            for (auto& v : candidate)
                perturb(v);
        }
        else if (mode < 0.8)
        {
            const auto c = std::min(cells - 1, static_cast<std::size_t>(stream.uniform() * static_cast<double>(cells)));
            perturb(candidate[c]);
        }
        else
        {
            for (auto& v : candidate)
                v = sample_domain(g.domain, d.dim(), stream);
        }
        if (candidate == rep.conditional_means) continue;

        const Mat margin = expected_divergence(g, d, p, candidate) - rep.expected_at_mean;
        const double cm = cone.margin(margin);
        if (cm < rep.min_margin)
        {
            rep.min_margin = cm;
            rep.worst_margin_matrix = margin;
            rep.worst_candidate = candidate;
        }
        if (scale_of(margin) <= tol)
        {
            ++rep.ties;
            continue;
        }
        // Candidate dominates when its expected divergence is <=_K the
        // conditional mean's, i.e. -margin lies in K.
        if (cone.contains(-margin, tol))
        {
            if (rep.dominating++ == 0)
            {
                rep.dominating_candidate = candidate;
                rep.dominating_margin_matrix = margin;
            }
        }
    }
    return rep;
}

Vec minimize_expected_divergence(const MatrixGenerator& g,
                                 const std::vector<Vec>& atoms,
                                 const std::vector<double>& weights,
                                 Vec start)
{
    require(g.rows == 1 && g.cols == 1, "numerical minimization needs a 1x1 generator");
    require(!atoms.empty() && atoms.size() == weights.size(), "one weight per atom is required");
    const Eigen::Index n = g.input_dim;

    auto first_derivative = [&](const Vec& y) {
        Vec out(n);
        for (Eigen::Index i = 0; i < n; ++i)
            out[i] = g.frechet(y, Vec::Unit(n, i))(0, 0);
        return out;
    };
    // d/dy sum_k w_k D(x_k, y) = -H(y) sum_k w_k (x_k - y); the Hessian-vector
    // product is a central difference of the first derivative along the
    // residual, so the residual itself carries no cancellation error.
    auto objective_gradient = [&](const Vec& y, double& residual_norm) {
        Vec r = Vec::Zero(n);
        for (std::size_t k = 0; k < atoms.size(); ++k)
            r += weights[k] * (atoms[k] - y);
        residual_norm = r.norm();
        if (residual_norm == 0.0) return Vec(Vec::Zero(n));
        const Vec u = r / residual_norm;
        double s = 1e-5 * (1.0 + y.norm());
        while (!in_domain(g.domain, y - s * u) || !in_domain(g.domain, y + s * u))
        {
            s *= 0.5;
            if (s < 1e-300) throw_numerical("minimization reached the domain boundary");
        }
        const Vec hu = (first_derivative(y + s * u) - first_derivative(y - s * u)) / (2.0 * s);
        return Vec(-residual_norm * hu);
    };

    Vec y = clamp_into(g.domain, std::move(start));
    require_domain(g.name, g.domain, y);
    double rn = 0.0;
    Vec grad = objective_gradient(y, rn);
    for (int it = 0; it < 10000 && rn > 1e-16 * (1.0 + y.norm()); ++it)
    {
        double step = 1.0;
        bool moved = false;
        while (step > 1e-20)
        {
            const Vec cand = y - step * grad;
            if (in_domain(g.domain, cand))
            {
                double cand_rn = 0.0;
                const Vec cand_grad = objective_gradient(cand, cand_rn);
                if (cand_grad.norm() < grad.norm())
                {
                    y = cand;
                    grad = cand_grad;
                    rn = cand_rn;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return y;
}

}  // namespace infograd
