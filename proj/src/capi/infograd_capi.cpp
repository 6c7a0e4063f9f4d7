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

#include "infograd/infograd.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <variant>

#include "infograd/bregman.hpp"
#include "infograd/design.hpp"
#include "infograd/gradients.hpp"
#include "infograd/information.hpp"
#include "infograd/parallel.hpp"
#include "infograd/text_io.hpp"
#include "infograd/verify.hpp"

struct infograd_matrix
{
    infograd::Mat value;
};

struct infograd_prior
{
    infograd::FiniteDistribution value;
};

struct infograd_channel
{
    infograd::AnyChannel value;
};

struct infograd_gradient
{
    infograd::GradientReport value;
};

struct infograd_design_problem
{
    infograd::DesignProblem value;
};

struct infograd_design_result
{
    infograd::DesignTrace value;
};

namespace
{
using namespace infograd;

thread_local std::string last_error;

// Stream ids of the seeded Monte Carlo entry points.
constexpr std::uint64_t mi_stream = 1;
constexpr std::uint64_t grad_stream = 2;

infograd_status fail(infograd_status status, const std::string& what)
{
    last_error = what;
    return status;
}

template <class F>
infograd_status guarded(F&& body)
{
    try
    {
        body();
        return INFOGRAD_OK;
    }
    catch (const Error& e)
    {
        switch (e.kind())
        {
            case ErrorKind::invalid_argument: return fail(INFOGRAD_ERR_INVALID, e.what());
            case ErrorKind::infeasible: return fail(INFOGRAD_ERR_INFEASIBLE, e.what());
            case ErrorKind::numerical: return fail(INFOGRAD_ERR_NUMERICAL, e.what());
            case ErrorKind::io: return fail(INFOGRAD_ERR_IO, e.what());
        }
        return fail(INFOGRAD_ERR_INTERNAL, e.what());
    }
    catch (const std::bad_alloc&)
    {
        return fail(INFOGRAD_ERR_INTERNAL, "out of memory");
    }
    catch (const std::exception& e)
    {
        return fail(INFOGRAD_ERR_INTERNAL, e.what());
    }
    catch (...)
    {
        return fail(INFOGRAD_ERR_INTERNAL, "unknown error");
    }
}

void require_ptr(const void* p, const char* what)
{
    if (!p) throw_invalid(std::string(what) + " must not be null");
}

char* copy_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

Mat matrix_from(size_t rows, size_t cols, const double* data)
{
    require(rows > 0 && cols > 0, "matrix dimensions must be positive");
    require_ptr(data, "matrix data");
    Mat a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::memcpy(a.data(), data, rows * cols * sizeof(double));
    return a;
}

infograd_matrix* wrap(Mat a)
{
    return new infograd_matrix{std::move(a)};
}

Vec as_vector(const Mat& a)
{
    if (a.cols() == 1) return a.col(0);
    if (a.rows() == 1) return a.row(0).transpose();
    throw_invalid("expected a vector (one row or one column)");
}

MiMethod mi_method_of(infograd_mi_method m)
{
    switch (m)
    {
        case INFOGRAD_MI_ENUMERATION: return MiMethod::enumeration;
        case INFOGRAD_MI_QUADRATURE: return MiMethod::quadrature;
        case INFOGRAD_MI_MONTE_CARLO: return MiMethod::monte_carlo;
    }
    throw_invalid("unknown MI method");
}

infograd_mi_method mi_method_to_c(MiMethod m)
{
    switch (m)
    {
        case MiMethod::enumeration: return INFOGRAD_MI_ENUMERATION;
        case MiMethod::quadrature: return INFOGRAD_MI_QUADRATURE;
        case MiMethod::monte_carlo: return INFOGRAD_MI_MONTE_CARLO;
    }
    return INFOGRAD_MI_ENUMERATION;
}

DesignOptions design_options_of(const infograd_design_options* opts)
{
    infograd_design_options o;
    if (opts)
        o = *opts;
    else
        infograd_design_options_default(&o);
    DesignOptions d;
    d.max_iters = o.max_iters;
    d.tol = o.tol;
    d.mi_method = mi_method_of(o.mi_method);
    d.budget = o.budget;
    d.seed = o.seed;
    d.epsilon = o.epsilon;
    d.max_cells = o.max_cells;
    return d;
}

GradientReport run_gradient(const AnyChannel& any, const FiniteDistribution& d, const infograd_grad_options& o)
{
    const bool want_dark = o.wrt == INFOGRAD_WRT_DARK;
    require(o.wrt == INFOGRAD_WRT_PHI || want_dark, "unknown gradient target");
    FdOptions fd;
    fd.epsilon = o.epsilon;
    fd.max_cells = o.max_cells;
    fd.quadrature_nodes = o.quadrature_nodes ? o.quadrature_nodes : default_quadrature_nodes;
    fd.scheme = o.fd_central_only ? FdScheme::central : FdScheme::automatic;

    if (const auto* ch = std::get_if<PoissonChannel>(&any))
    {
        if (want_dark) ch->require_positive_dark();
        switch (o.method)
        {
            case INFOGRAD_GRAD_THEOREM:
                return want_dark ? grad_dark_poisson(*ch, d, o.epsilon, o.max_cells)
                                 : grad_phi_poisson(*ch, d, o.epsilon, o.max_cells);
            case INFOGRAD_GRAD_MONTE_CARLO:
                require(o.budget >= 1, "budget must be at least 1");
                return grad_phi_poisson_mc(*ch, d, o.budget, RngStream(o.seed, grad_stream));
            case INFOGRAD_GRAD_FINITE_DIFF:
                return grad_fd_poisson(*ch, d, o.fd_step, fd);
        }
        throw_invalid("unknown gradient method");
    }
    const auto& ch = std::get<GaussianChannel>(any);
    require(!want_dark, "the Gaussian channel has no dark current");
    switch (o.method)
    {
        case INFOGRAD_GRAD_THEOREM:
        case INFOGRAD_GRAD_MONTE_CARLO:
            require(o.budget >= 1, "budget must be at least 1");
            return grad_phi_gaussian(ch, d, o.budget, RngStream(o.seed, grad_stream));
        case INFOGRAD_GRAD_FINITE_DIFF: return grad_fd_gaussian(ch, d, o.fd_step, fd);
    }
    throw_invalid("unknown gradient method");
}
}  // namespace

extern "C" {

const char* infograd_last_error(void)
{
    return last_error.c_str();
}

const char* infograd_version(void)
{
    return "0.1.0";
}

const char* infograd_status_name(infograd_status status)
{
    switch (status)
    {
        case INFOGRAD_OK: return "ok";
        case INFOGRAD_ERR_INVALID: return "invalid_argument";
        case INFOGRAD_ERR_INFEASIBLE: return "infeasible";
        case INFOGRAD_ERR_NUMERICAL: return "numerical";
        case INFOGRAD_ERR_IO: return "io";
        case INFOGRAD_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

void infograd_set_threads(size_t threads)
{
    set_max_threads(threads);
}

size_t infograd_get_threads(void)
{
    return max_threads();
}

void infograd_string_free(char* s)
{
    std::free(s);
}

infograd_status infograd_matrix_create(size_t rows, size_t cols, const double* data, infograd_matrix** out)
{
    return guarded([&] {
        require_ptr(out, "out");
        *out = wrap(matrix_from(rows, cols, data));
    });
}

infograd_status infograd_matrix_load_csv(const char* path, infograd_matrix** out)
{
    return guarded([&] {
        require_ptr(path, "path");
        require_ptr(out, "out");
        *out = wrap(load_csv_matrix(path));
    });
}

infograd_status infograd_matrix_parse_csv(const char* text, infograd_matrix** out)
{
    return guarded([&] {
        require_ptr(text, "text");
        require_ptr(out, "out");
        *out = wrap(parse_csv_matrix(text));
    });
}

infograd_status infograd_matrix_to_csv(const infograd_matrix* m, char** out)
{
    return guarded([&] {
        require_ptr(m, "matrix");
        require_ptr(out, "out");
        *out = copy_string(matrix_to_csv(m->value));
    });
}

infograd_status infograd_matrix_save_csv(const infograd_matrix* m, const char* path)
{
    return guarded([&] {
        require_ptr(m, "matrix");
        require_ptr(path, "path");
        write_text_file(path, matrix_to_csv(m->value));
    });
}

size_t infograd_matrix_rows(const infograd_matrix* m)
{
    return m ? static_cast<size_t>(m->value.rows()) : 0;
}

size_t infograd_matrix_cols(const infograd_matrix* m)
{
    return m ? static_cast<size_t>(m->value.cols()) : 0;
}

const double* infograd_matrix_data(const infograd_matrix* m)
{
    return m ? m->value.data() : nullptr;
}

void infograd_matrix_free(infograd_matrix* m)
{
    delete m;
}

infograd_status infograd_prior_create(size_t count,
                                      size_t dim,
                                      const double* atoms,
                                      const double* probs,
                                      infograd_prior** out)
{
    return guarded([&] {
        require_ptr(out, "out");
        require(count > 0 && dim > 0, "prior needs at least one atom of positive dimension");
        require_ptr(atoms, "atoms");
        require_ptr(probs, "probs");
        std::vector<Vec> xs;
        for (size_t k = 0; k < count; ++k)
            xs.push_back(Eigen::Map<const Vec>(atoms + k * dim, static_cast<Eigen::Index>(dim)));
        *out = new infograd_prior{FiniteDistribution(std::move(xs), std::vector<double>(probs, probs + count))};
    });
}

infograd_status infograd_prior_load(const char* path, infograd_prior** out)
{
    return guarded([&] {
        require_ptr(path, "path");
        require_ptr(out, "out");
        *out = new infograd_prior{load_prior(path)};
    });
}

size_t infograd_prior_size(const infograd_prior* p)
{
    return p ? p->value.size() : 0;
}

size_t infograd_prior_dim(const infograd_prior* p)
{
    return p ? static_cast<size_t>(p->value.dim()) : 0;
}

void infograd_prior_free(infograd_prior* p)
{
    delete p;
}

infograd_status infograd_channel_create_poisson(size_t m,
                                                size_t n,
                                                const double* phi,
                                                const double* dark,
                                                infograd_channel** out)
{
    return guarded([&] {
        require_ptr(out, "out");
        require_ptr(dark, "dark");
        Mat p = matrix_from(m, n, phi);
        Vec l = Eigen::Map<const Vec>(dark, static_cast<Eigen::Index>(m));
        *out = new infograd_channel{PoissonChannel(std::move(p), std::move(l))};
    });
}

infograd_status infograd_channel_create_gaussian(size_t m, size_t n, const double* phi, infograd_channel** out)
{
    return guarded([&] {
        require_ptr(out, "out");
        *out = new infograd_channel{GaussianChannel(matrix_from(m, n, phi))};
    });
}

infograd_status infograd_channel_load(const char* path, infograd_channel** out)
{
    return guarded([&] {
        require_ptr(path, "path");
        require_ptr(out, "out");
        *out = new infograd_channel{load_channel(path)};
    });
}

infograd_channel_kind infograd_channel_kind_of(const infograd_channel* ch)
{
    return ch && std::holds_alternative<GaussianChannel>(ch->value) ? INFOGRAD_CHANNEL_GAUSSIAN
                                                                     : INFOGRAD_CHANNEL_POISSON;
}

void infograd_channel_free(infograd_channel* ch)
{
    delete ch;
}

void infograd_mi_options_default(infograd_mi_options* opts)
{
    if (!opts) return;
    opts->method = INFOGRAD_MI_ENUMERATION;
    opts->epsilon = 1e-12;
    opts->max_cells = default_max_cells;
    opts->budget = 100000;
    opts->seed = 0;
}

infograd_status infograd_mi(const infograd_channel* ch,
                            const infograd_prior* prior,
                            const infograd_mi_options* opts,
                            infograd_mi_result* out)
{
    return guarded([&] {
        require_ptr(ch, "channel");
        require_ptr(prior, "prior");
        require_ptr(out, "out");
        infograd_mi_options o;
        if (opts)
            o = *opts;
        else
            infograd_mi_options_default(&o);
        const MiMethod method = mi_method_of(o.method);
        const RngStream rng(o.seed, mi_stream);
        MiEstimate est;
        if (const auto* p = std::get_if<PoissonChannel>(&ch->value))
        {
            switch (method)
            {
                case MiMethod::enumeration: est = mi_poisson_enum(*p, prior->value, o.epsilon, o.max_cells); break;
                case MiMethod::monte_carlo:
                    require(o.budget >= 1, "budget must be at least 1");
                    est = mi_poisson_mc(*p, prior->value, o.budget, rng);
                    break;
                case MiMethod::quadrature:
                    throw_invalid("quadrature is available for the Gaussian channel only; use enum or mc");
            }
        }
        else
        {
            est = mi_gaussian(std::get<GaussianChannel>(ch->value), prior->value, method, o.budget, rng);
        }
        out->value = est.value;
        out->error_bound = est.error_bound;
        out->truncation_mass_deficit = est.truncation_mass_deficit;
        out->budget = est.budget;
        out->method = mi_method_to_c(est.method);
    });
}

void infograd_grad_options_default(infograd_grad_options* opts)
{
    if (!opts) return;
    opts->method = INFOGRAD_GRAD_THEOREM;
    opts->wrt = INFOGRAD_WRT_PHI;
    opts->epsilon = 1e-12;
    opts->max_cells = default_max_cells;
    opts->budget = 100000;
    opts->seed = 0;
    opts->fd_step = 0.0;
    opts->fd_central_only = 0;
    opts->quadrature_nodes = default_quadrature_nodes;
}

infograd_status infograd_grad(const infograd_channel* ch,
                              const infograd_prior* prior,
                              const infograd_grad_options* opts,
                              infograd_gradient** out)
{
    return guarded([&] {
        require_ptr(ch, "channel");
        require_ptr(prior, "prior");
        require_ptr(out, "out");
        infograd_grad_options o;
        if (opts)
            o = *opts;
        else
            infograd_grad_options_default(&o);
        *out = new infograd_gradient{run_gradient(ch->value, prior->value, o)};
    });
}

infograd_status infograd_gradient_phi(const infograd_gradient* g, infograd_matrix** value, infograd_matrix** error)
{
    return guarded([&] {
        require_ptr(g, "gradient");
        require_ptr(value, "value");
        *value = wrap(g->value.grad_phi);
        if (error) *error = wrap(g->value.phi_error);
    });
}

infograd_status infograd_gradient_dark(const infograd_gradient* g, infograd_matrix** value, infograd_matrix** error)
{
    return guarded([&] {
        require_ptr(g, "gradient");
        require_ptr(value, "value");
        if (!g->value.grad_dark) throw_invalid("the dark-current gradient was not computed");
        *value = wrap(Mat(*g->value.grad_dark));
        if (error) *error = wrap(Mat(*g->value.dark_error));
    });
}

const char* infograd_gradient_method_name(const infograd_gradient* g)
{
    return g ? to_string(g->value.method).data() : "";
}

double infograd_gradient_deficit(const infograd_gradient* g)
{
    return g ? g->value.truncation_mass_deficit : 0.0;
}

uint64_t infograd_gradient_budget(const infograd_gradient* g)
{
    return g ? g->value.budget : 0;
}

void infograd_gradient_free(infograd_gradient* g)
{
    delete g;
}

infograd_status infograd_bregman(const char* generator,
                                 const infograd_matrix* x,
                                 const infograd_matrix* y,
                                 const infograd_channel* ch,
                                 infograd_matrix** out)
{
    return guarded([&] {
        require_ptr(generator, "generator");
        require_ptr(x, "x");
        require_ptr(y, "y");
        require_ptr(out, "out");
        const std::string name(generator);
        const Vec xv = as_vector(x->value);
        const Vec yv = as_vector(y->value);
        if (name == "poisson" || name == "gaussian")
        {
            if (!ch) throw_invalid("generator '" + name + "' needs a channel for its parameters");
            MatrixGenerator g;
            if (name == "poisson")
            {
                const auto* p = std::get_if<PoissonChannel>(&ch->value);
                if (!p) throw_invalid("generator 'poisson' needs a Poisson channel");
                g = poisson_generator(p->phi(), p->dark());
            }
            else
            {
                const Mat& phi = std::visit([](const auto& c) -> const Mat& { return c.phi(); }, ch->value);
                g = gaussian_generator(phi);
            }
            *out = wrap(bregman_generalized(g, xv, yv));
            return;
        }
        const ScalarGenerator g = generators::by_name(name);
        *out = wrap(Mat::Constant(1, 1, bregman_scalar(g, xv, yv)));
    });
}

infograd_status infograd_verify(const char* suite, uint64_t seed, char** json, int* passed)
{
    return guarded([&] {
        require_ptr(suite, "suite");
        require_ptr(json, "json");
        const VerifyReport rep = run_verify(parse_verify_suite(suite), seed);
        *json = copy_string(rep.to_json().dump(2));
        if (passed) *passed = rep.passed() ? 1 : 0;
    });
}

void infograd_design_options_default(infograd_design_options* opts)
{
    if (!opts) return;
    const DesignOptions d;
    opts->max_iters = d.max_iters;
    opts->tol = d.tol;
    opts->mi_method = mi_method_to_c(d.mi_method);
    opts->budget = d.budget;
    opts->seed = d.seed;
    opts->epsilon = d.epsilon;
    opts->max_cells = d.max_cells;
}

infograd_status infograd_design_problem_load(const char* path, infograd_design_problem** out)
{
    return guarded([&] {
        require_ptr(path, "path");
        require_ptr(out, "out");
        *out = new infograd_design_problem{load_design_problem(path)};
    });
}

void infograd_design_problem_free(infograd_design_problem* p)
{
    delete p;
}

infograd_status infograd_design_run(const infograd_design_problem* p,
                                    const infograd_design_options* opts,
                                    infograd_design_result** out)
{
    return guarded([&] {
        require_ptr(p, "problem");
        require_ptr(out, "out");
        *out = new infograd_design_result{design_phi(p->value, design_options_of(opts))};
    });
}

size_t infograd_design_iterations(const infograd_design_result* r)
{
    return r ? r->value.iterations.size() : 0;
}

infograd_status infograd_design_iteration_at(const infograd_design_result* r,
                                             size_t index,
                                             infograd_design_iteration* out)
{
    return guarded([&] {
        require_ptr(r, "result");
        require_ptr(out, "out");
        require(index < r->value.iterations.size(), "iteration index out of range");
        const DesignIteration& it = r->value.iterations[index];
        out->iteration = it.iteration;
        out->mi = it.mi;
        out->grad_norm = it.grad_norm;
        out->projected_grad_norm = it.projected_grad_norm;
        out->step = it.step;
        out->accepted = it.accepted ? 1 : 0;
    });
}

infograd_status infograd_design_phi(const infograd_design_result* r, infograd_matrix** out)
{
    return guarded([&] {
        require_ptr(r, "result");
        require_ptr(out, "out");
        *out = wrap(r->value.phi);
    });
}

double infograd_design_mi(const infograd_design_result* r)
{
    return r ? r->value.mi : 0.0;
}

const char* infograd_design_stop_reason(const infograd_design_result* r)
{
    return r ? r->value.stop_reason.c_str() : "";
}

void infograd_design_result_free(infograd_design_result* r)
{
    delete r;
}

infograd_status infograd_design_round(const infograd_design_problem* p,
                                      const infograd_matrix* phi,
                                      double threshold,
                                      const infograd_design_options* opts,
                                      infograd_matrix** binary,
                                      infograd_rounding_result* out)
{
    return guarded([&] {
        require_ptr(p, "problem");
        require_ptr(phi, "phi");
        require_ptr(out, "out");
        const RoundingReport rep = rounding_gap(p->value, phi->value, threshold, design_options_of(opts));
        out->relaxed_mi = rep.relaxed_mi;
        out->binary_mi = rep.binary_mi;
        out->gap = rep.gap;
        if (binary) *binary = wrap(rep.binary);
    });
}

}  // extern "C"
