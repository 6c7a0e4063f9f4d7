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

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "infograd/infograd.h"

namespace
{

using nlohmann::json;

// Exit codes: 0 success, 1 failed self-test or internal error, 2 invalid
// input or usage, 3 infeasible or numerical failure.
constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_invalid = 2;
constexpr int exit_numerical = 3;

class CliError : public std::runtime_error
{
  public:
    CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const { return code_; }

  private:
    int code_;
};

void check(infograd_status status)
{
    if (status == INFOGRAD_OK) return;
    int code = exit_failed;
    switch (status)
    {
        case INFOGRAD_ERR_INVALID:
        case INFOGRAD_ERR_IO: code = exit_invalid; break;
        case INFOGRAD_ERR_INFEASIBLE:
        case INFOGRAD_ERR_NUMERICAL: code = exit_numerical; break;
        default: break;
    }
    throw CliError(code, std::string(infograd_status_name(status)) + ": " + infograd_last_error());
}

// Owning wrappers for the C handles.
template <class T, void (*Free)(T*)>
struct Releaser
{
    void operator()(T* p) const { Free(p); }
};
using MatrixPtr = std::unique_ptr<infograd_matrix, Releaser<infograd_matrix, infograd_matrix_free>>;
using PriorPtr = std::unique_ptr<infograd_prior, Releaser<infograd_prior, infograd_prior_free>>;
using ChannelPtr = std::unique_ptr<infograd_channel, Releaser<infograd_channel, infograd_channel_free>>;
using GradientPtr = std::unique_ptr<infograd_gradient, Releaser<infograd_gradient, infograd_gradient_free>>;
using ProblemPtr =
    std::unique_ptr<infograd_design_problem, Releaser<infograd_design_problem, infograd_design_problem_free>>;
using DesignPtr =
    std::unique_ptr<infograd_design_result, Releaser<infograd_design_result, infograd_design_result_free>>;

std::string take_string(char* s)
{
    std::string out(s);
    infograd_string_free(s);
    return out;
}

std::string to_csv(const infograd_matrix* m)
{
    char* text = nullptr;
    check(infograd_matrix_to_csv(m, &text));
    return take_string(text);
}

std::string read_bytes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError(exit_invalid, "io: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw CliError(exit_failed, "sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i)
    {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw CliError(exit_invalid, "io: cannot write '" + path + "'");
}

// Write a matrix as CSV and confirm it parses back to identical values.
void save_matrix_checked(const infograd_matrix* m, const std::string& path)
{
    check(infograd_matrix_save_csv(m, path.c_str()));
    infograd_matrix* raw = nullptr;
    check(infograd_matrix_load_csv(path.c_str(), &raw));
    MatrixPtr back(raw);
    const size_t rows = infograd_matrix_rows(m), cols = infograd_matrix_cols(m);
    bool same = infograd_matrix_rows(back.get()) == rows && infograd_matrix_cols(back.get()) == cols;
    for (size_t i = 0; same && i < rows * cols; ++i)
        same = infograd_matrix_data(back.get())[i] == infograd_matrix_data(m)[i];
    if (!same) throw CliError(exit_failed, "CSV round trip changed '" + path + "'");
}

/// Shared flags and the report envelope.
struct Session
{
    std::vector<std::string> argv;
    json inputs = json::array();
    std::optional<std::size_t> threads;
    std::string report_path;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void add_input(const std::string& role, const std::string& path)
    {
        inputs.push_back({{"role", role}, {"path", path}, {"sha256", sha256_hex(read_bytes(path))}});
    }

    void apply_threads() const
    {
        if (threads) infograd_set_threads(*threads);
    }

    void emit(const std::string& command, std::optional<std::uint64_t> seed, json result) const
    {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json report = {{"command", command},
                       {"argv", argv},
                       {"inputs", inputs},
                       {"seed", seed ? json(*seed) : json(nullptr)},
                       {"result", std::move(result)},
                       {"timing", {{"wall_seconds", wall}, {"threads", infograd_get_threads()}}}};
        const std::string text = report.dump(2) + "\n";
        if (report_path.empty())
            std::cout << text;
        else
            write_file(report_path, text);
    }
};

void add_common(CLI::App* sub, Session& s)
{
    sub->add_option("--threads", s.threads, "Worker cap (default: INFOGRAD_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--report", s.report_path, "Write the JSON report here instead of stdout");
}

infograd_mi_method parse_mi(const std::string& name)
{
    if (name == "enum" || name == "enumeration") return INFOGRAD_MI_ENUMERATION;
    if (name == "quad" || name == "quadrature") return INFOGRAD_MI_QUADRATURE;
    return INFOGRAD_MI_MONTE_CARLO;
}

const char* mi_name(infograd_mi_method m)
{
    switch (m)
    {
        case INFOGRAD_MI_ENUMERATION: return "enumeration";
        case INFOGRAD_MI_QUADRATURE: return "quadrature";
        case INFOGRAD_MI_MONTE_CARLO: return "monte_carlo";
    }
    return "unknown";
}

const auto mi_methods = {"enum", "enumeration", "quad", "quadrature", "mc", "monte_carlo"};

struct Loaded
{
    ChannelPtr channel;
    PriorPtr prior;
};

Loaded load_inputs(Session& s, const std::string& channel, const std::string& input)
{
    s.add_input("channel", channel);
    s.add_input("input", input);
    infograd_channel* ch = nullptr;
    check(infograd_channel_load(channel.c_str(), &ch));
    Loaded out{ChannelPtr(ch), nullptr};
    infograd_prior* p = nullptr;
    check(infograd_prior_load(input.c_str(), &p));
    out.prior.reset(p);
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    Session session;
    for (int i = 0; i < argc; ++i)
        session.argv.emplace_back(argv[i]);

    CLI::App app{"Mutual information, its gradients and generalized Bregman divergences for Poisson and "
                 "Gaussian channels"};
    app.require_subcommand(1);
    // Parse errors print the message followed by the usage text.
    app.failure_message(CLI::FailureMessage::help);
    app.set_version_flag("--version", std::string(infograd_version()));

    // mi
    std::string channel_path, input_path, method = "enum", out_path;
    double epsilon = 1e-12, max_cells = 1e8;
    std::uint64_t budget = 100000, seed = 0;
    auto* mi = app.add_subcommand("mi", "Mutual information I(X;Y) in nats");
    mi->add_option("--channel", channel_path, "Channel JSON")->required()->check(CLI::ExistingFile);
    mi->add_option("--input", input_path, "Prior JSON")->required()->check(CLI::ExistingFile);
    mi->add_option("--method", method, "enum | quad | mc")->check(CLI::IsMember(mi_methods));
    mi->add_option("--epsilon", epsilon, "Enumeration truncation mass");
    mi->add_option("--budget", budget, "Monte Carlo samples or quadrature nodes per axis");
    mi->add_option("--seed", seed, "Monte Carlo seed");
    mi->add_option("--max-cells", max_cells, "Enumeration grid cap");
    mi->add_option("--out", session.report_path, "Alias for --report");
    add_common(mi, session);

    // grad
    std::string wrt = "phi", grad_method = "theorem", fd_scheme = "auto";
    double h = 0.0;
    std::uint64_t nodes = 64;
    auto* grad = app.add_subcommand("grad", "Gradient of I(X;Y) with respect to phi or the dark current");
    grad->add_option("--channel", channel_path, "Channel JSON")->required()->check(CLI::ExistingFile);
    grad->add_option("--input", input_path, "Prior JSON")->required()->check(CLI::ExistingFile);
    grad->add_option("--wrt", wrt, "phi | dark")->check(CLI::IsMember({"phi", "dark"}));
    grad->add_option("--method", grad_method, "theorem | fd | mc")->check(CLI::IsMember({"theorem", "fd", "mc"}));
    grad->add_option("--epsilon", epsilon, "Enumeration truncation mass");
    grad->add_option("--budget", budget, "Monte Carlo samples");
    grad->add_option("--seed", seed, "Monte Carlo seed");
    grad->add_option("--fd-step", h, "Finite-difference step (default 1e-4 * max(1, |v|))");
    grad->add_option("--fd-scheme", fd_scheme, "auto | central")->check(CLI::IsMember({"auto", "central"}));
    grad->add_option("--nodes", nodes, "Quadrature nodes per axis for Gaussian finite differences");
    grad->add_option("--max-cells", max_cells, "Enumeration grid cap");
    grad->add_option("--out", session.report_path, "Alias for --report");
    add_common(grad, session);

    // bregman
    std::string generator, x_path, y_path;
    auto* breg = app.add_subcommand("bregman", "Bregman divergence D_F(x, y)");
    breg->add_option("--generator", generator, "Catalog name, poisson or gaussian")->required();
    breg->add_option("--x", x_path, "CSV vector x")->required()->check(CLI::ExistingFile);
    breg->add_option("--y", y_path, "CSV vector y")->required()->check(CLI::ExistingFile);
    breg->add_option("--channel", channel_path, "Channel JSON supplying phi (and dark)")->check(CLI::ExistingFile);
    breg->add_option("--out", out_path, "Also write the divergence as CSV");
    add_common(breg, session);

    // verify
    std::string suite = "all";
    auto* verify = app.add_subcommand("verify", "Run the built-in self-test suites");
    verify->add_option("--suite", suite, "bregman | gradients | all")
        ->check(CLI::IsMember({"bregman", "gradients", "all"}));
    verify->add_option("--seed", seed, "Seed for randomized checks");
    verify->add_option("--out", session.report_path, "Alias for --report");
    add_common(verify, session);

    // design
    std::string problem_path, trace_path, design_mi = "enum";
    std::uint64_t max_iters = 100;
    double tol = 1e-6, threshold = 0.5;
    auto* design = app.add_subcommand("design", "Projected gradient ascent on I(X;Y) over phi");
    design->add_option("--problem", problem_path, "Design problem JSON")->required()->check(CLI::ExistingFile);
    design->add_option("--max-iters", max_iters, "Iteration cap");
    design->add_option("--tol", tol, "Relative MI gain stopping tolerance");
    design->add_option("--mi", design_mi, "enum | mc")->check(CLI::IsMember({"enum", "enumeration", "mc", "monte_carlo"}));
    design->add_option("--budget", budget, "Monte Carlo samples per evaluation");
    design->add_option("--seed", seed, "Common-random-numbers seed for Monte Carlo");
    design->add_option("--epsilon", epsilon, "Enumeration truncation mass");
    design->add_option("--round", threshold, "Binary rounding threshold in (0, 1)");
    design->add_option("--out", out_path, "Write the final phi as CSV");
    design->add_option("--trace", trace_path, "Write the iteration trace as JSON");
    add_common(design, session);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return exit_invalid;
    }

    try
    {
        session.apply_threads();
        if (mi->parsed())
        {
            Loaded in = load_inputs(session, channel_path, input_path);
            infograd_mi_options opts;
            infograd_mi_options_default(&opts);
            opts.method = parse_mi(method);
            opts.epsilon = epsilon;
            opts.max_cells = max_cells;
            opts.budget = budget;
            if (opts.method == INFOGRAD_MI_QUADRATURE && mi->count("--budget") == 0) opts.budget = 64;
            opts.seed = seed;
            infograd_mi_result r;
            check(infograd_mi(in.channel.get(), in.prior.get(), &opts, &r));
            session.emit("mi", seed,
                         {{"value", r.value},
                          {"method", mi_name(r.method)},
                          {"error_bound", r.error_bound},
                          {"deficit", r.truncation_mass_deficit},
                          {"budget", r.budget}});
        }
        else if (grad->parsed())
        {
            Loaded in = load_inputs(session, channel_path, input_path);
            infograd_grad_options opts;
            infograd_grad_options_default(&opts);
            opts.method = grad_method == "theorem" ? INFOGRAD_GRAD_THEOREM
                          : grad_method == "fd"    ? INFOGRAD_GRAD_FINITE_DIFF
                                                   : INFOGRAD_GRAD_MONTE_CARLO;
            opts.wrt = wrt == "dark" ? INFOGRAD_WRT_DARK : INFOGRAD_WRT_PHI;
            opts.epsilon = epsilon;
            opts.max_cells = max_cells;
            opts.budget = budget;
            opts.seed = seed;
            opts.fd_step = h;
            opts.fd_central_only = fd_scheme == "central";
            opts.quadrature_nodes = nodes;
            infograd_gradient* raw = nullptr;
            check(infograd_grad(in.channel.get(), in.prior.get(), &opts, &raw));
            GradientPtr g(raw);
            json result = {{"wrt", wrt},
                           {"method", infograd_gradient_method_name(g.get())},
                           {"deficit", infograd_gradient_deficit(g.get())},
                           {"budget", infograd_gradient_budget(g.get())}};
            infograd_matrix *value = nullptr, *error = nullptr;
            if (opts.wrt == INFOGRAD_WRT_DARK)
                check(infograd_gradient_dark(g.get(), &value, &error));
            else
                check(infograd_gradient_phi(g.get(), &value, &error));
            MatrixPtr v(value), e(error);
            result["gradient"] = to_csv(v.get());
            result["error"] = to_csv(e.get());
            session.emit("grad", seed, std::move(result));
        }
        else if (breg->parsed())
        {
            session.add_input("x", x_path);
            session.add_input("y", y_path);
            ChannelPtr ch;
            if (!channel_path.empty())
            {
                session.add_input("channel", channel_path);
                infograd_channel* raw = nullptr;
                check(infograd_channel_load(channel_path.c_str(), &raw));
                ch.reset(raw);
            }
            infograd_matrix *xr = nullptr, *yr = nullptr, *dr = nullptr;
            check(infograd_matrix_load_csv(x_path.c_str(), &xr));
            MatrixPtr x(xr);
            check(infograd_matrix_load_csv(y_path.c_str(), &yr));
            MatrixPtr y(yr);
            check(infograd_bregman(generator.c_str(), x.get(), y.get(), ch.get(), &dr));
            MatrixPtr d(dr);
            if (!out_path.empty()) save_matrix_checked(d.get(), out_path);
            session.emit("bregman", std::nullopt, {{"generator", generator}, {"divergence", to_csv(d.get())}});
        }
        else if (verify->parsed())
        {
            char* text = nullptr;
            int passed = 0;
            check(infograd_verify(suite.c_str(), seed, &text, &passed));
            session.emit("verify", seed, json::parse(take_string(text)));
            if (!passed)
            {
                std::cerr << "infograd: verify: at least one assertion failed\n";
                return exit_failed;
            }
        }
        else if (design->parsed())
        {
            session.add_input("problem", problem_path);
            infograd_design_problem* raw = nullptr;
            check(infograd_design_problem_load(problem_path.c_str(), &raw));
            ProblemPtr problem(raw);
            infograd_design_options opts;
            infograd_design_options_default(&opts);
            opts.max_iters = max_iters;
            opts.tol = tol;
            opts.mi_method = parse_mi(design_mi);
            opts.budget = budget;
            opts.seed = seed;
            opts.epsilon = design->count("--epsilon") ? epsilon : opts.epsilon;
            infograd_design_result* rr = nullptr;
            check(infograd_design_run(problem.get(), &opts, &rr));
            DesignPtr result(rr);

            json iterations = json::array();
            for (size_t i = 0; i < infograd_design_iterations(result.get()); ++i)
            {
                infograd_design_iteration it;
                check(infograd_design_iteration_at(result.get(), i, &it));
                iterations.push_back({{"iteration", it.iteration},
                                      {"mi", it.mi},
                                      {"grad_norm", it.grad_norm},
                                      {"projected_grad_norm", it.projected_grad_norm},
                                      {"step", it.step},
                                      {"accepted", it.accepted != 0}});
            }
            infograd_matrix* pr = nullptr;
            check(infograd_design_phi(result.get(), &pr));
            MatrixPtr phi(pr);
            if (!out_path.empty()) save_matrix_checked(phi.get(), out_path);
            if (!trace_path.empty()) write_file(trace_path, json{{"iterations", iterations}}.dump(2) + "\n");

            json res = {{"initial_mi", iterations.front()["mi"]},
                        {"final_mi", infograd_design_mi(result.get())},
                        {"iterations", iterations.size()},
                        {"stop_reason", infograd_design_stop_reason(result.get())},
                        {"mi_method", mi_name(opts.mi_method)},
                        {"phi", to_csv(phi.get())}};
            infograd_matrix* br = nullptr;
            infograd_rounding_result rounding;
            const infograd_status st =
                infograd_design_round(problem.get(), phi.get(), threshold, &opts, &br, &rounding);
            if (st == INFOGRAD_OK)
            {
                MatrixPtr binary(br);
                res["rounding"] = {{"threshold", threshold},
                                   {"binary_phi", to_csv(binary.get())},
                                   {"relaxed_mi", rounding.relaxed_mi},
                                   {"binary_mi", rounding.binary_mi},
                                   {"gap", rounding.gap}};
            }
            else if (st == INFOGRAD_ERR_INVALID)
            {
                // Rounding applies to [0, 1] designs only; report why not.
                res["rounding"] = {{"threshold", threshold}, {"skipped", infograd_last_error()}};
            }
            else
            {
                check(st);
            }
            session.emit("design", seed, std::move(res));
        }
    }
    catch (const CliError& e)
    {
        std::cerr << "infograd: error: " << e.what() << "\n";
        return e.code();
    }
    catch (const std::exception& e)
    {
        std::cerr << "infograd: error: " << e.what() << "\n";
        return exit_failed;
    }
    return exit_ok;
}
