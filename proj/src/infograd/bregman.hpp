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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infograd/channels.hpp"
#include "infograd/input_model.hpp"
#include "infograd/numerics.hpp"
#include "infograd/rng.hpp"

namespace infograd
{

/// Coordinatewise domain of a generator.
enum class Domain
{
    real,
    nonnegative,
    positive,
    negative,
};

bool in_domain(Domain dom, const Vec& x);
// Uniform draw from a bounded box inside the domain.
Vec sample_domain(Domain dom, Eigen::Index dim, RngStream& rng);

/// Convex F : R^n -> R with gradient, for the classical divergence.
struct ScalarGenerator
{
    std::string name;
    Domain domain = Domain::real;
    // F(x) = sum_i f(x_i); enables the numerical 1-D conjugate.
    bool separable = false;
    std::function<double(const Vec&)> eval;
    std::function<Vec(const Vec&)> grad;
    // Closed-form Legendre conjugate when known.
    std::shared_ptr<const ScalarGenerator> conjugate;
};

// F(x) - F(y) - <grad F(y), x - y>
double bregman_scalar(const ScalarGenerator& g, const Vec& x, const Vec& y);

namespace generators
{
ScalarGenerator squared_norm();          // ||x||^2
ScalarGenerator half_squared_norm();     // ||x||^2 / 2, self-conjugate
ScalarGenerator negative_entropy();      // sum x log x
ScalarGenerator unnormalized_entropy();  // sum x log x - x, conjugate sum exp(s)
ScalarGenerator exponential();           // sum exp(x), conjugate sum s log s - s
ScalarGenerator burg_entropy();          // -sum log x (Itakura-Saito), conjugate sum -1 - log(-s)

std::vector<ScalarGenerator> closed_form_catalog();
ScalarGenerator by_name(std::string_view name);
}  // namespace generators

/*!
 * Legendre conjugate F* with grad F* = (grad F)^-1. Uses the closed form
 * when the generator carries one, else inverts the gradient of a separable
 * generator coordinate by coordinate.
 */
ScalarGenerator legendre_dual(const ScalarGenerator& g);

// |D_F(x, y) - D_F*(grad F(y), grad F(x))|
double duality_gap(const ScalarGenerator& g, const ScalarGenerator& dual, const Vec& x, const Vec& y);

enum class ConeKind
{
    entrywise_nonneg,
    psd_square,
};

std::string_view to_string(ConeKind c);

/// Partial order a <=_K b  <=>  b - a in K.
class ConeOrder
{
  public:
    explicit ConeOrder(ConeKind kind) : kind_(kind) {}

    ConeKind kind() const { return kind_; }
    // Smallest entry, or smallest eigenvalue of the symmetric part.
    double margin(const Mat& a) const;
    bool contains(const Mat& a, double tol) const;
    bool precedes(const Mat& a, const Mat& b, double tol) const { return contains(b - a, tol); }

  private:
    ConeKind kind_;
};

enum class Orientation
{
    input_by_output,  // n x m, as produced by the Poisson generator
    output_by_input,  // m x n, the gradient's indexing
};

/// Matrix-valued F with its Frechet derivative DF(y)(h).
struct MatrixGenerator
{
    std::string name;
    Eigen::Index input_dim = 0;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    Domain domain = Domain::real;
    ConeKind cone = ConeKind::entrywise_nonneg;
    // K-convexity established for this generator; property violations are
    // asserted only when set.
    bool convex_in_cone = false;
    Orientation orientation = Orientation::output_by_input;
    std::function<Mat(const Vec&)> eval;
    std::function<Mat(const Vec&, const Vec&)> frechet;
};

// F(x) - F(y) - DF(y)(x - y)
Mat bregman_generalized(const MatrixGenerator& g, const Vec& x, const Vec& y);

/*!
 * F(x) = x log(phi x + dark)^T - [x, ..., x] + 1 (n x m), i.e. entry (j, i)
 * is x_j log((phi x)_i + dark_i) - x_j + 1. Requires dark > 0.
 */
MatrixGenerator poisson_generator(const Mat& phi, const Vec& dark);
// F(x) = phi x x^T (m x n)
MatrixGenerator gaussian_generator(const Mat& phi);
// Entry (r, c) is entries[r * cols + c] evaluated on the whole input.
MatrixGenerator stacked_generator(std::vector<ScalarGenerator> entries,
                                  Eigen::Index rows,
                                  Eigen::Index cols,
                                  Eigen::Index input_dim);
// c1 F + c2 G
MatrixGenerator combine(double c1, const MatrixGenerator& f, double c2, const MatrixGenerator& g);

// Transpose to the m x n gradient indexing if needed.
Mat to_gradient_orientation(const MatrixGenerator& g, const Mat& value);

struct PropertyWitness
{
    std::string property;
    Vec x;
    Vec x2;
    Vec y;
    double theta = 0.0;
    double value = 0.0;  // cone margin or residual
};

struct PropertyReport
{
    std::string generator;
    ConeKind cone = ConeKind::entrywise_nonneg;
    bool asserted = false;  // generator declared K-convex
    std::size_t trials = 0;
    std::size_t nonneg_violations = 0;
    std::size_t linearity_violations = 0;
    std::size_t convexity_violations = 0;
    double min_nonneg_margin = 0.0;
    double min_convexity_margin = 0.0;
    double max_linearity_residual = 0.0;
    std::vector<PropertyWitness> witnesses;  // at most a few per property

    std::size_t violations() const
    {
        return nonneg_violations + linearity_violations + convexity_violations;
    }
};

/*!
 * Random sweep over (x, y, theta) checking D_F >=_K 0, positive linearity
 * against `companion`, and K-convexity of D_F(., y). Violations are data.
 */
PropertyReport check_properties(const MatrixGenerator& g,
                                const ConeOrder& cone,
                                std::size_t trials,
                                const RngStream& rng,
                                const MatrixGenerator* companion = nullptr);

/// Max relative error of DF(y)(h) against a central difference of F.
struct FrechetCheck
{
    double max_relative_error = 0.0;
    double max_linearity_residual = 0.0;
};
FrechetCheck check_frechet(const MatrixGenerator& g, std::size_t trials, const RngStream& rng);

/// Sub-sigma-algebra of a finite sample space given as joint masses
/// cell_mass[c][k] = P(cell c, X = atom k).
struct Partition
{
    std::string name;
    std::vector<std::vector<double>> cell_mass;
};

Partition trivial_partition(const FiniteDistribution& d);
Partition finest_partition(const FiniteDistribution& d);
// Cells {Y_coordinate even}, {Y_coordinate odd} for the Poisson channel.
Partition poisson_parity_partition(const PoissonChannel& ch, const FiniteDistribution& d, Eigen::Index coordinate);

std::vector<Vec> cell_means(const FiniteDistribution& d, const Partition& p);
Mat expected_divergence(const MatrixGenerator& g,
                        const FiniteDistribution& d,
                        const Partition& p,
                        const std::vector<Vec>& estimate);

struct MinimizerReport
{
    std::string partition;
    std::vector<Vec> conditional_means;
    Mat expected_at_mean;
    std::size_t trials = 0;
    std::size_t dominating = 0;
    // Smallest cone margin of E[D(X, y')] - E[D(X, E[X|s1])] over candidates.
    double min_margin = 0.0;
    Mat worst_margin_matrix;
    std::vector<Vec> worst_candidate;
    // Candidates whose expected divergence equals the conditional mean's to
    // rounding; these neither dominate nor are dominated.
    std::size_t ties = 0;
    // First dominating candidate and its margin matrix, when one exists.
    std::vector<Vec> dominating_candidate;
    Mat dominating_margin_matrix;
};

MinimizerReport minimizer_check(const MatrixGenerator& g,
                                const FiniteDistribution& d,
                                const Partition& p,
                                std::size_t trials,
                                const RngStream& rng);

/*!
 * Numerically minimize a 1x1 expected divergence sum_k w_k D(x_k, y) by
 * gradient descent on y, using a central-difference Hessian-vector product
 * for the gradient and backtracking on its norm.
 */
Vec minimize_expected_divergence(const MatrixGenerator& g,
                                 const std::vector<Vec>& atoms,
                                 const std::vector<double>& weights,
                                 Vec start);

}  // namespace infograd
