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

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace infograd
{

using Vec = Eigen::VectorXd;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ErrorKind
{
    invalid_argument,  // malformed or out-of-domain input
    infeasible,        // request valid but too large to evaluate (grid caps)
    numerical,         // non-finite intermediate value
    io,
};

class Error : public std::runtime_error
{
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] void throw_invalid(const std::string& what);
[[noreturn]] void throw_infeasible(const std::string& what);
[[noreturn]] void throw_numerical(const std::string& what);

inline void require(bool condition, const std::string& what)
{
    if (!condition) throw_invalid(what);
}

bool all_finite(const Vec& v);
bool all_finite(const Mat& a);

// Central difference (f(x0+h) - f(x0-h)) / 2h.
double finite_difference_scalar(const std::function<double(double)>& f,
                                double x0,
                                double h);

// 1e-4 * max(1, |x0|)
double default_fd_step(double x0);

double mat_frobenius_distance(const Mat& a, const Mat& b);

// log(sum(exp(values))); -inf for an empty range or all -inf entries.
double log_sum_exp(std::span<const double> values);

/// Neumaier-compensated running sum.
class CompensatedSum
{
  public:
    void add(double value)
    {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value))
            comp_ += (sum_ - t) + value;
        else
            comp_ += (value - t) + sum_;
        sum_ = t;
    }

    CompensatedSum& operator+=(double value)
    {
        add(value);
        return *this;
    }

    void merge(const CompensatedSum& other)
    {
        add(other.sum_);
        add(other.comp_);
    }

    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Running mean and variance of a scalar sample.
class ScalarMoments
{
  public:
    void add(double v)
    {
        sum_ += v;
        sum_sq_ += v * v;
        ++count_;
    }

    void merge(const ScalarMoments& other)
    {
        sum_ += other.sum_;
        sum_sq_ += other.sum_sq_;
        count_ += other.count_;
    }

    std::size_t count() const { return count_; }
    double mean() const { return count_ ? sum_ / static_cast<double>(count_) : 0.0; }
    double std_error() const;

  private:
    double sum_ = 0.0;
    double sum_sq_ = 0.0;
    std::size_t count_ = 0;
};

/// Per-entry running first and second moments of a matrix-valued sample.
class MatMoments
{
  public:
    MatMoments() = default;
    MatMoments(Eigen::Index rows, Eigen::Index cols)
        : sum_(Mat::Zero(rows, cols)), sum_sq_(Mat::Zero(rows, cols))
    {
    }

    void add(const Mat& sample)
    {
        sum_ += sample;
        sum_sq_ += sample.cwiseProduct(sample);
        ++count_;
    }

    void merge(const MatMoments& other)
    {
        sum_ += other.sum_;
        sum_sq_ += other.sum_sq_;
        count_ += other.count_;
    }

    std::size_t count() const { return count_; }
    Mat mean() const;
    // Standard error of the mean, using the unbiased sample variance.
    Mat std_error() const;

  private:
    Mat sum_;
    Mat sum_sq_;
    std::size_t count_ = 0;
};

}  // namespace infograd
