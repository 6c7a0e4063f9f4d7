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

#include "infograd/numerics.hpp"

#include <algorithm>
#include <sstream>

namespace infograd
{

void throw_invalid(const std::string& what)
{
    throw Error(ErrorKind::invalid_argument, what);
}

void throw_infeasible(const std::string& what)
{
    throw Error(ErrorKind::infeasible, what);
}

void throw_numerical(const std::string& what)
{
    throw Error(ErrorKind::numerical, what);
}

bool all_finite(const Vec& v)
{
    return v.allFinite();
}

bool all_finite(const Mat& a)
{
    return a.allFinite();
}

double finite_difference_scalar(const std::function<double(double)>& f,
                                double x0,
                                double h)
{
    require(h > 0.0 && std::isfinite(h), "finite difference step must be positive");
    const double xp = x0 + h;
    const double xm = x0 - h;
    const double fp = f(xp);
    if (!std::isfinite(fp))
    {
        std::ostringstream os;
        os << "non-finite function value at x = " << xp;
        throw_numerical(os.str());
    }
    const double fm = f(xm);
    if (!std::isfinite(fm))
    {
        std::ostringstream os;
        os << "non-finite function value at x = " << xm;
        throw_numerical(os.str());
    }
    return (fp - fm) / (2.0 * h);
}

double default_fd_step(double x0)
{
    return 1e-4 * std::max(1.0, std::abs(x0));
}

double mat_frobenius_distance(const Mat& a, const Mat& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
    {
        std::ostringstream os;
        os << "shape mismatch: " << a.rows() << "x" << a.cols() << " vs "
           << b.rows() << "x" << b.cols();
        throw_invalid(os.str());
    }
    return (a - b).norm();
}

double log_sum_exp(std::span<const double> values)
{
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : values)
        peak = std::max(peak, v);
    if (!std::isfinite(peak)) return peak;
    double total = 0.0;
    for (double v : values)
        total += std::exp(v - peak);
    return peak + std::log(total);
}

double ScalarMoments::std_error() const
{
    if (count_ < 2) return 0.0;
    const double n = static_cast<double>(count_);
    const double m = sum_ / n;
    const double var = (sum_sq_ / n - m * m) * (n / (n - 1.0));
    return std::sqrt(std::max(var, 0.0) / n);
}

Mat MatMoments::mean() const
{
    if (count_ == 0) return sum_;
    return sum_ / static_cast<double>(count_);
}

Mat MatMoments::std_error() const
{
    if (count_ < 2) return Mat::Zero(sum_.rows(), sum_.cols());
    const double n = static_cast<double>(count_);
    Mat m = sum_ / n;
    Mat var = (sum_sq_ / n - m.cwiseProduct(m)) * (n / (n - 1.0));
    return (var.cwiseMax(0.0) / n).cwiseSqrt();
}

}  // namespace infograd
