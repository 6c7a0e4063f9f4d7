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

#include "infograd/instances.hpp"

namespace infograd::instances
{

FiniteDistribution s1_prior()
{
    return FiniteDistribution({Vec::Constant(1, 1.0), Vec::Constant(1, 3.0)}, {0.5, 0.5});
}

PoissonChannel s1_channel()
{
    return PoissonChannel(Mat::Constant(1, 1, 1.0), Vec::Constant(1, 0.5));
}

FiniteDistribution v1_prior()
{
    return FiniteDistribution({Vec::Unit(2, 0), Vec::Unit(2, 1), Vec::Ones(2)}, {0.4, 0.4, 0.2});
}

namespace
{
Mat v1_phi()
{
    Mat phi(2, 2);
    phi << 1.0, 0.5, 0.2, 1.0;
    return phi;
}
}  // namespace

PoissonChannel v1_channel()
{
    return PoissonChannel(v1_phi(), Vec::Constant(2, 0.1));
}

GaussianChannel v1_gaussian_channel()
{
    return GaussianChannel(v1_phi());
}

DesignProblem d1_problem()
{
    constexpr Eigen::Index vocabulary = 10;
    // Word blocks {0,1,2}, {3,4}, {5,6,7}, {8,9}.
    const Eigen::Index block_start[] = {0, 3, 5, 8, vocabulary};
    std::vector<Vec> topics;
    for (int t = 0; t < 4; ++t)
    {
        Vec profile = Vec::Constant(vocabulary, 0.05);
        for (Eigen::Index j = block_start[t]; j < block_start[t + 1]; ++j)
            profile[j] = 0.9;
        topics.push_back(profile);
    }
    return DesignProblem{FiniteDistribution(std::move(topics), {0.25, 0.25, 0.25, 0.25}),
                         3,
                         Vec::Constant(3, 0.1),
                         Constraint{ConstraintKind::box01, 1.0},
                         std::nullopt,
                         20261014};
}

}  // namespace infograd::instances
