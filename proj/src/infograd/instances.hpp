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

#include "infograd/channels.hpp"
#include "infograd/design.hpp"
#include "infograd/input_model.hpp"

namespace infograd::instances
{

// Scalar S1: X in {1, 3} equiprobable, phi = 1, dark 0.5.
FiniteDistribution s1_prior();
PoissonChannel s1_channel();

// Vector V1: atoms (1,0), (0,1), (1,1) with p = (0.4, 0.4, 0.2),
// phi = [[1, 0.5], [0.2, 1]], dark = (0.1, 0.1).
FiniteDistribution v1_prior();
PoissonChannel v1_channel();
// The V1 prior and phi through the unit-variance Gaussian channel.
GaussianChannel v1_gaussian_channel();

/*!
 * Document-style design problem D1: vocabulary n = 10, four topic profiles
 * (word rate 0.9 inside the topic's block, 0.05 elsewhere) with equal
 * weights, m = 3 box-constrained rows, dark 0.1, seeded uniform init.
 */
DesignProblem d1_problem();

}  // namespace infograd::instances
