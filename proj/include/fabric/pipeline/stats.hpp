/*
 * include/fabric/pipeline/stats.hpp
 *
 * Copyright 2026 The Fabric Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <span>
#include <string>

namespace fabric::pipeline {

struct StatTestResult {
  std::string test_name;
  double statistic = 0;
  double p_value = 1;
  bool reject = false;  // p_value < alpha
};

/// Welch's two-sample t test, two-sided, p from the t law with
/// Welch-Satterthwaite degrees of freedom.
StatTestResult welch_t_test(std::span<const double> a, std::span<const double> b, double alpha);

/// Mann-Whitney U, two-sided. Exact permutation law over the midranks
/// (ties included) for samples up to 100 values in total, normal
/// approximation with tie correction beyond that. Statistic is U of `a`.
StatTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, double alpha);

/// Two-sample Kolmogorov-Smirnov, two-sided. Exact permutation law by
/// lattice-path counting when n*m <= 1e6, asymptotic Kolmogorov law beyond.
StatTestResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha);

/// Majority of three reject flags.
bool vote(bool r1, bool r2, bool r3);

}  // namespace fabric::pipeline
