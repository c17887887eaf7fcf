// Copyright 2026 The blockscale Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>

#include "blockscale/family.hpp"
#include "blockscale/qmat.hpp"

namespace blockscale {

/// Wootters concurrence of a two-qubit state.
double wootters_concurrence(const DensityMatrix& rho);

/// The four lambda_i (descending) entering the concurrence: square roots of
/// the eigenvalues of rho (sy x sy) rho* (sy x sy).
std::array<double, 4> wootters_lambdas(const DensityMatrix& rho);

/// X-shaped two-qubit state
///   [ a11   0        0       s  ]
///   [ 0     a22      i a23   0  ]
///   [ 0    -i a23    a33     0  ]
///   [ s     0        0       a44]
struct XStateParams {
  double a11 = 0.25, a22 = 0.25, a33 = 0.25, a44 = 0.25;
  double a23 = 0.0;
  double s = 0.0;

  void validate() const;  // ContractError unless populations are >= 0 and sum to 1
  Matrix to_matrix() const;
};

enum class Side { sender, receiver };

/// X-state parameters of a Case I family at c2 on the given side.
XStateParams case1_params(const ScalableFamily& f, Side side, double c2);

/// (|a23 + g|, |a23 - g|, |s + r|, |s - r|) with g = sqrt(a22 a33), r = sqrt(a11 a44).
std::array<double, 4> case1_eigenvalues(const XStateParams& p);

/// sqrt(a11 a44) > a23 + sqrt(a22 a33), the condition under which the
/// concurrence is max(0, 2|s| - lambda1 - lambda2).
bool case1_condition_holds(const XStateParams& p);

struct Case1Concurrence {
  double value = 0.0;
  bool fallback_taken = false;  // condition failed; value came from wootters_concurrence
};

Case1Concurrence case1_concurrence(const XStateParams& p);

/// c2 below which the concurrence of a Case I family vanishes. Throws
/// UnsupportedCaseError for the other cases.
double critical_value(const ScalableFamily& f, Side side);

}  // namespace blockscale
