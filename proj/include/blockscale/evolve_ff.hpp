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

#include "blockscale/qmat.hpp"
#include "blockscale/transfer.hpp"

namespace blockscale {

// Single-particle picture of the XX chain: h is tridiagonal with D/2 on the
// off-diagonals and u = exp(-i h t).
struct FermionHopping {
  int n_sites = 0;
  RealMatrix h;
  Matrix u;
};

FermionHopping single_particle_propagator(const ChainSpec& spec);

// Exact supermatrix from Gaussian expectation values. Requires b > 0: at
// b = 0 the string-dressed background has zero norm and the determinant
// formulation breaks down.
TransferSupermatrix transfer_supermatrix_ff(const ChainSpec& spec);

}  // namespace blockscale
