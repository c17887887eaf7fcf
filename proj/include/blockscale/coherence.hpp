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

#include <map>

#include "blockscale/qmat.hpp"

namespace blockscale {

/// Number of flipped spins in a computational basis state.
int excitation_count(std::uint64_t basis_index);

/// Coherence order of the matrix position (row, col): exc(col) - exc(row).
/// With this sign the upper-triangle entry |00><11| has order +2.
int coherence_order(std::uint64_t row, std::uint64_t col);

/// A square operator on q qubits split into multiple-quantum coherence
/// blocks. Block n is a full-size matrix whose support lies on the positions
/// of order n; every order in [-q, q] is present (possibly zero).
struct CoherenceDecomposition {
  Eigen::Index dim = 0;
  int qubits = 0;
  std::map<int, Matrix> blocks;

  const Matrix& block(int order) const;
};

/// Requires a power-of-two dimension (ConfigurationError otherwise).
CoherenceDecomposition decompose(const Matrix& m);
inline CoherenceDecomposition decompose(const DensityMatrix& rho) { return decompose(rho.matrix()); }

/// Exact sum of the blocks. Throws ContractError when a block has an entry
/// outside its order's support.
Matrix recompose(const CoherenceDecomposition& dec);

/// diag(0, ..., 0, 1): the population kept out of the zero-order scaling.
Matrix last_population_projector(Eigen::Index dim);

/// fixed + zero_scale*(block(0) - fixed) + sum_{n != 0} scales[|n|]*block(n).
///
/// block(0) - fixed must be traceless (ContractError otherwise) so the result
/// keeps unit trace. A nonzero block whose |order| has no entry in `scales`
/// is a ContractError.
DensityMatrix apply_block_scaling(const CoherenceDecomposition& dec, double zero_scale,
                                  const std::map<int, double>& scales, const Matrix& fixed_part);

}  // namespace blockscale
