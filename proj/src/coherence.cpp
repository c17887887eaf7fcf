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

#include "blockscale/coherence.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "blockscale/errors.hpp"

namespace blockscale {

int excitation_count(std::uint64_t basis_index) {
  return std::popcount(basis_index);
}

int coherence_order(std::uint64_t row, std::uint64_t col) {
  return excitation_count(col) - excitation_count(row);
}

const Matrix& CoherenceDecomposition::block(int order) const {
  auto it = blocks.find(order);
  if (it == blocks.end()) {
    std::ostringstream os;
    os << "no coherence block of order " << order << " for " << qubits << " qubits";
    throw ContractError(os.str());
  }
  return it->second;
}

CoherenceDecomposition decompose(const Matrix& m) {
  const Eigen::Index dim = m.rows();
  if (m.cols() != dim || dim < 1 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
    throw ConfigurationError("coherence decomposition needs a square power-of-two matrix");
  }
  CoherenceDecomposition dec;
  dec.dim = dim;
  dec.qubits = std::countr_zero(static_cast<std::uint64_t>(dim));
  for (int n = -dec.qubits; n <= dec.qubits; ++n) dec.blocks.emplace(n, Matrix::Zero(dim, dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      dec.blocks[coherence_order(i, j)](i, j) = m(i, j);
    }
  }
  return dec;
}

Matrix recompose(const CoherenceDecomposition& dec) {
  Matrix out = Matrix::Zero(dec.dim, dec.dim);
  for (const auto& [order, blk] : dec.blocks) {
    if (blk.rows() != dec.dim || blk.cols() != dec.dim) {
      throw ContractError("coherence block has the wrong dimension");
    }
    for (Eigen::Index i = 0; i < dec.dim; ++i) {
      for (Eigen::Index j = 0; j < dec.dim; ++j) {
        if (blk(i, j) == Complex(0.0)) continue;
        if (coherence_order(i, j) != order) {
          std::ostringstream os;
          os << "block of order " << order << " has support at (" << i << "," << j
             << ") which has order " << coherence_order(i, j);
          throw ContractError(os.str());
        }
        out(i, j) += blk(i, j);
      }
    }
  }
  return out;
}

Matrix last_population_projector(Eigen::Index dim) {
  Matrix e = Matrix::Zero(dim, dim);
  e(dim - 1, dim - 1) = 1.0;
  return e;
}

DensityMatrix apply_block_scaling(const CoherenceDecomposition& dec, double zero_scale,
                                  const std::map<int, double>& scales, const Matrix& fixed_part) {
  if (fixed_part.rows() != dec.dim || fixed_part.cols() != dec.dim) {
    throw ConfigurationError("fixed part dimension does not match decomposition");
  }
  const Matrix zero_part = dec.block(0) - fixed_part;
  if (std::abs(zero_part.trace()) > kTraceTolerance) {
    throw ContractError("zero-order block minus fixed part is not traceless");
  }
  Matrix out = fixed_part + zero_scale * zero_part;
  for (const auto& [order, blk] : dec.blocks) {
    if (order == 0) continue;
    auto it = scales.find(std::abs(order));
    if (it == scales.end()) {
      if (blk.isZero(0.0)) continue;
      std::ostringstream os;
      os << "no scale factor given for nonzero coherence order " << order;
      throw ContractError(os.str());
    }
    out += it->second * blk;
  }
  return DensityMatrix(out);
}

}  // namespace blockscale
