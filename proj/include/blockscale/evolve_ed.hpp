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

#include <cstdint>
#include <vector>

#include "blockscale/family.hpp"
#include "blockscale/qmat.hpp"
#include "blockscale/transfer.hpp"

namespace blockscale {

inline constexpr int kEdSiteLimit = 12;

// XX Hamiltonian split by total excitation number. states[k] lists the basis
// indices with k flipped spins in increasing order; blocks[k] is H on them.
struct SectorHamiltonian {
  int n_sites = 0;
  double coupling = 1.0;
  std::vector<std::vector<std::uint64_t>> states;
  std::vector<RealMatrix> blocks;

  Matrix to_dense() const;
};

// Accepts n_sites >= 2; CapacityError above ed_limit.
SectorHamiltonian build_hamiltonian(const ChainSpec& spec, int ed_limit = kEdSiteLimit);

// Propagates rho_S (x) thermal background as a mixture of pure states.
DensityMatrix evolve_receiver(const DensityMatrix& rho_s, const ChainSpec& spec,
                              int ed_limit = kEdSiteLimit);

TransferSupermatrix transfer_supermatrix(const ChainSpec& spec, int ed_limit = kEdSiteLimit);

ScalingReport verify_block_scaling(const ScalableFamily& f, int ed_limit = kEdSiteLimit);

}  // namespace blockscale
