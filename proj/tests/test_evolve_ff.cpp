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

#include <bit>
#include <cmath>
#include <random>

#include "doctest.h"

#include "blockscale/errors.hpp"
#include "blockscale/evolve_ed.hpp"
#include "blockscale/evolve_ff.hpp"
#include "blockscale/family.hpp"
#include "blockscale/transfer.hpp"
#include "oracles.hpp"

using namespace blockscale;

namespace {

ChainSpec chain(int n, double t, double b) {
  ChainSpec s;
  s.n_sites = n;
  s.transfer_time = t;
  s.b_field = b;
  return s;
}

}  // namespace

TEST_SUITE("evolve_ff") {

TEST_CASE("single-particle propagator") {
  const FermionHopping fh = single_particle_propagator(chain(9, 3.7, 1.0));
  CHECK(fh.h.rows() == 9);
  CHECK(fh.h(0, 1) == 0.5);
  CHECK(fh.h(0, 2) == 0.0);
  CHECK(max_abs(fh.u * fh.u.adjoint() - Matrix::Identity(9, 9)) < 1e-13);
  CHECK(max_abs(fh.u - fh.u.transpose()) < 1e-13);
  const Matrix direct = (Complex(0, -3.7) * fh.h.cast<Complex>()).exp();
  CHECK(max_abs(fh.u - direct) < 1e-12);
}

TEST_CASE("one-excitation sector equals the hopping matrix") {
  for (int n : {5, 8}) {
    const SectorHamiltonian h = build_hamiltonian(chain(n, 0, 0));
    const FermionHopping fh = single_particle_propagator(chain(n, 0, 0));
    // Sector states ascend by index; site k (0 = first) is bit n-1-k.
    const auto& st = h.states[1];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const int sa = n - 1 - std::countr_zero(st[a]);
        const int sb = n - 1 - std::countr_zero(st[b]);
        CHECK(h.blocks[1](a, b) == fh.h(sa, sb));
      }
  }
}

TEST_CASE("free-fermion transfer agrees with exact diagonalization") {
  const double params[][2] = {{8.51533, 10.0}, {5.6651, 2.3462}, {1.3, 0.4}, {12.0, INFINITY}};
  for (int n : {4, 5, 6, 8}) {
    for (const auto& tb : params) {
      CAPTURE(n);
      CAPTURE(tb[0]);
      const ChainSpec s = chain(n, tb[0], tb[1]);
      const TransferSupermatrix ff = transfer_supermatrix_ff(s);
      CHECK(ff.backend == "ff");
      CHECK(max_abs(ff.entries - transfer_supermatrix(s).entries) < 1e-8);
    }
  }
}

TEST_CASE("free-fermion transfer matches the brute-force oracle") {
  const ChainSpec s = chain(5, 2.2, 0.9);
  CHECK(max_abs(transfer_supermatrix_ff(s).entries - oracle::transfer(5, 2.2, 0.9)) < 1e-12);
}

TEST_CASE("large b approaches the polarized background") {
  const TransferSupermatrix ff = transfer_supermatrix_ff(chain(8, 6.0, 50.0));
  const TransferSupermatrix ed = transfer_supermatrix(chain(8, 6.0, INFINITY));
  CHECK(max_abs(ff.entries - ed.entries) < 1e-12);
}

TEST_CASE("infinite temperature is refused") {
  CHECK_THROWS_AS(transfer_supermatrix_ff(chain(6, 1.0, 0.0)), ConfigurationError);
  CHECK_THROWS_AS(compute_transfer(chain(6, 1.0, 0.0), Backend::ff), ConfigurationError);
  CHECK_THROWS_AS(transfer_supermatrix_ff(chain(3, 1.0, 1.0)), ConfigurationError);
}

TEST_CASE("long chains keep the structural invariants") {
  const ScalableFamily f = load_family(CaseId::III, 42);
  const TransferSupermatrix t = transfer_supermatrix_ff(f.chain());
  const InvariantReport rep = check_invariants(t);
  CHECK(rep.ok());
  CHECK(rep.order_leakage < 1e-12);
  const ScalingReport fit = fit_block_scaling(f, t);
  CHECK(fit.blocks.size() == 3);
  for (const BlockFit& b : fit.blocks) {
    CAPTURE(b.order);
    CHECK(std::abs(b.lambda_hat - b.expected) < 1e-3);
  }
}

TEST_CASE("long-chain scale factors for every case") {
  for (CaseId c : {CaseId::I, CaseId::II, CaseId::IV}) {
    const ScalableFamily f = load_family(c, 42);
    const ScalingReport fit = fit_block_scaling(f, compute_transfer(f.chain(), Backend::automatic));
    CAPTURE(to_string(c));
    CHECK(fit.backend == "ff");
    for (const BlockFit& b : fit.blocks) CHECK(std::abs(b.lambda_hat - b.expected) < 1e-3);
  }
}

}  // TEST_SUITE
