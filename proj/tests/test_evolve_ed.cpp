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

#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"

#include "blockscale/errors.hpp"
#include "blockscale/evolve_ed.hpp"
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

TEST_SUITE("evolve_ed") {

TEST_CASE("two-site Hamiltonian") {
  const Matrix h = build_hamiltonian(chain(2, 0, 0)).to_dense();
  Matrix want = Matrix::Zero(4, 4);
  want(1, 2) = want(2, 1) = 0.5;
  CHECK(max_abs(h - want) == 0.0);
  CHECK(max_abs(h - oracle::xx_hamiltonian(2)) < 1e-15);
}

TEST_CASE("sector Hamiltonian matches the Pauli construction") {
  for (int n : {4, 6, 7}) {
    ChainSpec s = chain(n, 0, 0);
    s.coupling = 1.3;
    const Matrix h = build_hamiltonian(s).to_dense();
    CHECK(max_abs(h - oracle::xx_hamiltonian(n, 1.3)) < 1e-14);
    const Matrix z = oracle::total_iz(n);
    CHECK(max_abs(h * z - z * h) < 1e-14);
  }
}

TEST_CASE("sector sizes are binomial") {
  const SectorHamiltonian h = build_hamiltonian(chain(8, 0, 0));
  const int binom[] = {1, 8, 28, 56, 70, 56, 28, 8, 1};
  for (int k = 0; k <= 8; ++k) CHECK(h.blocks[k].rows() == binom[k]);
}

TEST_CASE("chains beyond the site limit are refused") {
  CHECK_THROWS_AS(build_hamiltonian(chain(kEdSiteLimit + 1, 1, 1)), CapacityError);
  CHECK_THROWS_AS(transfer_supermatrix(chain(8, 1, 1), 6), CapacityError);
  CHECK_THROWS_AS(verify_block_scaling(load_family(CaseId::I, 42)), CapacityError);
  CHECK_THROWS_AS(build_hamiltonian(chain(1, 1, 1)), ConfigurationError);
}

TEST_CASE("zero transfer time leaves the background at the receiver") {
  std::mt19937_64 rng(31);
  const DensityMatrix rho_s(oracle::random_density(rng, 4));
  const DensityMatrix r = evolve_receiver(rho_s, chain(4, 0.0, 1.5));
  CHECK(max_abs(r.matrix() - oracle::thermal(2, 1.5)) < 1e-14);
}

TEST_CASE("receiver state matches brute-force evolution") {
  std::mt19937_64 rng(32);
  const double params[][2] = {{0.7, 0.0}, {3.1, 1.2}, {5.0, 6.0}};
  for (int n : {4, 5, 6}) {
    for (const auto& tb : params) {
      const Matrix rho_s = oracle::random_density(rng, 4);
      const DensityMatrix r = evolve_receiver(DensityMatrix(rho_s), chain(n, tb[0], tb[1]));
      CHECK(max_abs(r.matrix() - oracle::receiver(rho_s, n, tb[0], tb[1])) < 1e-12);
    }
  }
}

TEST_CASE("transfer supermatrix matches brute-force evolution") {
  const double params[][2] = {{0.7, 0.0}, {3.1, 1.2}, {8.51533, 10.0}};
  for (int n : {4, 6}) {
    for (const auto& tb : params) {
      const TransferSupermatrix t = transfer_supermatrix(chain(n, tb[0], tb[1]));
      CHECK(t.backend == "ed");
      CHECK(max_abs(t.entries - oracle::transfer(n, tb[0], tb[1])) < 1e-12);
    }
  }
}

TEST_CASE("transfer supermatrix agrees with direct evolution of the sender") {
  std::mt19937_64 rng(33);
  const ChainSpec s = chain(7, 4.2, 2.0);
  const TransferSupermatrix t = transfer_supermatrix(s);
  for (int k = 0; k < 5; ++k) {
    const DensityMatrix rho(oracle::random_density(rng, 4));
    CHECK(max_abs(t.apply(rho.matrix()) - evolve_receiver(rho, s).matrix()) < 1e-12);
  }
}

TEST_CASE("fully polarized background") {
  const TransferSupermatrix inf = transfer_supermatrix(chain(6, 2.0, INFINITY));
  const TransferSupermatrix big = transfer_supermatrix(chain(6, 2.0, 60.0));
  CHECK(max_abs(inf.entries - big.entries) < 1e-14);
}

TEST_CASE("structural invariants") {
  for (double b : {0.0, 2.3462, 10.0}) {
    const TransferSupermatrix t = transfer_supermatrix(chain(6, 5.6651, b));
    const InvariantReport rep = check_invariants(t);
    CHECK(rep.ok());
    CHECK(rep.trace_defect < 1e-12);
    CHECK(rep.hermiticity_defect < 1e-12);
    CHECK(rep.order_leakage < 1e-12);
  }
}

TEST_CASE("block-scaled receiver within rounding of direct evolution") {
  const ScalableFamily f = load_family(CaseId::I, 6);
  const DensityMatrix r = evolve_receiver(sender_state(f, 0.0, 0.2), f.chain());
  CHECK(max_abs(r.matrix() - receiver_state(f, 0.0, 0.2).matrix()) < 2e-3);
}

TEST_CASE("fitted scale factors at six sites") {
  for (CaseId c : {CaseId::I, CaseId::II, CaseId::III, CaseId::IV}) {
    const ScalableFamily f = load_family(c, 6);
    const ScalingReport rep = verify_block_scaling(f);
    CAPTURE(to_string(c));
    CHECK(rep.backend == "ed");
    CHECK(rep.within(1e-3, 2e-3));
    CHECK(rep.blocks.size() == 1u + f.uses_c1() + f.uses_c2());
    for (const BlockFit& b : rep.blocks) {
      CAPTURE(b.order);
      CHECK(std::abs(b.lambda_hat - b.expected) < 1e-3);
      CHECK(b.residual <= 2e-3);
    }
  }
}

TEST_CASE("json round trip") {
  const TransferSupermatrix t = transfer_supermatrix(chain(5, 1.25, INFINITY));
  const nlohmann::json j = t;
  CHECK(j.at("b_field").get<std::string>() == "inf");
  const TransferSupermatrix back = j.get<TransferSupermatrix>();
  CHECK(max_abs(back.entries - t.entries) == 0.0);
  CHECK(back.chain.n_sites == 5);
  CHECK(std::isinf(back.chain.b_field));
  CHECK(back.backend == "ed");
  nlohmann::json broken = j;
  broken["entries"].erase(0);
  CHECK_THROWS_AS(broken.get<TransferSupermatrix>(), ConfigurationError);
}

TEST_CASE("backend selection") {
  CHECK(parse_backend("ed") == Backend::ed);
  CHECK(parse_backend("auto") == Backend::automatic);
  CHECK_THROWS_AS(parse_backend("dmrg"), ConfigurationError);
  CHECK(compute_transfer(chain(6, 1, 1), Backend::automatic).backend == "ed");
  CHECK(compute_transfer(chain(14, 1, 1), Backend::automatic).backend == "ff");
}

}  // TEST_SUITE
