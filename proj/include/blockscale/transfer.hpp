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
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "blockscale/family.hpp"
#include "blockscale/qmat.hpp"

namespace blockscale {

// Linear map rho_R(n,m) = sum_ij T(n,m,i,j) rho_S(i,j) on two-qubit states.
// Stored as a 16x16 matrix with row 4n+m and column 4i+j.
struct TransferSupermatrix {
  Matrix entries = Matrix::Zero(16, 16);
  ChainSpec chain;
  std::string backend;

  Complex operator()(int n, int m, int i, int j) const { return entries(4 * n + m, 4 * i + j); }
  Complex& operator()(int n, int m, int i, int j) { return entries(4 * n + m, 4 * i + j); }

  Matrix apply(const Matrix& sender) const;  // 4x4 in, 4x4 out
};

struct InvariantReport {
  double trace_defect = 0.0;        // max |sum_n T(n,n,i,j) - delta_ij|
  double hermiticity_defect = 0.0;  // max |T(n,m,i,j) - conj T(m,n,j,i)|
  double order_leakage = 0.0;       // max |T| between different coherence orders
  double min_image_eigenvalue = 0.0;  // over random density-matrix probes

  bool ok(double tol = 1e-10) const;
};

InvariantReport check_invariants(const TransferSupermatrix& t, int probes = 256,
                                 std::uint64_t seed = 0x5eedULL);

void to_json(nlohmann::json& j, const TransferSupermatrix& t);
void from_json(const nlohmann::json& j, TransferSupermatrix& t);

struct BlockFit {
  int order = 0;
  double lambda_hat = 0.0;
  double residual = 0.0;  // |image - lambda_hat*template|_F / |template|_F
  double expected = 0.0;  // tabulated scale factor
};

struct ScalingReport {
  CaseId case_id = CaseId::I;
  int n_sites = 0;
  std::string backend;
  std::vector<BlockFit> blocks;  // one per order present in the family

  bool within(double lambda_tol, double residual_tol) const;
};

void to_json(nlohmann::json& j, const ScalingReport& r);

// The zero-order block is probed together with the fixed population,
// image = T(e4 + template0) - e4; the other orders are probed directly.
ScalingReport fit_block_scaling(const ScalableFamily& f, const TransferSupermatrix& t);

enum class Backend { ed, ff, automatic };

Backend parse_backend(std::string_view text);
std::string to_string(Backend b);

// Exact diagonalization up to kEdSiteLimit sites, free fermions otherwise.
TransferSupermatrix compute_transfer(const ChainSpec& spec, Backend backend);

}  // namespace blockscale
