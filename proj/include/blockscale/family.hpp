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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockscale/qmat.hpp"

namespace blockscale {

enum class CaseId { I, II, III, IV };

std::string to_string(CaseId id);
CaseId parse_case(std::string_view text);  // "I".."IV" or "1".."4"; ConfigurationError otherwise

/// One published block-scalable family on a chain of n_sites spins.
///
/// The two-qubit sender state is
///   rho_S(c1, c2) = fixed + template0 + c1*template1 + c2*template2
/// and the block-scaled receiver state replaces template0 by
/// lambda0*template0 and c_n by lambda_n*c_n. Templates for absent coherence
/// orders are zero and their lambdas are reported as 0.
struct ScalableFamily {
  CaseId case_id = CaseId::I;
  int n_sites = 0;
  Matrix template_fixed;  // diag(0,0,0,1)
  Matrix template0;       // traceless, order 0
  Matrix template1;       // orders +-1
  Matrix template2;       // orders +-2
  double lambda0 = 1.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double transfer_time = 0.0;
  double b_field = 0.0;
  // Semi-axes of the admissible domain (sender PSD), computed on load. The
  // coordinate a case keeps at zero has semi-axis 0.
  double c1_max = 0.0;
  double c2_max = 0.0;
  // Values printed with the published figures, kept for comparison.
  std::optional<double> printed_c1_max;
  std::optional<double> printed_c2_max;
  // Printed (4,4) coefficient; template0 uses the sum of the printed
  // diagonal entries instead, which keeps it exactly traceless.
  double printed_a44_coefficient = 0.0;

  bool has_order(int n) const;  // n in {1, 2}
  bool uses_c1() const { return has_order(1); }
  bool uses_c2() const { return has_order(2); }
  ChainSpec chain() const;
};

/// Raw text of the bundled data table (data/appendix_families.txt).
std::string_view appendix_table();

/// Parses a table in the bundled format. Throws ConfigurationError.
std::vector<ScalableFamily> parse_family_table(std::string_view text);

/// Throws LookupError for combinations outside the published eight.
ScalableFamily load_family(CaseId case_id, int n_sites);
const std::vector<ScalableFamily>& all_families();

/// fixed + lambda0*template0 + coef1*template1 + coef2*template2, unvalidated.
Matrix family_matrix(const ScalableFamily& f, double lambda0, double coef1, double coef2);

/// Throw ContractError for negative c or a nonzero coordinate the case keeps
/// at zero, and DomainError (carrying the min eigenvalue) outside the domain.
DensityMatrix sender_state(const ScalableFamily& f, double c1, double c2);
DensityMatrix receiver_state(const ScalableFamily& f, double c1, double c2);

/// Largest r with the sender PSD at (r cos theta, r sin theta). Returns
/// +inf for a direction along which the state never leaves the domain
/// (a coordinate whose coherence order the family lacks).
double domain_boundary(const ScalableFamily& f, double theta);

struct GridPoint {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Sampling of the admissible domain. Cases I and II use `resolution`
/// evenly spaced points on the single active axis; cases III and IV use a
/// polar grid of `resolution` angles in [0, pi/2] and `resolution` radii from
/// 0 to the boundary, with the origin listed once. resolution >= 2.
std::vector<GridPoint> domain_grid(const ScalableFamily& f, int resolution);

struct SweepPoint {
  double c1 = 0.0;
  double c2 = 0.0;
  double concurrence_sender = 0.0;
  double concurrence_receiver = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
};

SweepResult grid_sweep(const ScalableFamily& f, int resolution);

}  // namespace blockscale
