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

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace blockscale {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-12;

// Largest entry modulus. All "infinity norm" tolerances in this library are
// entrywise.
double max_abs(const Matrix& m);

// (m + m^dagger) / 2
Matrix hermitian_part(const Matrix& m);

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
///
/// Construction symmetrizes the input before validation so round-off in the
/// anti-Hermitian part is absorbed. The stored matrix is exactly Hermitian.
class DensityMatrix {
 public:
  /// Throws ConfigurationError for non-square input, ContractError for a
  /// trace outside 1 +- kTraceTolerance and DomainError when the minimum
  /// eigenvalue is below -kPsdTolerance.
  explicit DensityMatrix(const Matrix& m);

  /// Non-throwing variant; nullopt for any violated invariant.
  static std::optional<DensityMatrix> try_make(const Matrix& m);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  DensityMatrix(Matrix m, double min_eigenvalue) : m_(std::move(m)), min_eigenvalue_(min_eigenvalue) {}

  Matrix m_;
  double min_eigenvalue_;
};

/// Uniform nearest-neighbour XX chain with a two-qubit sender on sites 1,2
/// and a two-qubit receiver on sites n-1,n (sites counted from 1). Site 1 is
/// the most significant bit of a basis index; bit value 0 means the spin
/// points along the field, bit value 1 is a flipped spin (an excitation).
struct ChainSpec {
  int n_sites = 4;
  double coupling = 1.0;
  double b_field = 0.0;  // hbar*omega0/kT; +inf selects the fully polarized background
  double transfer_time = 0.0;

  void validate() const;  // throws ConfigurationError
};

Matrix tensor_product(const Matrix& a, const Matrix& b);

/// Reduced operator on the kept sites (0-based positions into site_dims), in
/// their original order. Works for any square operator, not only states.
Matrix partial_trace(const Matrix& m, std::span<const int> site_dims, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> site_dims,
                            std::span<const int> keep);

/// Diagonal Gibbs weights of e^{b I_z} over n_sub spins, normalized. Entry k
/// is p^(n_sub - flips(k)) * q^flips(k) with p = 1/(1+e^{-b}), q = 1/(1+e^{b}).
std::vector<double> thermal_weights(int n_sub, double b);
DensityMatrix thermal_state(int n_sub, double b);

struct Eigensystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns
};

/// Throws ContractError when ||m - m^dagger|| exceeds kHermitianTolerance
/// (scaled by max(1, ||m||)).
Eigensystem hermitian_eigensystem(const Matrix& m);
double min_eigenvalue(const Matrix& hermitian);

}  // namespace blockscale
