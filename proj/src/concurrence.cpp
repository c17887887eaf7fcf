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

#include "blockscale/concurrence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "blockscale/errors.hpp"

namespace blockscale {

namespace {

// sigma_y (x) sigma_y is real in the computational basis.
Matrix spin_flip() {
  Matrix y = Matrix::Zero(4, 4);
  y(0, 3) = -1.0;
  y(1, 2) = 1.0;
  y(2, 1) = 1.0;
  y(3, 0) = -1.0;
  return y;
}

// rho = B B^dagger with B = V sqrt(D); negative rounding residue is dropped.
Matrix psd_factor(const Matrix& m) {
  const Eigensystem es = hermitian_eigensystem(m);
  RealVector root = es.values.cwiseMax(0.0).cwiseSqrt();
  return es.vectors * root.cast<Complex>().asDiagonal();
}

}  // namespace

std::array<double, 4> wootters_lambdas(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw ContractError("concurrence needs a two-qubit (4x4) density matrix");
  // The lambdas are the singular values of tau = B^T (Y x Y) B, since
  // tau tau^dagger shares its spectrum with rho rho-tilde. Working with
  // singular values avoids square roots of eigenvalues near zero, which
  // would amplify rounding in rank-deficient states.
  const Matrix b = psd_factor(rho.matrix());
  const Matrix tau = b.transpose() * spin_flip() * b;
  const Eigen::JacobiSVD<Matrix> svd(tau);
  const RealVector sv = svd.singularValues();
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) out[k] = sv(k);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double wootters_concurrence(const DensityMatrix& rho) {
  const auto l = wootters_lambdas(rho);
  const double c = l[0] - l[1] - l[2] - l[3];
  return std::clamp(c, 0.0, 1.0);
}

void XStateParams::validate() const {
  const double pops[] = {a11, a22, a33, a44};
  for (double a : pops) {
    if (!(a >= 0.0)) throw ContractError("X-state population is negative");
  }
  if (std::abs(a11 + a22 + a33 + a44 - 1.0) > kTraceTolerance) {
    throw ContractError("X-state populations do not sum to 1");
  }
}

Matrix XStateParams::to_matrix() const {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = a11;
  m(1, 1) = a22;
  m(2, 2) = a33;
  m(3, 3) = a44;
  m(1, 2) = Complex(0.0, a23);
  m(2, 1) = Complex(0.0, -a23);
  m(0, 3) = s;
  m(3, 0) = s;
  return m;
}

XStateParams case1_params(const ScalableFamily& f, Side side, double c2) {
  // Order +-1 parts are ignored; for Case I they are absent.
  const double l0 = side == Side::sender ? 1.0 : f.lambda0;
  const double l2 = side == Side::sender ? c2 : f.lambda2 * c2;
  XStateParams p;
  p.a11 = f.template_fixed(0, 0).real() + l0 * f.template0(0, 0).real();
  p.a22 = f.template_fixed(1, 1).real() + l0 * f.template0(1, 1).real();
  p.a33 = f.template_fixed(2, 2).real() + l0 * f.template0(2, 2).real();
  p.a44 = f.template_fixed(3, 3).real() + l0 * f.template0(3, 3).real();
  p.a23 = l0 * f.template0(1, 2).imag();
  p.s = l2 * f.template2(0, 3).real();
  return p;
}

std::array<double, 4> case1_eigenvalues(const XStateParams& p) {
  const double g = std::sqrt(p.a22 * p.a33);
  const double r = std::sqrt(p.a11 * p.a44);
  return {std::abs(p.a23 + g), std::abs(p.a23 - g), std::abs(p.s + r), std::abs(p.s - r)};
}

bool case1_condition_holds(const XStateParams& p) {
  return std::sqrt(p.a11 * p.a44) > p.a23 + std::sqrt(p.a22 * p.a33);
}

Case1Concurrence case1_concurrence(const XStateParams& p) {
  p.validate();
  const auto l = case1_eigenvalues(p);
  // The closed form needs s + sqrt(a11 a44) to be the largest root for either
  // sign of a23; with s >= 0 the condition below is sufficient.
  const bool closed_form_valid =
      p.s >= 0.0 && std::sqrt(p.a11 * p.a44) > std::abs(p.a23) + std::sqrt(p.a22 * p.a33);
  if (!closed_form_valid) {
    return {wootters_concurrence(DensityMatrix(p.to_matrix())), true};
  }
  return {std::clamp(2.0 * p.s - l[0] - l[1], 0.0, 1.0), false};
}

double critical_value(const ScalableFamily& f, Side side) {
  if (f.case_id != CaseId::I) {
    throw UnsupportedCaseError("critical value is defined for Case I families only");
  }
  const auto l = case1_eigenvalues(case1_params(f, side, 0.0));
  const double half_sum = 0.5 * (l[0] + l[1]);
  return side == Side::sender ? half_sum : half_sum / f.lambda2;
}

}  // namespace blockscale
