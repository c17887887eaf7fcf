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

// Independent reference implementations used only by the tests. They share
// no code paths with the library beyond the Matrix type: dense Pauli
// products instead of sector blocks, a Pade matrix exponential instead of
// eigendecompositions, explicit index loops instead of partial_trace.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "blockscale/qmat.hpp"

namespace oracle {

using blockscale::Complex;
using blockscale::Matrix;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Spin-1/2 operator on one site of an n-site chain, site 0 leftmost.
inline Matrix site_op(const Matrix& op, int site, int n) {
  Matrix out = Matrix::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, k == site ? op : Matrix(Matrix::Identity(2, 2)));
  return out;
}

inline Matrix spin_x() {
  Matrix m(2, 2);
  m << 0, 0.5, 0.5, 0;
  return m;
}
inline Matrix spin_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -0.5), Complex(0, 0.5), 0;
  return m;
}
inline Matrix spin_z() {
  Matrix m(2, 2);
  m << 0.5, 0, 0, -0.5;
  return m;
}

inline Matrix xx_hamiltonian(int n, double d = 1.0) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix h = Matrix::Zero(dim, dim);
  for (int i = 0; i + 1 < n; ++i) {
    h += d * (site_op(spin_x(), i, n) * site_op(spin_x(), i + 1, n) +
              site_op(spin_y(), i, n) * site_op(spin_y(), i + 1, n));
  }
  return h;
}

inline Matrix total_iz(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix z = Matrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i) z += site_op(spin_z(), i, n);
  return z;
}

// exp(b Iz) / Z by the Pade exponential.
inline Matrix thermal(int n, double b) {
  Matrix e = (b * total_iz(n)).exp();
  return e / e.trace();
}

// Keeps the last `keep` qubits of an n-qubit operator.
inline Matrix trace_out_front(const Matrix& rho, int n, int keep) {
  const Eigen::Index kd = Eigen::Index{1} << keep;
  const Eigen::Index rest = Eigen::Index{1} << (n - keep);
  Matrix out = Matrix::Zero(kd, kd);
  for (Eigen::Index g = 0; g < rest; ++g)
    for (Eigen::Index a = 0; a < kd; ++a)
      for (Eigen::Index b = 0; b < kd; ++b) out(a, b) += rho(g * kd + a, g * kd + b);
  return out;
}

// Receiver state by brute-force evolution of the full 2^n density matrix.
inline Matrix receiver(const Matrix& rho_s, int n, double t, double b, double d = 1.0) {
  const Matrix u = (Complex(0, -t) * xx_hamiltonian(n, d)).exp();
  const Matrix rho0 = kron(rho_s, thermal(n - 2, b));
  return trace_out_front(u * rho0 * u.adjoint(), n, 2);
}

// T(n,m,i,j) in the library layout: row 4n+m, column 4i+j.
inline Matrix transfer(int n, double t, double b, double d = 1.0) {
  const Matrix u = (Complex(0, -t) * xx_hamiltonian(n, d)).exp();
  const Matrix th = thermal(n - 2, b);
  Matrix out = Matrix::Zero(16, 16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Matrix e = Matrix::Zero(4, 4);
      e(i, j) = 1.0;
      const Matrix r = trace_out_front(u * kron(e, th) * u.adjoint(), n, 2);
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c) out(4 * a + c, 4 * i + j) = r(a, c);
    }
  return out;
}

inline Matrix random_hermitian(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> g;
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (m + m.adjoint());
}

inline Matrix random_density(std::mt19937_64& rng, Eigen::Index dim, Eigen::Index rank = -1) {
  if (rank < 0) rank = dim;
  std::normal_distribution<double> g;
  Matrix a(dim, rank);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) a(i, j) = Complex(g(rng), g(rng));
  Matrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline Matrix random_unitary(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> g;
  Matrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

// Smallest x in [lo, hi] with pred(x) true, pred monotone false -> true.
inline double bisect(const std::function<bool(double)>& pred, double lo, double hi, int iters = 200) {
  for (int k = 0; k < iters && hi - lo > 0; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

inline double min_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace oracle
