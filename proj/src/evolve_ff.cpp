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

#include "blockscale/evolve_ff.hpp"

#include <array>
#include <cmath>

#include "blockscale/errors.hpp"
#include "blockscale/parallel.hpp"

namespace blockscale {

namespace {

// Jordan-Wigner runs from site 1, so the sender operators carry no string.
// Fermionic operators are linear combinations c(v) = sum_k v_k c_k and
// c+(v) = sum_k v_k c+_k; vectors are indexed by VecId.
enum VecId { kRecvA, kRecvAConj, kRecvB, kRecvBConj, kSendA, kSendB, kVecCount };

struct Op {
  bool dagger;
  int vec;
};

struct OpList {
  std::array<Op, 8> ops{};
  int size = 0;
  void push(Op o) { ops[size++] = o; }
};

// |x><y| on one site as fermionic operators.
void push_site(OpList& l, int x, int y, int vec_c, int vec_cd) {
  if (x == 0 && y == 0) {
    l.push({false, vec_c});
    l.push({true, vec_cd});
  } else if (x == 1 && y == 1) {
    l.push({true, vec_cd});
    l.push({false, vec_c});
  } else if (x == 1) {
    l.push({true, vec_cd});
  } else {
    l.push({false, vec_c});
  }
}

// Two-point functions of the (possibly string-dressed) background.
struct Contractions {
  Complex det;
  std::array<std::array<Complex, kVecCount>, kVecCount> f{};      // v_p^T F v_q
  std::array<std::array<Complex, kVecCount>, kVecCount> plain{};  // v_p^T v_q

  Complex pair(const Op& a, const Op& b) const {
    if (a.dagger && !b.dagger) return f[b.vec][a.vec];
    if (!a.dagger && b.dagger) return plain[a.vec][b.vec] - f[a.vec][b.vec];
    return 0.0;
  }

  // Wick expansion over the operators not yet in `used`.
  Complex wick(const OpList& l, unsigned used) const {
    int first = -1;
    for (int k = 0; k < l.size; ++k) {
      if (!(used & (1u << k))) {
        first = k;
        break;
      }
    }
    if (first < 0) return 1.0;
    Complex total = 0.0;
    int between = 0;
    for (int k = first + 1; k < l.size; ++k) {
      if (used & (1u << k)) continue;
      const Complex c = pair(l.ops[first], l.ops[k]);
      if (c != Complex(0.0)) {
        const Complex rest = wick(l, used | (1u << first) | (1u << k));
        total += (between % 2 ? -1.0 : 1.0) * c * rest;
      }
      ++between;
    }
    return total;
  }
};

Contractions make_contractions(const std::array<Eigen::VectorXcd, kVecCount>& vecs,
                               const RealVector& occupation, const Matrix& b) {
  const Eigen::Index n = occupation.size();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix nd = occupation.cast<Complex>().asDiagonal();
  const Matrix x = id - nd + nd * b;
  Eigen::PartialPivLU<Matrix> lu(x);
  Contractions c;
  c.det = lu.determinant();
  const Matrix f = id - lu.solve(id - nd);
  for (int p = 0; p < kVecCount; ++p) {
    const Eigen::VectorXcd fv = f * vecs[p];
    for (int q = 0; q < kVecCount; ++q) {
      c.f[q][p] = vecs[q].transpose() * fv;
      c.plain[q][p] = vecs[q].transpose() * vecs[p];
    }
  }
  return c;
}

}  // namespace

FermionHopping single_particle_propagator(const ChainSpec& spec) {
  if (spec.n_sites < 2) throw ConfigurationError("a chain needs at least two sites");
  if (!(spec.coupling > 0.0) || !std::isfinite(spec.coupling)) {
    throw ConfigurationError("coupling must be positive and finite");
  }
  if (!(spec.transfer_time >= 0.0) || !std::isfinite(spec.transfer_time)) {
    throw ConfigurationError("transfer time must be finite and non-negative");
  }
  const int n = spec.n_sites;
  FermionHopping fh;
  fh.n_sites = n;
  fh.h = RealMatrix::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) fh.h(k, k + 1) = fh.h(k + 1, k) = 0.5 * spec.coupling;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(fh.h);
  const Eigen::VectorXcd phase =
      (es.eigenvalues().cast<Complex>() * Complex(0.0, -spec.transfer_time)).array().exp().matrix();
  const Matrix v = es.eigenvectors().cast<Complex>();
  fh.u = v * phase.asDiagonal() * v.transpose();
  return fh;
}

TransferSupermatrix transfer_supermatrix_ff(const ChainSpec& spec) {
  spec.validate();
  if (!(spec.b_field > 0.0)) {
    throw ConfigurationError("the free-fermion backend needs b > 0; use --backend ed for b = 0");
  }
  const int n = spec.n_sites;
  const FermionHopping fh = single_particle_propagator(spec);
  const Matrix& u = fh.u;

  // Background occupations; the sender is probed against I/4, hence 1/2.
  RealVector occ = RealVector::Constant(n, 1.0 / (1.0 + std::exp(spec.b_field)));
  occ(0) = occ(1) = 0.5;

  // Heisenberg images c_k(t) = sum_l u_kl c_l; odd receiver operators drag the
  // string over sites 1..N-2, whose image is the Gaussian factor 1 - 2W.
  Matrix proj = Matrix::Identity(n, n);
  proj(n - 2, n - 2) = proj(n - 1, n - 1) = 0.0;
  const Matrix w = u.adjoint() * proj * u;

  std::array<Eigen::VectorXcd, kVecCount> vecs;
  vecs[kRecvA] = u.row(n - 2).transpose();
  vecs[kRecvAConj] = u.row(n - 2).conjugate().transpose();
  vecs[kRecvB] = u.row(n - 1).transpose();
  vecs[kRecvBConj] = u.row(n - 1).conjugate().transpose();
  vecs[kSendA] = Eigen::VectorXcd::Unit(n, 0);
  vecs[kSendB] = Eigen::VectorXcd::Unit(n, 1);

  const Matrix id = Matrix::Identity(n, n);
  const std::array<Contractions, 2> ctr = {make_contractions(vecs, occ, id),
                                           make_contractions(vecs, occ, id - 2.0 * w)};

  TransferSupermatrix t;
  t.chain = spec;
  t.backend = "ff";
  // Receiver operator |m><n| yields rho_R(n, m).
  parallel_for(16, [&](std::size_t nm) {
    const int rn = static_cast<int>(nm) / 4;
    const int rm = static_cast<int>(nm) % 4;
    const int xa = rm >> 1, xb = rm & 1, ya = rn >> 1, yb = rn & 1;
    const bool odd_a = xa != ya, odd_b = xb != yb;
    const double r_sign = odd_b && ya ? -1.0 : 1.0;
    const Contractions& c = ctr[odd_a != odd_b ? 1 : 0];
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const int sxa = i >> 1, sxb = i & 1, sya = j >> 1, syb = j & 1;
        const double s_sign = sxb != syb && sya ? -1.0 : 1.0;
        OpList l;
        push_site(l, xa, ya, kRecvA, kRecvAConj);
        push_site(l, xb, yb, kRecvB, kRecvBConj);
        push_site(l, sxa, sya, kSendA, kSendA);
        push_site(l, sxb, syb, kSendB, kSendB);
        t(rn, rm, i, j) = 4.0 * c.det * r_sign * s_sign * c.wick(l, 0u);
      }
    }
  });
  return t;
}

}  // namespace blockscale
