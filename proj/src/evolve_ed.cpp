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

#include "blockscale/evolve_ed.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "blockscale/errors.hpp"
#include "blockscale/parallel.hpp"

namespace blockscale {

namespace {

void check_capacity(int n_sites, int ed_limit) {
  if (n_sites > ed_limit) {
    std::ostringstream os;
    os << "exact diagonalization is limited to " << ed_limit << " sites (requested " << n_sites
       << "); use the free-fermion backend (--backend ff)";
    throw CapacityError(os.str());
  }
}

// Sector propagators e^{-iHt} together with the position of every basis
// index inside its sector.
struct Propagator {
  int n_sites = 0;
  std::vector<Matrix> sectors;
  std::vector<std::vector<std::uint64_t>> states;
  std::vector<std::uint32_t> position;

  // Evolved basis state |x>, reshaped so that row gamma, column r holds the
  // amplitude of |gamma, r> with r the two receiver bits.
  void add_column(std::uint64_t x, Complex weight, Matrix& out) const {
    const int k = std::popcount(x);
    const auto col = sectors[k].col(position[x]);
    const auto& st = states[k];
    for (std::size_t s = 0; s < st.size(); ++s) {
      const std::uint64_t y = st[s];
      out(static_cast<Eigen::Index>(y >> 2), static_cast<Eigen::Index>(y & 3)) +=
          weight * col(static_cast<Eigen::Index>(s));
    }
  }
};

Propagator make_propagator(const ChainSpec& spec, int ed_limit) {
  spec.validate();
  const SectorHamiltonian h = build_hamiltonian(spec, ed_limit);
  Propagator p;
  p.n_sites = spec.n_sites;
  p.sectors.resize(h.blocks.size());
  p.states = h.states;
  p.position.assign(std::size_t{1} << spec.n_sites, 0);
  for (const auto& states : h.states) {
    for (std::size_t s = 0; s < states.size(); ++s) p.position[states[s]] = static_cast<std::uint32_t>(s);
  }
  parallel_for(h.blocks.size(), [&](std::size_t k) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h.blocks[k]);
    if (es.info() != Eigen::Success) throw ContractError("sector eigensolver did not converge");
    const Eigen::VectorXcd phase =
        (es.eigenvalues().cast<Complex>() * Complex(0.0, -spec.transfer_time)).array().exp().matrix();
    const Matrix v = es.eigenvectors().cast<Complex>();
    p.sectors[k] = v * phase.asDiagonal() * v.transpose();
  });
  return p;
}

}  // namespace

Matrix SectorHamiltonian::to_dense() const {
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& st = states[k];
    for (std::size_t a = 0; a < st.size(); ++a) {
      for (std::size_t b = 0; b < st.size(); ++b) out(st[a], st[b]) = blocks[k](a, b);
    }
  }
  return out;
}

SectorHamiltonian build_hamiltonian(const ChainSpec& spec, int ed_limit) {
  if (spec.n_sites < 2) throw ConfigurationError("a chain needs at least two sites");
  if (!(spec.coupling > 0.0) || !std::isfinite(spec.coupling)) {
    throw ConfigurationError("coupling must be positive and finite");
  }
  check_capacity(spec.n_sites, ed_limit);
  const int n = spec.n_sites;
  SectorHamiltonian h;
  h.n_sites = n;
  h.coupling = spec.coupling;
  h.states.resize(n + 1);
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < dim; ++x) h.states[std::popcount(x)].push_back(x);
  std::vector<std::uint32_t> position(dim);
  for (const auto& st : h.states) {
    for (std::size_t s = 0; s < st.size(); ++s) position[st[s]] = static_cast<std::uint32_t>(s);
  }
  // D (IxIx + IyIy) = (D/2)(I+I- + I-I+): flip-flop amplitude D/2 per bond.
  const double amp = 0.5 * spec.coupling;
  h.blocks.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const auto& st = h.states[k];
    RealMatrix b = RealMatrix::Zero(st.size(), st.size());
    for (std::size_t a = 0; a < st.size(); ++a) {
      const std::uint64_t x = st[a];
      for (int bit = 0; bit + 1 < n; ++bit) {
        const std::uint64_t mask = std::uint64_t{3} << bit;
        const std::uint64_t pair = x & mask;
        if (pair == 0 || pair == mask) continue;
        b(position[x ^ mask], a) = amp;
      }
    }
    h.blocks[k] = std::move(b);
  }
  return h;
}

DensityMatrix evolve_receiver(const DensityMatrix& rho_s, const ChainSpec& spec, int ed_limit) {
  if (rho_s.dim() != 4) throw ContractError("sender state must be two-qubit");
  const Propagator p = make_propagator(spec, ed_limit);
  const int n_bg = spec.n_sites - 2;
  const auto w = thermal_weights(n_bg, spec.b_field);
  const Eigensystem es = hermitian_eigensystem(rho_s.matrix());
  const Eigen::Index rows = Eigen::Index{1} << n_bg;
  Matrix out = Matrix::Zero(4, 4);
  Matrix a(rows, 4);
  for (std::uint64_t beta = 0; beta < w.size(); ++beta) {
    if (w[beta] == 0.0) continue;
    for (int k = 0; k < 4; ++k) {
      const double pk = es.values(k);
      if (pk == 0.0) continue;
      a.setZero();
      for (std::uint64_t i = 0; i < 4; ++i) {
        const Complex c = es.vectors(i, k);
        if (c == Complex(0.0)) continue;
        p.add_column((i << n_bg) | beta, c, a);
      }
      out += (w[beta] * pk) * (a.transpose() * a.conjugate());
    }
  }
  return DensityMatrix(out);
}

TransferSupermatrix transfer_supermatrix(const ChainSpec& spec, int ed_limit) {
  const Propagator p = make_propagator(spec, ed_limit);
  const int n_bg = spec.n_sites - 2;
  const auto w = thermal_weights(n_bg, spec.b_field);
  const Eigen::Index rows = Eigen::Index{1} << n_bg;
  TransferSupermatrix t;
  t.chain = spec;
  t.backend = "ed";
  std::vector<Matrix> a(4, Matrix(rows, 4));
  for (std::uint64_t beta = 0; beta < w.size(); ++beta) {
    if (w[beta] == 0.0) continue;
    for (std::uint64_t i = 0; i < 4; ++i) {
      a[i].setZero();
      p.add_column((i << n_bg) | beta, 1.0, a[i]);
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const Matrix blk = w[beta] * (a[i].transpose() * a[j].conjugate());
        for (int n = 0; n < 4; ++n) {
          for (int m = 0; m < 4; ++m) t(n, m, i, j) += blk(n, m);
        }
      }
    }
  }
  return t;
}

ScalingReport verify_block_scaling(const ScalableFamily& f, int ed_limit) {
  check_capacity(f.n_sites, ed_limit);
  return fit_block_scaling(f, transfer_supermatrix(f.chain(), ed_limit));
}

}  // namespace blockscale
