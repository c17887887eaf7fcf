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

#include "blockscale/qmat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "blockscale/errors.hpp"

namespace blockscale {

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Matrix hermitian_part(const Matrix& m) {
  return (m + m.adjoint()) * 0.5;
}

double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

DensityMatrix::DensityMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ConfigurationError("density matrix must be square and non-empty");
  }
  Matrix h = hermitian_part(m);
  const double trace = h.trace().real();
  if (!std::isfinite(trace) || std::abs(trace - 1.0) > kTraceTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "density matrix trace " << trace << " differs from 1";
    throw ContractError(os.str());
  }
  const double lowest = blockscale::min_eigenvalue(h);
  if (lowest < -kPsdTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "matrix is not positive semidefinite (min eigenvalue " << lowest << ")";
    throw DomainError(os.str(), lowest);
  }
  m_ = std::move(h);
  min_eigenvalue_ = lowest;
}

std::optional<DensityMatrix> DensityMatrix::try_make(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return std::nullopt;
  Matrix h = hermitian_part(m);
  const double trace = h.trace().real();
  if (!std::isfinite(trace) || std::abs(trace - 1.0) > kTraceTolerance) return std::nullopt;
  const double lowest = blockscale::min_eigenvalue(h);
  if (lowest < -kPsdTolerance) return std::nullopt;
  return DensityMatrix(std::move(h), lowest);
}

void ChainSpec::validate() const {
  std::ostringstream os;
  if (n_sites < 4) {
    os << "chain needs at least 4 sites, got " << n_sites;
  } else if (!(coupling > 0.0) || !std::isfinite(coupling)) {
    os << "coupling must be positive and finite, got " << coupling;
  } else if (!(b_field >= 0.0)) {
    os << "b must be non-negative, got " << b_field;
  } else if (!(transfer_time >= 0.0) || !std::isfinite(transfer_time)) {
    os << "transfer time must be non-negative and finite, got " << transfer_time;
  } else {
    return;
  }
  throw ConfigurationError(os.str());
}

Matrix tensor_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix partial_trace(const Matrix& m, std::span<const int> site_dims, std::span<const int> keep) {
  const int n_sites = static_cast<int>(site_dims.size());
  Eigen::Index total = 1;
  for (int d : site_dims) {
    if (d < 1) throw ConfigurationError("site dimensions must be positive");
    total *= d;
  }
  if (m.rows() != total || m.cols() != total) {
    std::ostringstream os;
    os << "operator dimension " << m.rows() << "x" << m.cols()
       << " does not match product of site dimensions " << total;
    throw ConfigurationError(os.str());
  }
  if (keep.empty()) throw ConfigurationError("partial trace must keep at least one site");

  std::vector<bool> kept(n_sites, false);
  for (int s : keep) {
    if (s < 0 || s >= n_sites) throw ConfigurationError("kept site index out of range");
    if (kept[s]) throw ConfigurationError("kept site listed twice");
    kept[s] = true;
  }

  // Row-major strides: site 0 is the most significant digit.
  std::vector<Eigen::Index> stride(n_sites, 1);
  for (int s = n_sites - 2; s >= 0; --s) stride[s] = stride[s + 1] * site_dims[s + 1];

  std::vector<int> kept_sites, traced_sites;
  for (int s = 0; s < n_sites; ++s) (kept[s] ? kept_sites : traced_sites).push_back(s);

  // Offsets of every kept (resp. traced) multi-index inside the full index.
  auto offsets = [&](const std::vector<int>& sites) {
    std::vector<Eigen::Index> out{0};
    for (int s : sites) {
      std::vector<Eigen::Index> next;
      next.reserve(out.size() * site_dims[s]);
      for (Eigen::Index base : out) {
        for (int v = 0; v < site_dims[s]; ++v) next.push_back(base + v * stride[s]);
      }
      out = std::move(next);
    }
    return out;
  };
  const auto kept_off = offsets(kept_sites);
  const auto traced_off = offsets(traced_sites);

  const auto dk = static_cast<Eigen::Index>(kept_off.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a) {
    for (Eigen::Index b = 0; b < dk; ++b) {
      Complex acc = 0.0;
      for (Eigen::Index t : traced_off) acc += m(kept_off[a] + t, kept_off[b] + t);
      out(a, b) = acc;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> site_dims,
                            std::span<const int> keep) {
  return DensityMatrix(partial_trace(rho.matrix(), site_dims, keep));
}

std::vector<double> thermal_weights(int n_sub, double b) {
  if (n_sub < 1) throw ConfigurationError("thermal state needs at least one spin");
  if (!(b >= 0.0)) throw ConfigurationError("b must be non-negative");
  const double aligned = 1.0 / (1.0 + std::exp(-b));
  const double flipped = 1.0 / (1.0 + std::exp(b));
  const std::size_t dim = std::size_t{1} << n_sub;
  std::vector<double> w(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const int flips = std::popcount(k);
    w[k] = std::pow(aligned, n_sub - flips) * std::pow(flipped, flips);
  }
  return w;
}

DensityMatrix thermal_state(int n_sub, double b) {
  const auto w = thermal_weights(n_sub, b);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(w.size()), static_cast<Eigen::Index>(w.size()));
  for (std::size_t k = 0; k < w.size(); ++k) m(k, k) = w[k];
  return DensityMatrix(m);
}

Eigensystem hermitian_eigensystem(const Matrix& m) {
  if (m.rows() != m.cols()) throw ContractError("eigensystem requires a square matrix");
  const double scale = std::max(1.0, max_abs(m));
  if (max_abs(m - m.adjoint()) > kHermitianTolerance * scale) {
    throw ContractError("eigensystem requires a Hermitian matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw ContractError("eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace blockscale
