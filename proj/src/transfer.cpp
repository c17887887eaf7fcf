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

#include "blockscale/transfer.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "blockscale/coherence.hpp"
#include "blockscale/errors.hpp"
#include "blockscale/evolve_ed.hpp"
#include "blockscale/evolve_ff.hpp"

namespace blockscale {

namespace {

Complex inner(const Matrix& a, const Matrix& b) { return (a.conjugate().cwiseProduct(b)).sum(); }

nlohmann::json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double read_number(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigurationError("unexpected number text '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

Matrix TransferSupermatrix::apply(const Matrix& sender) const {
  if (sender.rows() != 4 || sender.cols() != 4) throw ConfigurationError("sender matrix must be 4x4");
  Eigen::VectorXcd v(16);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) v(4 * i + j) = sender(i, j);
  }
  const Eigen::VectorXcd r = entries * v;
  Matrix out(4, 4);
  for (int n = 0; n < 4; ++n) {
    for (int m = 0; m < 4; ++m) out(n, m) = r(4 * n + m);
  }
  return out;
}

bool InvariantReport::ok(double tol) const {
  return trace_defect <= tol && hermiticity_defect <= tol && order_leakage <= tol &&
         min_image_eigenvalue >= -tol;
}

InvariantReport check_invariants(const TransferSupermatrix& t, int probes, std::uint64_t seed) {
  InvariantReport r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      Complex tr = 0.0;
      for (int n = 0; n < 4; ++n) tr += t(n, n, i, j);
      r.trace_defect = std::max(r.trace_defect, std::abs(tr - (i == j ? 1.0 : 0.0)));
      for (int n = 0; n < 4; ++n) {
        for (int m = 0; m < 4; ++m) {
          r.hermiticity_defect =
              std::max(r.hermiticity_defect, std::abs(t(n, m, i, j) - std::conj(t(m, n, j, i))));
          if (coherence_order(n, m) != coherence_order(i, j)) {
            r.order_leakage = std::max(r.order_leakage, std::abs(t(n, m, i, j)));
          }
        }
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  r.min_image_eigenvalue = std::numeric_limits<double>::infinity();
  for (int p = 0; p < probes; ++p) {
    Matrix g(4, 4);
    for (int k = 0; k < 16; ++k) g(k / 4, k % 4) = Complex(gauss(rng), gauss(rng));
    // Rank-one probes every other draw keep the boundary of the state space covered.
    if (p % 2) g.rightCols(3).setZero();
    Matrix rho = g * g.adjoint();
    rho /= rho.trace();
    r.min_image_eigenvalue =
        std::min(r.min_image_eigenvalue, min_eigenvalue(hermitian_part(t.apply(rho))));
  }
  return r;
}

void to_json(nlohmann::json& j, const TransferSupermatrix& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < 16; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < 16; ++c) row.push_back({t.entries(r, c).real(), t.entries(r, c).imag()});
    rows.push_back(std::move(row));
  }
  j = nlohmann::json{{"n_sites", t.chain.n_sites},
                     {"coupling", t.chain.coupling},
                     {"b_field", number_or_inf(t.chain.b_field)},
                     {"transfer_time", t.chain.transfer_time},
                     {"backend", t.backend},
                     {"layout", "row 4n+m, column 4i+j, entry [re, im]"},
                     {"entries", std::move(rows)}};
}

void from_json(const nlohmann::json& j, TransferSupermatrix& t) {
  try {
    t.chain.n_sites = j.at("n_sites").get<int>();
    t.chain.coupling = read_number(j.at("coupling"));
    t.chain.b_field = read_number(j.at("b_field"));
    t.chain.transfer_time = read_number(j.at("transfer_time"));
    t.backend = j.at("backend").get<std::string>();
    const auto& rows = j.at("entries");
    if (!rows.is_array() || rows.size() != 16) throw ConfigurationError("entries must have 16 rows");
    t.entries = Matrix::Zero(16, 16);
    for (std::size_t r = 0; r < 16; ++r) {
      if (rows[r].size() != 16) throw ConfigurationError("entries rows must have 16 columns");
      for (std::size_t c = 0; c < 16; ++c) {
        const auto& z = rows[r][c];
        t.entries(r, c) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed transfer record: ") + e.what());
  }
}

bool ScalingReport::within(double lambda_tol, double residual_tol) const {
  for (const auto& b : blocks) {
    if (!(std::abs(b.lambda_hat - b.expected) <= lambda_tol) || !(b.residual <= residual_tol)) return false;
  }
  return true;
}

void to_json(nlohmann::json& j, const ScalingReport& r) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : r.blocks) {
    blocks.push_back({{"order", b.order},
                      {"lambda_hat", b.lambda_hat},
                      {"expected", b.expected},
                      {"difference", b.lambda_hat - b.expected},
                      {"residual", b.residual}});
  }
  j = nlohmann::json{{"case", to_string(r.case_id)},
                     {"n_sites", r.n_sites},
                     {"backend", r.backend},
                     {"blocks", std::move(blocks)}};
}

ScalingReport fit_block_scaling(const ScalableFamily& f, const TransferSupermatrix& t) {
  ScalingReport rep;
  rep.case_id = f.case_id;
  rep.n_sites = f.n_sites;
  rep.backend = t.backend;
  auto fit = [&](int order, const Matrix& tpl, const Matrix& img, double expected) {
    const double norm2 = inner(tpl, tpl).real();
    BlockFit b;
    b.order = order;
    b.expected = expected;
    b.lambda_hat = inner(tpl, img).real() / norm2;
    b.residual = (img - b.lambda_hat * tpl).norm() / std::sqrt(norm2);
    rep.blocks.push_back(b);
  };
  fit(0, f.template0, t.apply(f.template_fixed + f.template0) - f.template_fixed, f.lambda0);
  if (f.has_order(1)) fit(1, f.template1, t.apply(f.template1), f.lambda1);
  if (f.has_order(2)) fit(2, f.template2, t.apply(f.template2), f.lambda2);
  return rep;
}

Backend parse_backend(std::string_view text) {
  if (text == "ed") return Backend::ed;
  if (text == "ff") return Backend::ff;
  if (text == "auto") return Backend::automatic;
  throw ConfigurationError("unknown backend '" + std::string(text) + "'; expected ed, ff or auto");
}

std::string to_string(Backend b) {
  switch (b) {
    case Backend::ed: return "ed";
    case Backend::ff: return "ff";
    case Backend::automatic: return "auto";
  }
  return "?";
}

TransferSupermatrix compute_transfer(const ChainSpec& spec, Backend backend) {
  if (backend == Backend::automatic) backend = spec.n_sites <= kEdSiteLimit ? Backend::ed : Backend::ff;
  return backend == Backend::ed ? transfer_supermatrix(spec) : transfer_supermatrix_ff(spec);
}

}  // namespace blockscale
