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

#include "blockscale/family.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "blockscale/coherence.hpp"
#include "blockscale/concurrence.hpp"
#include "blockscale/errors.hpp"
#include "blockscale/parallel.hpp"

namespace blockscale {

namespace detail {
std::string_view embedded_appendix_table();
}

namespace {

double parse_double(std::string_view text, std::string_view key) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigurationError("bad number '" + std::string(text) + "' for key " + std::string(key));
  }
  return v;
}

Complex parse_complex(std::string_view text, std::string_view key) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw ConfigurationError("complex entry " + std::string(key) + " needs the form re,im");
  }
  return {parse_double(text.substr(0, comma), key), parse_double(text.substr(comma + 1), key)};
}

void place(Matrix& m, int row, int col, Complex z) {
  m(row, col) = z;
  m(col, row) = std::conj(z);
}

// The order a template must live on, by upper-triangle position.
void check_order(const Matrix& m, int order, const char* name) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != Complex(0.0) && std::abs(coherence_order(i, j)) != order) {
        std::ostringstream os;
        os << name << " has an entry at (" << i + 1 << "," << j + 1 << ") outside order +-" << order;
        throw ConfigurationError(os.str());
      }
    }
  }
}

ScalableFamily parse_record(std::string_view line) {
  std::map<std::string, std::string, std::less<>> kv;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigurationError("token without key=value: " + tok);
    if (!kv.emplace(tok.substr(0, eq), tok.substr(eq + 1)).second) {
      throw ConfigurationError("duplicate key " + tok.substr(0, eq));
    }
  }
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto need = [&](const char* key) {
    auto v = take(key);
    if (!v) throw ConfigurationError(std::string("family record lacks key ") + key);
    return *v;
  };
  auto need_d = [&](const char* key) { return parse_double(need(key), key); };
  auto opt_d = [&](const char* key) -> std::optional<double> {
    auto v = take(key);
    if (!v) return std::nullopt;
    return parse_double(*v, key);
  };

  ScalableFamily f;
  f.case_id = parse_case(need("case"));
  const double n = need_d("n");
  if (n != std::floor(n) || n < 4) throw ConfigurationError("family n must be an integer >= 4");
  f.n_sites = static_cast<int>(n);
  f.lambda0 = need_d("lambda0");
  f.lambda1 = opt_d("lambda1").value_or(0.0);
  f.lambda2 = opt_d("lambda2").value_or(0.0);
  f.transfer_time = need_d("t");
  f.b_field = need_d("b");
  f.printed_c1_max = opt_d("fig_c1max");
  f.printed_c2_max = opt_d("fig_c2max");

  const double a11 = need_d("a11");
  const double a22 = need_d("a22");
  const double a33 = need_d("a33");
  f.printed_a44_coefficient = need_d("a44coef");
  f.template_fixed = last_population_projector(4);
  f.template0 = Matrix::Zero(4, 4);
  f.template0(0, 0) = a11;
  f.template0(1, 1) = a22;
  f.template0(2, 2) = a33;
  f.template0(3, 3) = -(a11 + a22 + a33);
  f.template1 = Matrix::Zero(4, 4);
  f.template2 = Matrix::Zero(4, 4);

  struct Slot {
    const char* key;
    Matrix* target;
    int row, col;
  };
  const Slot slots[] = {{"z23", &f.template0, 1, 2}, {"z12", &f.template1, 0, 1},
                        {"z13", &f.template1, 0, 2}, {"z24", &f.template1, 1, 3},
                        {"z34", &f.template1, 2, 3}, {"z14", &f.template2, 0, 3}};
  for (const Slot& s : slots) {
    if (auto v = take(s.key)) place(*s.target, s.row, s.col, parse_complex(*v, s.key));
  }
  if (!kv.empty()) throw ConfigurationError("unknown family key " + kv.begin()->first);

  check_order(f.template0, 0, "template0");
  check_order(f.template1, 1, "template1");
  check_order(f.template2, 2, "template2");
  if (f.has_order(1) && f.lambda1 == 0.0) throw ConfigurationError("order-1 template without lambda1");
  if (f.has_order(2) && f.lambda2 == 0.0) throw ConfigurationError("order-2 template without lambda2");
  f.chain().validate();

  f.c1_max = f.uses_c1() ? domain_boundary(f, 0.0) : 0.0;
  f.c2_max = f.uses_c2() ? domain_boundary(f, std::numbers::pi / 2) : 0.0;
  return f;
}

Matrix scaled_state(const ScalableFamily& f, double l0, double l1, double l2, double c1, double c2) {
  if (!(c1 >= 0.0) || !(c2 >= 0.0) || !std::isfinite(c1) || !std::isfinite(c2)) {
    throw ContractError("transferred parameters must be finite and non-negative");
  }
  if (c1 != 0.0 && !f.uses_c1()) throw ContractError("this case has no order-1 parameter; c1 must be 0");
  if (c2 != 0.0 && !f.uses_c2()) throw ContractError("this case has no order-2 parameter; c2 must be 0");
  return family_matrix(f, l0, l1 * c1, l2 * c2);
}

// Direction cosines with exact zeros on the axes.
std::pair<double, double> direction(double theta) {
  if (theta == 0.0) return {1.0, 0.0};
  if (theta == std::numbers::pi / 2) return {0.0, 1.0};
  return {std::cos(theta), std::sin(theta)};
}

// Exact PSD, so boundary points pass DensityMatrix with the whole tolerance to spare.
bool sender_admissible(const ScalableFamily& f, double c1, double c2) {
  return min_eigenvalue(family_matrix(f, 1.0, c1, c2)) >= 0.0;
}

}  // namespace

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::I: return "I";
    case CaseId::II: return "II";
    case CaseId::III: return "III";
    case CaseId::IV: return "IV";
  }
  return "?";
}

CaseId parse_case(std::string_view text) {
  if (text == "I" || text == "1") return CaseId::I;
  if (text == "II" || text == "2") return CaseId::II;
  if (text == "III" || text == "3") return CaseId::III;
  if (text == "IV" || text == "4") return CaseId::IV;
  throw ConfigurationError("unknown case '" + std::string(text) + "'; expected I, II, III or IV");
}

bool ScalableFamily::has_order(int n) const {
  if (n == 1) return !template1.isZero(0.0);
  if (n == 2) return !template2.isZero(0.0);
  throw ContractError("has_order expects 1 or 2");
}

ChainSpec ScalableFamily::chain() const {
  ChainSpec spec;
  spec.n_sites = n_sites;
  spec.coupling = 1.0;
  spec.b_field = b_field;
  spec.transfer_time = transfer_time;
  return spec;
}

std::string_view appendix_table() { return detail::embedded_appendix_table(); }

std::vector<ScalableFamily> parse_family_table(std::string_view text) {
  std::vector<ScalableFamily> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    ScalableFamily f = parse_record(line);
    for (const auto& g : out) {
      if (g.case_id == f.case_id && g.n_sites == f.n_sites) {
        throw ConfigurationError("duplicate family record for case " + to_string(f.case_id));
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

const std::vector<ScalableFamily>& all_families() {
  static const std::vector<ScalableFamily> families = parse_family_table(appendix_table());
  return families;
}

ScalableFamily load_family(CaseId case_id, int n_sites) {
  for (const auto& f : all_families()) {
    if (f.case_id == case_id && f.n_sites == n_sites) return f;
  }
  std::ostringstream os;
  os << "no family for case " << to_string(case_id) << " with N=" << n_sites
     << "; available chain lengths are 6 and 42";
  throw LookupError(os.str());
}

Matrix family_matrix(const ScalableFamily& f, double lambda0, double coef1, double coef2) {
  return f.template_fixed + lambda0 * f.template0 + coef1 * f.template1 + coef2 * f.template2;
}

DensityMatrix sender_state(const ScalableFamily& f, double c1, double c2) {
  return DensityMatrix(scaled_state(f, 1.0, 1.0, 1.0, c1, c2));
}

DensityMatrix receiver_state(const ScalableFamily& f, double c1, double c2) {
  return DensityMatrix(scaled_state(f, f.lambda0, f.lambda1, f.lambda2, c1, c2));
}

double domain_boundary(const ScalableFamily& f, double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
    throw ContractError("domain direction must lie in [0, pi/2]");
  }
  const auto [cx, cy] = direction(theta);
  const double u1 = f.uses_c1() ? cx : 0.0;
  const double u2 = f.uses_c2() ? cy : 0.0;
  if (u1 == 0.0 && u2 == 0.0) return std::numeric_limits<double>::infinity();
  // lo stays admissible, hi does not.
  double lo = 0.0;
  double hi = 1.0;
  while (sender_admissible(f, hi * u1, hi * u2)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sender_admissible(f, mid * u1, mid * u2) ? lo : hi) = mid;
  }
  return lo;
}

std::vector<GridPoint> domain_grid(const ScalableFamily& f, int resolution) {
  if (resolution < 2) throw ContractError("grid resolution must be at least 2");
  const int last = resolution - 1;
  auto frac = [last](int k) { return static_cast<double>(k) / last; };
  std::vector<GridPoint> out;
  if (f.uses_c1() != f.uses_c2()) {
    out.reserve(resolution);
    for (int k = 0; k <= last; ++k) {
      if (f.uses_c1()) out.push_back({f.c1_max * frac(k), 0.0});
      else out.push_back({0.0, f.c2_max * frac(k)});
    }
    return out;
  }
  // Polar grid; the origin appears once and every ray ends on the boundary.
  out.reserve(1 + static_cast<std::size_t>(resolution) * last);
  out.push_back({0.0, 0.0});
  for (int j = 0; j <= last; ++j) {
    const double theta = j == last ? std::numbers::pi / 2 : (std::numbers::pi / 2) * frac(j);
    const auto [cx, cy] = direction(theta);
    const double rmax = j == 0 ? f.c1_max : j == last ? f.c2_max : domain_boundary(f, theta);
    for (int i = 1; i <= last; ++i) {
      const double r = rmax * frac(i);
      out.push_back({r * cx, r * cy});
    }
  }
  return out;
}

SweepResult grid_sweep(const ScalableFamily& f, int resolution) {
  const auto grid = domain_grid(f, resolution);
  SweepResult res;
  res.points.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const GridPoint g = grid[k];
    SweepPoint& p = res.points[k];
    p.c1 = g.c1;
    p.c2 = g.c2;
    p.concurrence_sender = wootters_concurrence(sender_state(f, g.c1, g.c2));
    p.concurrence_receiver = wootters_concurrence(receiver_state(f, g.c1, g.c2));
  });
  return res;
}

}  // namespace blockscale
