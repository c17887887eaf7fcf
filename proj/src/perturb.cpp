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

#include "blockscale/perturb.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "blockscale/concurrence.hpp"
#include "blockscale/errors.hpp"
#include "blockscale/parallel.hpp"

namespace blockscale {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Distinct streams per (epsilon index, grid index); kSharedStream marks the
// one stream an epsilon uses in shared mode.
constexpr std::uint64_t kSharedStream = ~std::uint64_t{0};

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t eps_index, std::uint64_t grid_index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ eps_index) ^ grid_index);
}

Complex polar_draw(RandomStream& rng) {
  const double modulus = uniform01(rng);
  const double phase = 2.0 * std::numbers::pi * uniform01(rng);
  return std::polar(modulus, phase);
}

void place(Matrix& m, int row, int col, Complex z) {
  m(row, col) = z;
  m(col, row) = std::conj(z);
}

// Cheap screen before the eigenvalue test: Cholesky of m + tol*I.
bool passes_cholesky(const Matrix& m) {
  Eigen::Matrix4cd shifted = m;
  shifted.diagonal().array() += kPsdTolerance;
  Eigen::LLT<Eigen::Matrix4cd> llt(shifted);
  return llt.info() == Eigen::Success;
}

std::optional<DensityMatrix> admit(const Matrix& m) {
  if (!passes_cholesky(hermitian_part(m))) return std::nullopt;
  return DensityMatrix::try_make(m);
}

struct Accumulator {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double stderr_of_mean() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

struct PointBase {
  double c1 = 0.0, c2 = 0.0;
  Matrix sender;
  Matrix receiver;
};

struct Draw {
  double sender = 0.0;
  double receiver = 0.0;
};

std::optional<Draw> evaluate(const PointBase& base, const ScalableFamily& f, const TransferSupermatrix& t,
                             const PerturbationSample& p, double eps) {
  const Matrix sigma = perturbation_matrix(f, base.c1, base.c2, p);
  auto s = admit(base.sender + eps * sigma);
  if (!s) return std::nullopt;
  auto r = admit(base.receiver + eps * t.apply(sigma));
  if (!r) return std::nullopt;
  return Draw{wootters_concurrence(*s), wootters_concurrence(*r)};
}

std::uint64_t attempt_cap(const MCStudyConfig& cfg) {
  const double cap = std::ceil(cfg.n_samples / (1.0 - cfg.max_rejection_fraction));
  return static_cast<std::uint64_t>(std::min(cap, 1e18));
}

void finish_point(MCPoint& pt, const Accumulator& s, const Accumulator& r) {
  pt.accepted = s.n;
  pt.sender_mean = s.n ? s.mean : std::nan("");
  pt.receiver_mean = r.n ? r.mean : std::nan("");
  pt.sender_stderr = s.stderr_of_mean();
  pt.receiver_stderr = r.stderr_of_mean();
}

std::string abort_message(double eps, const MCPoint& pt, std::uint64_t cap) {
  std::ostringstream os;
  os << "eps=" << eps << " point (" << pt.c1 << ", " << pt.c2 << "): accepted " << pt.accepted
     << " of " << cap << " draws before the rejection cap";
  return os.str();
}

}  // namespace

double uniform01(RandomStream& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

PerturbationSample sample_perturbation(RandomStream& rng) {
  PerturbationSample p;
  p.sigma0 = Matrix::Zero(4, 4);
  p.sigma1_pair = Matrix::Zero(4, 4);
  p.sigma2_pair = Matrix::Zero(4, 4);
  double raw[4];
  for (double& v : raw) v = 2.0 * uniform01(rng) - 1.0;
  const double mean = 0.25 * (raw[0] + raw[1] + raw[2] + raw[3]);
  double head = 0.0;
  for (int k = 0; k < 3; ++k) {
    p.sigma0(k, k) = raw[k] - mean;
    head += raw[k] - mean;
  }
  // Equal to raw[3] - mean up to rounding; written this way the trace is exactly 0.
  p.sigma0(3, 3) = -head;
  place(p.sigma0, 1, 2, polar_draw(rng));
  place(p.sigma1_pair, 0, 1, polar_draw(rng));
  place(p.sigma1_pair, 0, 2, polar_draw(rng));
  place(p.sigma1_pair, 1, 3, polar_draw(rng));
  place(p.sigma1_pair, 2, 3, polar_draw(rng));
  place(p.sigma2_pair, 0, 3, polar_draw(rng));
  return p;
}

Matrix perturbation_matrix(const ScalableFamily& f, double c1, double c2, const PerturbationSample& p) {
  Matrix m = p.sigma0;
  if (f.uses_c1()) m += c1 * p.sigma1_pair;
  if (f.uses_c2()) m += c2 * p.sigma2_pair;
  return m;
}

std::optional<DensityMatrix> perturbed_sender(const ScalableFamily& f, double c1, double c2,
                                              const PerturbationSample& p, double eps) {
  const DensityMatrix base = sender_state(f, c1, c2);
  if (eps == 0.0) return base;
  return admit(base.matrix() + eps * perturbation_matrix(f, c1, c2, p));
}

std::optional<DensityMatrix> perturbed_receiver(const TransferSupermatrix& t, const ScalableFamily& f,
                                                double c1, double c2, const PerturbationSample& p,
                                                double eps) {
  if (!perturbed_sender(f, c1, c2, p, eps)) return std::nullopt;
  const DensityMatrix base = receiver_state(f, c1, c2);
  if (eps == 0.0) return base;
  return admit(base.matrix() + eps * t.apply(perturbation_matrix(f, c1, c2, p)));
}

SamplingMode parse_sampling_mode(const std::string& text) {
  if (text == "pointwise") return SamplingMode::pointwise;
  if (text == "shared") return SamplingMode::shared;
  throw ConfigurationError("unknown sampling mode '" + text + "'; expected pointwise or shared");
}

std::string to_string(SamplingMode m) { return m == SamplingMode::shared ? "shared" : "pointwise"; }

std::vector<double> default_epsilons(CaseId c) {
  if (c == CaseId::I || c == CaseId::II) return {0.0125, 0.025, 0.05, 0.1, 0.2, 1.0};
  return {0.0125, 0.025, 0.05, 0.1, 0.2, 0.5};
}

int default_sample_count(CaseId c) { return c == CaseId::I || c == CaseId::II ? 5000 : 1000; }

void MCStudyConfig::validate() const {
  if (n_samples < 1) throw ConfigurationError("n_samples must be at least 1");
  if (resolution < 2) throw ConfigurationError("grid resolution must be at least 2");
  if (epsilons.empty()) throw ConfigurationError("at least one epsilon is required");
  for (double e : epsilons) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw ConfigurationError("epsilons must be finite and >= 0");
  }
  if (!(max_rejection_fraction >= 0.0 && max_rejection_fraction < 1.0)) {
    throw ConfigurationError("max_rejection_fraction must lie in [0, 1)");
  }
}

MCResult mc_mean_concurrence(const MCStudyConfig& cfg, const TransferSupermatrix& t) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const ScalableFamily& f = cfg.family;
  const auto grid = domain_grid(f, cfg.resolution);
  std::vector<PointBase> bases(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    bases[g] = {grid[g].c1, grid[g].c2, sender_state(f, grid[g].c1, grid[g].c2).matrix(),
                receiver_state(f, grid[g].c1, grid[g].c2).matrix()};
  }
  const std::uint64_t cap = attempt_cap(cfg);
  const auto n_target = static_cast<std::uint64_t>(cfg.n_samples);

  MCResult res;
  for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
    const double eps = cfg.epsilons[e];
    MCGrid out;
    out.epsilon = eps;
    out.points.resize(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      out.points[g].c1 = grid[g].c1;
      out.points[g].c2 = grid[g].c2;
    }
    if (eps == 0.0) {
      // Every draw coincides with the unperturbed state.
      parallel_for(grid.size(), [&](std::size_t g) {
        MCPoint& pt = out.points[g];
        pt.sender_mean = wootters_concurrence(sender_state(f, pt.c1, pt.c2));
        pt.receiver_mean = wootters_concurrence(receiver_state(f, pt.c1, pt.c2));
        pt.accepted = n_target;
      }, cfg.workers);
    } else if (cfg.mode == SamplingMode::pointwise) {
      parallel_for(grid.size(), [&](std::size_t g) {
        RandomStream rng(stream_seed(cfg.seed, e, g));
        Accumulator s, r;
        std::uint64_t attempts = 0;
        MCPoint& pt = out.points[g];
        while (s.n < n_target && attempts < cap) {
          ++attempts;
          const auto d = evaluate(bases[g], f, t, sample_perturbation(rng), eps);
          if (!d) {
            ++pt.rejections;
            continue;
          }
          s.add(d->sender);
          r.add(d->receiver);
        }
        finish_point(pt, s, r);
        pt.aborted = s.n < n_target;
      }, cfg.workers);
    } else {
      RandomStream rng(stream_seed(cfg.seed, e, kSharedStream));
      std::vector<Accumulator> s(grid.size()), r(grid.size());
      std::vector<std::optional<DensityMatrix>> senders(grid.size()), receivers(grid.size());
      std::uint64_t attempts = 0, accepted = 0, rejected = 0;
      // Acceptance needs every point, so the order of the checks is free; the
      // point that failed last is tried first.
      std::size_t hot = 0;
      while (accepted < n_target && attempts < cap) {
        ++attempts;
        const PerturbationSample p = sample_perturbation(rng);
        bool ok = true;
        for (std::size_t k = 0; k < grid.size() && ok; ++k) {
          const std::size_t g = (hot + k) % grid.size();
          const Matrix sigma = perturbation_matrix(f, bases[g].c1, bases[g].c2, p);
          senders[g] = admit(bases[g].sender + eps * sigma);
          if (senders[g]) receivers[g] = admit(bases[g].receiver + eps * t.apply(sigma));
          if (!senders[g] || !receivers[g]) {
            ok = false;
            hot = g;
          }
        }
        if (!ok) {
          ++rejected;
          continue;
        }
        ++accepted;
        parallel_for(grid.size(), [&](std::size_t g) {
          s[g].add(wootters_concurrence(*senders[g]));
          r[g].add(wootters_concurrence(*receivers[g]));
        }, cfg.workers);
      }
      for (std::size_t g = 0; g < grid.size(); ++g) {
        finish_point(out.points[g], s[g], r[g]);
        out.points[g].rejections = rejected;
        out.points[g].aborted = accepted < n_target;
      }
    }
    for (const MCPoint& pt : out.points) {
      if (pt.aborted) out.diagnostics.push_back(abort_message(eps, pt, cap));
    }
    res.grids.push_back(std::move(out));
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

GridExtrema extrema_scan(const MCGrid& grid) {
  if (grid.points.empty()) throw ContractError("extrema of an empty grid");
  GridExtrema ex;
  ex.epsilon = grid.epsilon;
  auto at = [](const MCPoint& p, double v) { return Extremum{v, p.c1, p.c2}; };
  const MCPoint& p0 = grid.points.front();
  ex.sender = {at(p0, p0.sender_mean), at(p0, p0.sender_mean)};
  ex.receiver = {at(p0, p0.receiver_mean), at(p0, p0.receiver_mean)};
  for (const MCPoint& p : grid.points) {
    if (p.sender_mean < ex.sender.min.value) ex.sender.min = at(p, p.sender_mean);
    if (p.sender_mean > ex.sender.max.value) ex.sender.max = at(p, p.sender_mean);
    if (p.receiver_mean < ex.receiver.min.value) ex.receiver.min = at(p, p.receiver_mean);
    if (p.receiver_mean > ex.receiver.max.value) ex.receiver.max = at(p, p.receiver_mean);
  }
  return ex;
}

CornerPattern corner_pattern(const ScalableFamily& f, const MCGrid& grid, double tol) {
  const GridExtrema ex = extrema_scan(grid);
  auto find = [&](double c1, double c2) -> const MCPoint* {
    for (const MCPoint& p : grid.points) {
      if (p.c1 == c1 && p.c2 == c2) return &p;
    }
    return nullptr;
  };
  CornerPattern cp;
  const MCPoint* origin = find(0.0, 0.0);
  const MCPoint* c2_corner = find(0.0, f.c2_max);
  const MCPoint* c1_corner = find(f.c1_max, 0.0);
  if (c2_corner) cp.sender_max_at_c2_corner = c2_corner->sender_mean >= ex.sender.max.value - tol;
  if (c1_corner) cp.receiver_max_at_c1_corner = c1_corner->receiver_mean >= ex.receiver.max.value - tol;
  if (origin) {
    cp.sender_min_at_origin = origin->sender_mean <= ex.sender.min.value + tol;
    cp.receiver_min_at_origin = origin->receiver_mean <= ex.receiver.min.value + tol;
  }
  return cp;
}

}  // namespace blockscale
