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

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "blockscale/family.hpp"
#include "blockscale/qmat.hpp"
#include "blockscale/transfer.hpp"

namespace blockscale {

// Random coherence-block perturbation of a two-qubit sender state. Each block
// is Hermitian; off-diagonal entries are modulus*exp(i*phase).
struct PerturbationSample {
  Matrix sigma0;       // order 0, traceless
  Matrix sigma1_pair;  // orders +-1
  Matrix sigma2_pair;  // orders +-2
};

using RandomStream = std::mt19937_64;

// Uniform on [0, 1) from the top 53 bits, identical on every platform.
double uniform01(RandomStream& rng);

// Consumes exactly 16 uniforms per call.
PerturbationSample sample_perturbation(RandomStream& rng);

// sigma^(S) for the family: the order-1 term is present only when the case
// carries c1, the order-2 term only when it carries c2.
Matrix perturbation_matrix(const ScalableFamily& f, double c1, double c2, const PerturbationSample& p);

std::optional<DensityMatrix> perturbed_sender(const ScalableFamily& f, double c1, double c2,
                                              const PerturbationSample& p, double eps);

// receiver_state + eps*T(sigma^(S)); nullopt when either the perturbed sender
// or the result leaves the state space.
std::optional<DensityMatrix> perturbed_receiver(const TransferSupermatrix& t, const ScalableFamily& f,
                                                double c1, double c2, const PerturbationSample& p,
                                                double eps);

// A point gives up after n_samples / (1 - max_rejection_fraction) draws.
inline constexpr double kDefaultMaxRejection = 0.99999;

enum class SamplingMode {
  pointwise,  // fresh perturbations at every grid point
  shared,     // one perturbation per sample, valid over the whole grid
};

SamplingMode parse_sampling_mode(const std::string& text);
std::string to_string(SamplingMode m);

std::vector<double> default_epsilons(CaseId c);
int default_sample_count(CaseId c);

struct MCStudyConfig {
  ScalableFamily family;
  std::vector<double> epsilons;
  int n_samples = 1000;
  int resolution = 11;
  std::uint64_t seed = 1;
  SamplingMode mode = SamplingMode::pointwise;
  double max_rejection_fraction = kDefaultMaxRejection;
  int workers = 0;  // 0 selects default_worker_count()

  void validate() const;  // ConfigurationError
};

struct MCPoint {
  double c1 = 0.0;
  double c2 = 0.0;
  double sender_mean = 0.0;
  double sender_stderr = 0.0;
  double receiver_mean = 0.0;
  double receiver_stderr = 0.0;
  std::uint64_t accepted = 0;
  std::uint64_t rejections = 0;
  bool aborted = false;  // means then cover the accepted draws only
};

struct MCGrid {
  double epsilon = 0.0;
  std::vector<MCPoint> points;
  std::vector<std::string> diagnostics;
};

struct MCResult {
  std::vector<MCGrid> grids;  // one per epsilon, in configuration order
  double wall_seconds = 0.0;
};

MCResult mc_mean_concurrence(const MCStudyConfig& cfg, const TransferSupermatrix& t);

struct Extremum {
  double value = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct SideExtrema {
  Extremum min;
  Extremum max;
};

struct GridExtrema {
  double epsilon = 0.0;
  SideExtrema sender;
  SideExtrema receiver;
};

// First occurrence wins ties, in grid order.
GridExtrema extrema_scan(const MCGrid& grid);

// The two-parameter corner pattern: sender maximum at (0, c2_max), receiver
// maximum at (c1_max, 0), both minima at the origin. Checked by value at the
// corner, so flat directions count as matches.
struct CornerPattern {
  bool sender_max_at_c2_corner = false;
  bool receiver_max_at_c1_corner = false;
  bool sender_min_at_origin = false;
  bool receiver_min_at_origin = false;

  bool all() const {
    return sender_max_at_c2_corner && receiver_max_at_c1_corner && sender_min_at_origin &&
           receiver_min_at_origin;
  }
};

CornerPattern corner_pattern(const ScalableFamily& f, const MCGrid& grid, double tol = 1e-12);

}  // namespace blockscale
