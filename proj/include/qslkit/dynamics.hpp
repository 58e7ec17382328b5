// Copyright 2026 The qslkit Authors
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

/**
 * @file dynamics.hpp
 * @brief Fixed-step RK4 integration of the Lindblad master equation, overlap
 * trajectories cos Theta_t = Tr(rho0 rho_t), and first-exit (escape) times
 * from the robustness region cos Theta_t > 1 - lambda^2.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qslkit/bounds.hpp"
#include "qslkit/operators.hpp"

namespace qslkit {

/// Right-hand side of the master equation with per-model precomputation.
class LindbladGenerator {
 public:
  explicit LindbladGenerator(const SystemModel& model)
      : dim_(model.dim()),
        hamiltonian_(ComplexMatrix::Zero(model.dim(), model.dim())),
        decay_(ComplexMatrix::Zero(model.dim(), model.dim())),
        channels_(model.channels()) {
    for (const auto& h : model.hamiltonians()) hamiltonian_ += h;
    adjoints_.reserve(channels_.size());
    for (const auto& m : channels_) {
      adjoints_.push_back(m.adjoint());
      decay_ += adjoints_.back() * m;
    }
    has_hamiltonian_ = !model.hamiltonians().empty();
  }

  Eigen::Index dim() const noexcept { return dim_; }

  /// -i[H, rho] + sum_j D[M_j] rho
  ComplexMatrix operator()(const ComplexMatrix& rho) const {
    ComplexMatrix out = ComplexMatrix::Zero(dim_, dim_);
    if (has_hamiltonian_) {
      const ComplexMatrix hr = hamiltonian_ * rho;
      out.noalias() += -kI * (hr - hr.adjoint());  // rho H = (H rho)^dagger for Hermitian rho
    }
    if (!channels_.empty()) {
      for (std::size_t j = 0; j < channels_.size(); ++j) out.noalias() += channels_[j] * rho * adjoints_[j];
      const ComplexMatrix kr = decay_ * rho;
      out.noalias() -= 0.5 * (kr + kr.adjoint());
    }
    return out;
  }

  /// One classical RK4 step without re-Hermitization or renormalization.
  ComplexMatrix rk4_raw(const ComplexMatrix& rho, double h) const {
    const ComplexMatrix k1 = (*this)(rho);
    const ComplexMatrix k2 = (*this)(rho + (0.5 * h) * k1);
    const ComplexMatrix k3 = (*this)(rho + (0.5 * h) * k2);
    const ComplexMatrix k4 = (*this)(rho + h * k3);
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  /// RK4 step followed by (rho + rho^dagger)/2 and trace renormalization.
  void advance(ComplexMatrix& rho, double h) const {
    ComplexMatrix next = rk4_raw(rho, h);
    if (!next.allFinite()) throw NumericError("rk4 step produced non-finite entries (step too large?)");
    rho = 0.5 * (next + next.adjoint());
    const double tr = rho.trace().real();
    if (!(tr > 0.0) || !std::isfinite(tr)) throw NumericError("rk4 step destroyed the trace (step too large?)");
    rho /= tr;
  }

 private:
  Eigen::Index dim_;
  ComplexMatrix hamiltonian_;
  ComplexMatrix decay_;
  std::vector<ComplexMatrix> channels_;
  std::vector<ComplexMatrix> adjoints_;
  bool has_hamiltonian_ = false;
};

inline DensityMatrix rk4_step(const SystemModel& model, const DensityMatrix& rho, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("rk4_step: step must be positive");
  if (rho.dim() != model.dim()) throw DimensionError("rk4_step: state and model dimensions differ");
  ComplexMatrix m = rho.matrix();
  LindbladGenerator(model).advance(m, h);
  return DensityMatrix(std::move(m));
}

/// 0.01 / (sum ||H_j||_2 + sum ||M_j||_2^2 + 1).
inline double default_step(const SystemModel& model) {
  return 0.01 / (model.spectral_scale() + 1.0);
}

/// 10 / gamma_min over nonzero channel rates ||M_j||_2^2; falls back to the
/// Hamiltonian scale, then to 10.
inline double default_t_max(const SystemModel& model) {
  double gamma_min = 0.0;
  for (const auto& m : model.channels()) {
    const double n = spectral_norm(m);
    const double rate = n * n;
    if (rate > 1e-14 && (gamma_min == 0.0 || rate < gamma_min)) gamma_min = rate;
  }
  if (gamma_min > 0.0) return 10.0 / gamma_min;
  double hs = 0.0;
  for (const auto& h : model.hamiltonians()) hs += spectral_norm(h);
  return hs > 1e-14 ? 10.0 / hs : 10.0;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<double> overlaps;
  /// Every store_every-th sample (including the first), paired with its sample index.
  std::vector<std::pair<std::size_t, DensityMatrix>> stored_states;
};

struct EvolveOptions {
  std::size_t store_every = 10;
  bool store_states = true;
};

/// Samples at 0, h, 2h, ..., t_end (the last step is shortened to land on t_end).
inline Trajectory evolve(const SystemModel& model, const PureState& psi0, double t_end, double h,
                         EvolveOptions options = {}) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("evolve: t_end must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("evolve: step must be positive");
  detail::require_state_matches(model, psi0);
  if (options.store_every == 0) options.store_every = 1;

  const LindbladGenerator gen(model);
  const ComplexMatrix rho0 = psi0.projector();
  const auto n_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / h - 1e-9)));

  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.overlaps.reserve(n_steps + 1);
  ComplexMatrix rho = rho0;
  traj.times.push_back(0.0);
  traj.overlaps.push_back(overlap(rho0, rho));
  if (options.store_states) traj.stored_states.emplace_back(0, DensityMatrix(rho));

  for (std::size_t i = 1; i <= n_steps; ++i) {
    const double t = (i == n_steps) ? t_end : static_cast<double>(i) * h;
    gen.advance(rho, t - traj.times.back());
    traj.times.push_back(t);
    traj.overlaps.push_back(overlap(rho0, rho));
    if (options.store_states && (i % options.store_every == 0 || i == n_steps)) {
      traj.stored_states.emplace_back(i, DensityMatrix(rho));
    }
  }
  return traj;
}

struct EscapeResult {
  bool escaped = false;
  /// First time cos Theta_t reaches 1 - lambda^2; meaningful only when escaped.
  double time = 0.0;
  double lambda = 0.0;
  double t_max = 0.0;
  /// Overlap at `time` (equals 1 - lambda^2 up to the bisection tolerance).
  double overlap_at_time = 1.0;
};

/// First exit time from the robustness region of radius lambda.
///
/// Steps with RK4 until a sample falls to or below 1 - lambda^2, then bisects
/// the crossing by re-integrating single steps from the last state inside the
/// region. Later re-entries are ignored.
inline EscapeResult escape_time(const SystemModel& model, const PureState& psi0, double lambda, double t_max,
                                double h) {
  detail::require_lambda(lambda);
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("escape_time: t_max must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("escape_time: step must be positive");
  detail::require_state_matches(model, psi0);

  constexpr double kOverlapTolerance = 1e-10;
  const double target = 1.0 - lambda * lambda;
  const LindbladGenerator gen(model);
  const ComplexMatrix rho0 = psi0.projector();

  EscapeResult result;
  result.lambda = lambda;
  result.t_max = t_max;

  ComplexMatrix rho = rho0;
  double t = 0.0;
  std::size_t i = 0;
  while (t < t_max) {
    ++i;
    const double t_next = std::min(static_cast<double>(i) * h, t_max);
    const double step = t_next - t;
    ComplexMatrix next = rho;
    gen.advance(next, step);
    const double o = overlap(rho0, next);
    if (o <= target) {
      double lo = 0.0;
      double hi = step;
      double o_hi = o;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + t); ++it) {
        const double mid = 0.5 * (lo + hi);
        ComplexMatrix trial = rho;
        gen.advance(trial, mid);
        const double om = overlap(rho0, trial);
        if (om <= target) {
          hi = mid;
          o_hi = om;
        } else {
          lo = mid;
        }
        if (std::abs(o_hi - target) < kOverlapTolerance && hi - lo < 1e-12 * (1.0 + t)) break;
      }
      result.escaped = true;
      result.time = t + hi;
      result.overlap_at_time = o_hi;
      return result;
    }
    rho = std::move(next);
    t = t_next;
  }
  return result;
}

inline EscapeResult escape_time(const SystemModel& model, const PureState& psi0, double lambda) {
  return escape_time(model, psi0, lambda, default_t_max(model), default_step(model));
}

}  // namespace qslkit
