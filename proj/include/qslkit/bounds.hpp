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
 * @file bounds.hpp
 * @brief The explicit speed-limit bound T* for Markovian open systems and the
 * quantities it is built from.
 *
 * For a pure initial state rho0 = |psi0><psi0|, Hamiltonians {H_j} and
 * channels {M_j}:
 *
 *   A = sqrt(2) || sum_j i[H_j, rho0] + sum_j D^dagger[M_j] rho0 ||_F
 *   E = sum_j ( ||M_j psi0||^2 - |<psi0|M_j|psi0>|^2 )
 *   T* = 2 lambda / A + (2 E / A^2) ln(E / (E + A lambda))
 *   T_DC = sqrt(2) lambda^2 / A
 *
 * with lambda = sqrt(1 - cos Theta_T) the radius of the robustness region.
 * Robustness of a state is ranked by T*: larger means more robust.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qslkit/operators.hpp"

namespace qslkit {

/// Generators of the master equation d rho/dt = sum_j -i[H_j, rho] + sum_j D[M_j] rho.
class SystemModel {
 public:
  static constexpr double kHermitianTolerance = 1e-10;

  SystemModel(Eigen::Index dim, std::vector<ComplexMatrix> hamiltonians, std::vector<ComplexMatrix> channels)
      : dim_(dim), hamiltonians_(std::move(hamiltonians)), channels_(std::move(channels)) {
    detail::require_dimension(dim_, "SystemModel");
    for (std::size_t j = 0; j < hamiltonians_.size(); ++j) {
      check_shape(hamiltonians_[j], "hamiltonian", j);
      if (hermiticity_defect(hamiltonians_[j]) > kHermitianTolerance) {
        throw DomainError("SystemModel: hamiltonian " + std::to_string(j) + " is not Hermitian");
      }
    }
    for (std::size_t j = 0; j < channels_.size(); ++j) check_shape(channels_[j], "channel", j);
  }

  Eigen::Index dim() const noexcept { return dim_; }
  const std::vector<ComplexMatrix>& hamiltonians() const noexcept { return hamiltonians_; }
  const std::vector<ComplexMatrix>& channels() const noexcept { return channels_; }

  /// sum_j ||H_j||_2 + sum_j ||M_j||_2^2, a rate scale for tolerances and step sizes.
  double spectral_scale() const {
    double s = 0.0;
    for (const auto& h : hamiltonians_) s += spectral_norm(h);
    for (const auto& m : channels_) {
      const double n = spectral_norm(m);
      s += n * n;
    }
    return s;
  }

  /// The same model with every channel multiplied by sqrt(gamma).
  SystemModel with_channel_strength(double gamma) const {
    if (!(gamma >= 0.0)) throw DomainError("with_channel_strength: gamma must be nonnegative");
    std::vector<ComplexMatrix> scaled = channels_;
    for (auto& m : scaled) m *= std::sqrt(gamma);
    return SystemModel(dim_, hamiltonians_, std::move(scaled));
  }

  SystemModel with_hamiltonians(std::vector<ComplexMatrix> hamiltonians) const {
    return SystemModel(dim_, std::move(hamiltonians), channels_);
  }

 private:
  void check_shape(const ComplexMatrix& m, const char* kind, std::size_t j) const {
    if (m.rows() != dim_ || m.cols() != dim_) {
      throw DimensionError(std::string("SystemModel: ") + kind + " " + std::to_string(j) + " is " +
                           std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected dimension " +
                           std::to_string(dim_));
    }
    if (!m.allFinite()) throw DomainError(std::string("SystemModel: ") + kind + " has non-finite entries");
  }

  Eigen::Index dim_;
  std::vector<ComplexMatrix> hamiltonians_;
  std::vector<ComplexMatrix> channels_;
};

/// A nonnegative real or +infinity. Infinity is a flag, never a floating sentinel.
class ExtendedReal {
 public:
  static ExtendedReal infinity() { return ExtendedReal(true, 0.0); }
  static ExtendedReal finite(double v) {
    if (!std::isfinite(v)) throw NumericError("ExtendedReal: finite value expected");
    return ExtendedReal(false, v);
  }

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }

  double value() const {
    if (infinite_) throw DomainError("ExtendedReal: value() on infinity");
    return value_;
  }

  /// Numeric view for plotting; +inf for the infinite case.
  double as_double() const noexcept { return infinite_ ? std::numeric_limits<double>::infinity() : value_; }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator>(const ExtendedReal& a, const ExtendedReal& b) noexcept { return b < a; }
  friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b) noexcept { return !(b < a); }
  friend bool operator>=(const ExtendedReal& a, const ExtendedReal& b) noexcept { return !(a < b); }

 private:
  ExtendedReal(bool inf, double v) : infinite_(inf), value_(v) {}
  bool infinite_;
  double value_;
};

/// Thresholds below which A counts as zero (stationary) and E as zero (closed).
struct BoundTolerances {
  double amplitude = 1e-12;
  double excess = 1e-12;

  static BoundTolerances for_model(const SystemModel& model) {
    const double t = 1e-12 * (1.0 + model.spectral_scale());
    return {t, t};
  }
};

/// Largest admissible k = E / A.
inline const double kMaxExcessRatio = 1.0 / std::sqrt(2.0);

namespace detail {

inline void require_state_matches(const SystemModel& model, const PureState& psi0) {
  if (psi0.dim() != model.dim()) {
    throw DimensionError("state dimension " + std::to_string(psi0.dim()) + " does not match model dimension " +
                         std::to_string(model.dim()));
  }
}

inline void require_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw DomainError("lambda must lie in (0, 1], got " + std::to_string(lambda));
  }
}

// g(x) = 1 - ln(1 + x) / x, with g(inf) = 1. Both T* and T*/T_DC are
// (positive prefactor) * g(x); the series branch avoids cancellation.
inline double log_gap(double x) {
  if (std::isinf(x)) return 1.0;
  if (x < 1e-3) {
    return x * (0.5 - x * (1.0 / 3.0 - x * (0.25 - x * (0.2 - x / 6.0))));
  }
  return 1.0 - std::log1p(x) / x;
}

}  // namespace detail

/// sum_j i[H_j, rho0] + sum_j D^dagger[M_j] rho0, assembled from rank-one terms.
inline ComplexMatrix effective_generator(const SystemModel& model, const PureState& psi0) {
  detail::require_state_matches(model, psi0);
  const ComplexVector& psi = psi0.amplitudes();
  const Eigen::Index d = model.dim();
  ComplexMatrix x = ComplexMatrix::Zero(d, d);
  if (!model.hamiltonians().empty()) {
    ComplexVector h = ComplexVector::Zero(d);
    for (const auto& hj : model.hamiltonians()) h.noalias() += hj * psi;
    x.noalias() += kI * (h * psi.adjoint() - psi * h.adjoint());
  }
  if (!model.channels().empty()) {
    ComplexVector b = ComplexVector::Zero(d);
    for (const auto& m : model.channels()) {
      const ComplexVector a = m.adjoint() * psi;
      x.noalias() += a * a.adjoint();
      b.noalias() += m.adjoint() * (m * psi);
    }
    x.noalias() -= 0.5 * (b * psi.adjoint() + psi * b.adjoint());
  }
  return x;
}

/// A = sqrt(2) || sum_j i[H_j, rho0] + sum_j D^dagger[M_j] rho0 ||_F.
inline double amplitude(const SystemModel& model, const PureState& psi0) {
  return std::sqrt(2.0) * frobenius_norm(effective_generator(model, psi0));
}

/// E = sum_j (||M_j psi0||^2 - |<psi0|M_j|psi0>|^2), clamped at zero.
inline double excess(const SystemModel& model, const PureState& psi0) {
  detail::require_state_matches(model, psi0);
  const ComplexVector& psi = psi0.amplitudes();
  double e = 0.0;
  for (const auto& m : model.channels()) {
    const ComplexVector mpsi = m * psi;
    e += mpsi.squaredNorm() - std::norm(psi.dot(mpsi));
  }
  return std::max(e, 0.0);
}

inline double lambda_from_theta(double theta) {
  if (!(theta > 0.0 && theta <= std::numbers::pi / 2.0)) {
    throw DomainError("theta must lie in (0, pi/2], got " + std::to_string(theta));
  }
  return std::sqrt(1.0 - std::cos(theta));
}

inline double theta_from_lambda(double lambda) {
  detail::require_lambda(lambda);
  return std::acos(1.0 - lambda * lambda);
}

/// T*(A, E, lambda). Infinite when A is below tolerance; the closed-system
/// limit 2 lambda / A when E is below tolerance.
inline ExtendedReal t_star(double amp, double exc, double lambda, BoundTolerances tol = {}) {
  if (!(amp >= 0.0) || !(exc >= 0.0)) throw DomainError("t_star: amplitude and excess must be nonnegative");
  detail::require_lambda(lambda);
  if (amp < tol.amplitude) return ExtendedReal::infinity();
  const double closed = 2.0 * lambda / amp;
  if (exc < tol.excess) return ExtendedReal::finite(closed);
  return ExtendedReal::finite(closed * detail::log_gap(amp * lambda / exc));
}

/// T_DC = sqrt(2) lambda^2 / A, infinite for A below tolerance.
inline ExtendedReal t_dc(double amp, double lambda, BoundTolerances tol = {}) {
  if (!(amp >= 0.0)) throw DomainError("t_dc: amplitude must be nonnegative");
  detail::require_lambda(lambda);
  if (amp < tol.amplitude) return ExtendedReal::infinity();
  return ExtendedReal::finite(std::sqrt(2.0) * lambda * lambda / amp);
}

/// T*/T_DC as a function of k = E/A and lambda.
inline double bound_ratio(double k, double lambda) {
  if (!(k >= 0.0 && k <= kMaxExcessRatio * (1.0 + 1e-9))) {
    throw DomainError("bound_ratio: k must lie in [0, 1/sqrt(2)], got " + std::to_string(k));
  }
  detail::require_lambda(lambda);
  const double prefactor = std::sqrt(2.0) / lambda;
  if (k == 0.0) return prefactor;
  return prefactor * detail::log_gap(lambda / k);
}

struct QslReport {
  double theta_T = 0.0;
  double lambda = 0.0;
  double amplitude = 0.0;
  double excess = 0.0;
  /// E / A; zero for stationary states.
  double k = 0.0;
  ExtendedReal t_star = ExtendedReal::infinity();
  ExtendedReal t_dc = ExtendedReal::infinity();
  /// T*/T_DC; empty when both bounds are infinite.
  std::optional<double> ratio;
  bool closed_system = false;
  bool stationary = false;
};

inline QslReport qsl_report(const SystemModel& model, const PureState& psi0, double lambda) {
  detail::require_lambda(lambda);
  const BoundTolerances tol = BoundTolerances::for_model(model);
  QslReport r;
  r.lambda = lambda;
  r.theta_T = theta_from_lambda(lambda);
  r.amplitude = amplitude(model, psi0);
  r.excess = excess(model, psi0);
  r.stationary = r.amplitude < tol.amplitude;
  r.closed_system = r.excess < tol.excess;
  r.t_star = t_star(r.amplitude, r.excess, lambda, tol);
  r.t_dc = t_dc(r.amplitude, lambda, tol);
  if (!r.stationary) {
    // A >= sqrt(2) E holds exactly; rounding can overshoot the bound by an ulp.
    r.k = r.closed_system ? 0.0 : std::min(r.excess / r.amplitude, kMaxExcessRatio);
    r.ratio = bound_ratio(r.k, lambda);
  }
  return r;
}

struct RankEntry {
  std::size_t index;
  ExtendedReal t_star;
};

namespace detail {

// Values agreeing to ~12 significant digits share a key, so mathematically
// tied states (e.g. Phi+ and Phi-) stay in input order.
inline double rank_key(double v) {
  if (v == 0.0) return 0.0;
  int exp = 0;
  const double mant = std::frexp(v, &exp);
  return std::ldexp(std::round(std::ldexp(mant, 40)), exp - 40);
}

}  // namespace detail

/// States ordered from most to least robust (descending T*, infinite first, stable).
inline std::vector<RankEntry> rank_states(const SystemModel& model, const std::vector<PureState>& states,
                                          double lambda) {
  if (states.empty()) throw DomainError("rank_states: no states given");
  detail::require_lambda(lambda);
  const BoundTolerances tol = BoundTolerances::for_model(model);
  std::vector<RankEntry> out;
  out.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != states.front().dim()) throw DimensionError("rank_states: states differ in dimension");
    out.push_back({i, t_star(amplitude(model, states[i]), excess(model, states[i]), lambda, tol)});
  }
  std::stable_sort(out.begin(), out.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.t_star.is_infinite() || b.t_star.is_infinite()) return a.t_star.is_infinite() && b.t_star.is_finite();
    return detail::rank_key(a.t_star.value()) > detail::rank_key(b.t_star.value());
  });
  return out;
}

struct GammaPoint {
  double gamma;
  ExtendedReal t_star;
};

/// T* along gamma for channels M_j = sqrt(gamma) M'_j, where the template holds M'_j.
inline std::vector<GammaPoint> gamma_sweep(const SystemModel& model_template, const PureState& psi0, double lambda,
                                           const std::vector<double>& gamma_grid) {
  if (gamma_grid.empty()) throw DomainError("gamma_sweep: empty gamma grid");
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
    if (!(gamma_grid[i] > 0.0) || (i > 0 && !(gamma_grid[i] > gamma_grid[i - 1]))) {
      throw DomainError("gamma_sweep: grid must be positive and strictly ascending");
    }
  }
  std::vector<GammaPoint> out;
  out.reserve(gamma_grid.size());
  for (double g : gamma_grid) {
    const SystemModel m = model_template.with_channel_strength(g);
    const BoundTolerances tol = BoundTolerances::for_model(m);
    out.push_back({g, t_star(amplitude(m, psi0), excess(m, psi0), lambda, tol)});
  }
  return out;
}

}  // namespace qslkit
