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
 * @file scenarios.hpp
 * @brief Named builders for the standard worked examples (two-level atom,
 * Bell pairs, atomic ensembles, qubit/qutrit engineering targets), each with
 * closed-form reference values of A and E where one exists.
 */
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qslkit/bounds.hpp"
#include "qslkit/operators.hpp"

namespace qslkit {

struct ScenarioReference {
  std::optional<double> amplitude;
  std::optional<double> excess;
  /// Exact escape time as a function of lambda, where a closed form exists.
  std::function<double(double)> escape_time;
};

struct Scenario {
  std::string name;
  SystemModel model;
  PureState psi0;
  ScenarioReference reference;
};

namespace detail {

inline void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be a nonnegative number");
}

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be a positive number");
}

inline ComplexVector amplitudes(std::initializer_list<cplx> values) {
  ComplexVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (cplx c : values) v[i++] = c;
  return v;
}

}  // namespace detail

/// H = omega sigma_z, M = sqrt(gamma) sigma_x, psi0 = [cos theta, e^{i phi} sin theta].
inline Scenario two_level_dephasing(double omega, double gamma, double theta, double phi) {
  using std::numbers::pi;
  detail::require_nonnegative(omega, "omega");
  detail::require_nonnegative(gamma, "gamma");
  if (!(theta >= 0.0 && theta < pi / 2.0)) throw DomainError("theta must lie in [0, pi/2)");
  if (!(phi >= 0.0 && phi < 2.0 * pi)) throw DomainError("phi must lie in [0, 2 pi)");

  SystemModel model(2, {omega * pauli(PauliAxis::Z)}, {std::sqrt(gamma) * pauli(PauliAxis::X)});
  PureState psi0 = PureState::normalized(detail::amplitudes({std::cos(theta), std::polar(1.0, phi) * std::sin(theta)}));

  const double s2 = std::pow(std::sin(2.0 * theta), 2);
  const double c2 = std::pow(std::cos(2.0 * theta), 2);
  const double quarter_a2 = gamma * gamma * (c2 + s2 * std::pow(std::sin(phi), 2)) + omega * omega * s2 +
                            omega * gamma * s2 * std::sin(2.0 * phi);
  ScenarioReference ref;
  ref.amplitude = 2.0 * std::sqrt(std::max(quarter_a2, 0.0));
  ref.excess = gamma - gamma * s2 * std::pow(std::cos(phi), 2);
  if (omega == 0.0 && theta == 0.0 && gamma > 0.0) {
    // cos Theta_t = (1 + e^{-2 gamma t}) / 2
    ref.escape_time = [gamma](double lambda) { return -std::log(1.0 - 2.0 * lambda * lambda) / (2.0 * gamma); };
  }
  return {"two-level-dephasing", std::move(model), std::move(psi0), std::move(ref)};
}

/// H = omega sigma_z, M = sqrt(gamma) sigma_-, psi0 = [cos theta, sin theta]
/// (|+> by default).
///
/// Reference values come from evaluating the definitions: for |+>,
/// A = sqrt(64 omega^2 + 4 gamma^2) / 4 and E = gamma / 4; for theta = pi/3,
/// A = sqrt(48 omega^2 + 11 gamma^2) / 4 and E = gamma / 16.
inline Scenario two_level_decay(double omega, double gamma, double theta = std::numbers::pi / 4.0) {
  using std::numbers::pi;
  detail::require_nonnegative(omega, "omega");
  detail::require_nonnegative(gamma, "gamma");
  if (!(theta >= 0.0 && theta < pi / 2.0)) throw DomainError("theta must lie in [0, pi/2)");
  SystemModel model(2, {omega * pauli(PauliAxis::Z)}, {std::sqrt(gamma) * ladder(LadderKind::Minus)});
  PureState psi0 = theta == pi / 4.0 ? PureState::normalized(detail::amplitudes({1.0, 1.0}))
                                     : PureState::normalized(detail::amplitudes({std::cos(theta), std::sin(theta)}));
  ScenarioReference ref;
  if (theta == pi / 4.0) {
    ref.amplitude = std::sqrt(64.0 * omega * omega + 4.0 * gamma * gamma) / 4.0;
    ref.excess = gamma / 4.0;
  } else if (theta == pi / 3.0) {
    ref.amplitude = std::sqrt(48.0 * omega * omega + 11.0 * gamma * gamma) / 4.0;
    ref.excess = gamma / 16.0;
  }
  return {"two-level-decay", std::move(model), std::move(psi0), std::move(ref)};
}

enum class BellState { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline const char* bell_label(BellState s) {
  switch (s) {
    case BellState::PhiPlus: return "phi+";
    case BellState::PhiMinus: return "phi-";
    case BellState::PsiPlus: return "psi+";
    case BellState::PsiMinus: return "psi-";
  }
  return "?";
}

inline PureState bell_state(BellState s) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (s) {
    case BellState::PhiPlus: return PureState(detail::amplitudes({r, 0.0, 0.0, r}));
    case BellState::PhiMinus: return PureState(detail::amplitudes({r, 0.0, 0.0, -r}));
    case BellState::PsiPlus: return PureState(detail::amplitudes({0.0, r, r, 0.0}));
    case BellState::PsiMinus: return PureState(detail::amplitudes({0.0, r, -r, 0.0}));
  }
  throw DomainError("unknown Bell state");
}

/// The four Bell states (phi+, phi-, psi+, psi-) with H = 0 under either the
/// collective channel sqrt(gamma)(sigma_- x I + I x sigma_-) or the two
/// local channels sqrt(gamma) sigma_- x I and sqrt(gamma) I x sigma_-.
///
/// Local references come from evaluating the definitions: A = 2 gamma and
/// E = gamma for every Bell state.
inline std::vector<Scenario> bell_scenarios(double gamma, bool collective) {
  detail::require_positive(gamma, "gamma");
  std::vector<ComplexMatrix> channels;
  const ComplexMatrix sm = ladder(LadderKind::Minus);
  const ComplexMatrix id2 = identity(2);
  if (collective) {
    channels.push_back(std::sqrt(gamma) * collective_lowering(2));
  } else {
    channels.push_back(std::sqrt(gamma) * tensor(sm, id2));
    channels.push_back(std::sqrt(gamma) * tensor(id2, sm));
  }
  const SystemModel model(4, {}, channels);
  const std::string prefix = collective ? "bell-collective/" : "bell-local/";

  std::vector<Scenario> out;
  for (BellState s : {BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus}) {
    ScenarioReference ref;
    if (!collective) {
      ref.amplitude = 2.0 * gamma;
      ref.excess = gamma;
    } else if (s == BellState::PhiPlus || s == BellState::PhiMinus) {
      ref.amplitude = std::sqrt(5.0) * gamma;
      ref.excess = gamma;
    } else if (s == BellState::PsiPlus) {
      ref.amplitude = 4.0 * gamma;
      ref.excess = 2.0 * gamma;
    } else {
      ref.amplitude = 0.0;
      ref.excess = 0.0;
    }
    out.push_back({prefix + bell_label(s), model, bell_state(s), std::move(ref)});
  }
  return out;
}

/// |+>^N and GHZ = (|0...0> + |1...1>)/sqrt(2) under M = sqrt(gamma) sum_j sigma_z^(j), H = 0.
inline std::pair<Scenario, Scenario> ensemble_scenarios(int n_qubits, double gamma) {
  detail::require_positive(gamma, "gamma");
  const Eigen::Index d = detail::qubit_space_dim(n_qubits, "ensemble_scenarios");
  const SystemModel model(d, {}, {std::sqrt(gamma) * collective_dephasing(n_qubits)});
  const double n = n_qubits;

  ComplexVector product = ComplexVector::Constant(d, cplx(1.0 / std::sqrt(static_cast<double>(d)), 0.0));
  ComplexVector ghz = ComplexVector::Zero(d);
  ghz[0] = 1.0 / std::sqrt(2.0);
  ghz[d - 1] = 1.0 / std::sqrt(2.0);

  ScenarioReference product_ref;
  product_ref.amplitude = gamma * std::sqrt(6.0 * n * n - 2.0 * n);
  product_ref.excess = gamma * n;
  ScenarioReference ghz_ref;
  ghz_ref.amplitude = 2.0 * gamma * n * n;
  ghz_ref.excess = gamma * n * n;

  return {Scenario{"ensemble/product", model, PureState::normalized(std::move(product)), std::move(product_ref)},
          Scenario{"ensemble/ghz", model, PureState::normalized(std::move(ghz)), std::move(ghz_ref)}};
}

/// psi0 = [1/2, 1/sqrt(2), 1/2] under the ladder decay |E> -> |S> -> |G>, H = 0.
inline Scenario qutrit_ladder(double gamma) {
  detail::require_positive(gamma, "gamma");
  const ComplexMatrix m = std::sqrt(gamma) * (projector(1, 0, 3) + projector(2, 1, 3));
  ScenarioReference ref;
  ref.amplitude = std::sqrt(7.0) * gamma / 4.0;
  ref.excess = gamma / 4.0;
  return {"qutrit-ladder", SystemModel(3, {}, {m}),
          PureState(detail::amplitudes({0.5, 1.0 / std::sqrt(2.0), 0.5})), std::move(ref)};
}

/// S_z = |E><E| - |G><G|, the comparison Hamiltonian for the qutrit ladder.
inline ComplexMatrix qutrit_sz() {
  return projector(0, 0, 3) - projector(2, 2, 3);
}

/// psi0 = [1/2, sqrt(3)/2] under M = sqrt(gamma) sigma_-, H = 0.
inline Scenario qubit_engineering(double gamma) {
  detail::require_positive(gamma, "gamma");
  ScenarioReference ref;
  ref.amplitude = std::sqrt(11.0) * gamma / 4.0;
  ref.excess = gamma / 16.0;
  return {"qubit-engineering", SystemModel(2, {}, {std::sqrt(gamma) * ladder(LadderKind::Minus)}),
          PureState(detail::amplitudes({0.5, std::sqrt(3.0) / 2.0})), std::move(ref)};
}

}  // namespace qslkit
