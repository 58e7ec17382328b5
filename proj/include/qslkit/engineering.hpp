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
 * @file engineering.hpp
 * @brief Hamiltonian design that maximizes T* for a fixed initial state.
 *
 * Maximizing T* over H at fixed channels is the same as minimizing A, and
 * A^2 / 4 = F(H) + Tr[(D^dagger rho0)^2] / 2 with the convex quadratic cost
 *
 *   F(H) = Tr(H^2 rho0) - Tr(H rho0 H rho0) + Tr(i[rho0, D^dagger rho0] H).
 *
 * Its minimizers solve the linear stationarity equation
 *
 *   H rho0 + rho0 H - 2 rho0 H rho0 + i[rho0, D^dagger rho0] = 0,
 *
 * where D^dagger rho0 is summed over all channels. H is expanded over the
 * traceless generalized Gell-Mann basis; the identity direction is dropped
 * because it never affects the dynamics.
 */
#pragma once

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qslkit/errors.hpp"
#include "qslkit/operators.hpp"

namespace qslkit {

class EngineeringProblem {
 public:
  EngineeringProblem(PureState psi0, std::vector<ComplexMatrix> channels)
      : EngineeringProblem(psi0, std::move(channels), hermitian_basis(psi0.dim())) {}

  EngineeringProblem(PureState psi0, std::vector<ComplexMatrix> channels, std::vector<ComplexMatrix> basis)
      : psi0_(std::move(psi0)), channels_(std::move(channels)), basis_(std::move(basis)) {
    const Eigen::Index d = psi0_.dim();
    if (d < 2) throw DimensionError("EngineeringProblem: dimension must be at least 2");
    for (const auto& m : channels_) {
      if (m.rows() != d || m.cols() != d) throw DimensionError("EngineeringProblem: channel dimension mismatch");
    }
    if (basis_.empty()) throw DimensionError("EngineeringProblem: empty basis");
    for (const auto& b : basis_) {
      if (b.rows() != d || b.cols() != d) throw DimensionError("EngineeringProblem: basis dimension mismatch");
      if (!is_hermitian(b, 1e-12)) throw DomainError("EngineeringProblem: basis element is not Hermitian");
    }
  }

  const PureState& psi0() const noexcept { return psi0_; }
  const std::vector<ComplexMatrix>& channels() const noexcept { return channels_; }
  const std::vector<ComplexMatrix>& basis() const noexcept { return basis_; }
  Eigen::Index dim() const noexcept { return psi0_.dim(); }

  /// Absolute residual tolerance: 1e-9 * (1 + sum ||M_j||_2^2).
  double residual_tolerance() const {
    double s = 1.0;
    for (const auto& m : channels_) {
      const double n = spectral_norm(m);
      s += n * n;
    }
    return 1e-9 * s;
  }

 private:
  PureState psi0_;
  std::vector<ComplexMatrix> channels_;
  std::vector<ComplexMatrix> basis_;
};

struct EngineeringSolution {
  Eigen::VectorXd u;
  ComplexMatrix h_opt;
  /// Coefficient directions that leave the cost unchanged (they commute with rho0).
  std::vector<Eigen::VectorXd> nullspace;
  double residual_norm = 0.0;
  double cost_value = 0.0;
  int iterations = 0;
};

namespace detail {

inline void require_engineering_dims(const ComplexMatrix& h, const PureState& psi0,
                                     const std::vector<ComplexMatrix>& channels) {
  const Eigen::Index d = psi0.dim();
  if (h.rows() != d || h.cols() != d) throw DimensionError("hamiltonian dimension does not match the state");
  for (const auto& m : channels) {
    if (m.rows() != d || m.cols() != d) throw DimensionError("channel dimension does not match the state");
  }
}

inline ComplexMatrix summed_adjoint_dissipator(const ComplexMatrix& rho0, const std::vector<ComplexMatrix>& channels) {
  ComplexMatrix out = ComplexMatrix::Zero(rho0.rows(), rho0.cols());
  for (const auto& m : channels) out += adjoint_dissipator(m, rho0);
  return out;
}

// H rho0 + rho0 H - 2 rho0 H rho0: the part of the residual linear in H.
inline ComplexMatrix stationarity_linear_part(const ComplexMatrix& h, const ComplexMatrix& rho0) {
  return h * rho0 + rho0 * h - 2.0 * rho0 * h * rho0;
}

// Stacks real and imaginary parts of a d x d matrix into a 2 d^2 real vector.
inline Eigen::VectorXd realify(const ComplexMatrix& x) {
  Eigen::VectorXd v(2 * x.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      v[k] = x(i, j).real();
      v[k + x.size()] = x(i, j).imag();
      ++k;
    }
  }
  return v;
}

// Fixes the sign of a direction so its largest component is positive.
inline void canonical_sign(Eigen::VectorXd& v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0.0) v = -v;
}

}  // namespace detail

/// G = i[rho0, sum_j D^dagger[M_j] rho0].
inline ComplexMatrix drift_term(const PureState& psi0, const std::vector<ComplexMatrix>& channels) {
  const ComplexMatrix rho0 = psi0.projector();
  for (const auto& m : channels) {
    if (m.rows() != rho0.rows() || m.cols() != rho0.cols()) {
      throw DimensionError("drift_term: channel dimension does not match the state");
    }
  }
  return kI * commutator(rho0, detail::summed_adjoint_dissipator(rho0, channels));
}

/// F(H) = Tr(H^2 rho0) - Tr(H rho0 H rho0) + Tr(G H).
inline double cost(const ComplexMatrix& h, const PureState& psi0, const std::vector<ComplexMatrix>& channels) {
  detail::require_engineering_dims(h, psi0, channels);
  const ComplexMatrix rho0 = psi0.projector();
  const ComplexMatrix g = drift_term(psi0, channels);
  const ComplexMatrix hr = h * rho0;
  return ((h * hr).trace() - (hr * hr).trace() + (g * h).trace()).real();
}

/// dF/dH = (H rho0 + rho0 H)^T - 2 (rho0 H rho0)^T + i([rho0, D^dagger rho0])^T.
///
/// Entry (a, b) is the derivative with respect to H_ab treating the entries as
/// independent, so dF along a direction B is sum_ab (dF/dH)_ab B_ab.
inline ComplexMatrix cost_gradient(const ComplexMatrix& h, const PureState& psi0,
                                   const std::vector<ComplexMatrix>& channels) {
  detail::require_engineering_dims(h, psi0, channels);
  const ComplexMatrix rho0 = psi0.projector();
  const ComplexMatrix d = detail::summed_adjoint_dissipator(rho0, channels);
  return (h * rho0 + rho0 * h).transpose() - 2.0 * (rho0 * h * rho0).transpose() +
         (kI * commutator(rho0, d)).transpose();
}

/// Left-hand side of the stationarity equation.
inline ComplexMatrix stationarity_residual(const ComplexMatrix& h, const PureState& psi0,
                                           const std::vector<ComplexMatrix>& channels) {
  detail::require_engineering_dims(h, psi0, channels);
  return detail::stationarity_linear_part(h, psi0.projector()) + drift_term(psi0, channels);
}

/// Minimum-norm solution of the stationarity equation by SVD pseudo-inverse.
inline EngineeringSolution solve_optimal(const EngineeringProblem& problem) {
  constexpr double kRelativeCutoff = 1e-10;
  const ComplexMatrix rho0 = problem.psi0().projector();
  const ComplexMatrix g = drift_term(problem.psi0(), problem.channels());
  const auto& basis = problem.basis();
  const auto n = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index d = problem.dim();

  Eigen::MatrixXd lin(2 * d * d, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    lin.col(i) = detail::realify(detail::stationarity_linear_part(basis[static_cast<std::size_t>(i)], rho0));
  }
  const Eigen::VectorXd rhs = -detail::realify(g);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lin, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = kRelativeCutoff * (sv.size() > 0 ? sv[0] : 0.0);

  EngineeringSolution sol;
  sol.u = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd projected = svd.matrixU().transpose() * rhs;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k < sv.size() && sv[k] > cutoff) {
      sol.u += (projected[k] / sv[k]) * svd.matrixV().col(k);
    } else {
      Eigen::VectorXd v = svd.matrixV().col(k);
      detail::canonical_sign(v);
      sol.nullspace.push_back(std::move(v));
    }
  }
  sol.h_opt = combine(basis, sol.u);
  sol.residual_norm = frobenius_norm(stationarity_residual(sol.h_opt, problem.psi0(), problem.channels()));
  sol.cost_value = cost(sol.h_opt, problem.psi0(), problem.channels());
  if (sol.cost_value > problem.residual_tolerance()) {
    // cost(0) = 0, and the minimizer can never do worse.
    throw NumericError("solve_optimal: solution has positive cost " + std::to_string(sol.cost_value));
  }
  return sol;
}

/// Gradient of F with respect to the basis coefficients.
inline Eigen::VectorXd coefficient_gradient(const EngineeringProblem& problem, const ComplexMatrix& h) {
  const ComplexMatrix grad = cost_gradient(h, problem.psi0(), problem.channels());
  const auto& basis = problem.basis();
  Eigen::VectorXd out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = (grad.array() * basis[i].array()).sum().real();
  }
  return out;
}

/// Gradient descent from u = 0 with Armijo backtracking. An independent check
/// on solve_optimal: the costs agree even where the minimizers differ along
/// the nullspace.
inline EngineeringSolution brute_force_minimize(const EngineeringProblem& problem, int iterations = 10000,
                                                double step = 1.0) {
  if (iterations < 1) throw DomainError("brute_force_minimize: iterations must be at least 1");
  if (!(step > 0.0)) throw DomainError("brute_force_minimize: step must be positive");
  const auto& basis = problem.basis();
  const auto n = static_cast<Eigen::Index>(basis.size());

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  ComplexMatrix h = combine(basis, u);
  double f = cost(h, problem.psi0(), problem.channels());
  Eigen::VectorXd grad = coefficient_gradient(problem, h);
  const double scale = 1.0 + grad.norm();
  const double gtol = 1e-13 * scale;

  EngineeringSolution sol;
  bool converged = grad.norm() <= gtol;
  int it = 0;
  for (; it < iterations && !converged; ++it) {
    const double g2 = grad.squaredNorm();
    double t = step;
    Eigen::VectorXd trial = u - t * grad;
    ComplexMatrix h_trial = combine(basis, trial);
    double f_trial = cost(h_trial, problem.psi0(), problem.channels());
    while (f_trial > f - 0.5 * t * g2 && t > 1e-20) {
      t *= 0.5;
      trial = u - t * grad;
      h_trial = combine(basis, trial);
      f_trial = cost(h_trial, problem.psi0(), problem.channels());
    }
    if (f_trial > f) break;  // no descent possible at machine precision
    u = std::move(trial);
    h = std::move(h_trial);
    f = f_trial;
    grad = coefficient_gradient(problem, h);
    converged = grad.norm() <= gtol;
  }
  if (!converged && grad.norm() > 1e-9 * scale) {
    throw NumericError("brute_force_minimize: no convergence after " + std::to_string(it) +
                       " iterations (gradient norm " + std::to_string(grad.norm()) + ")");
  }
  sol.u = std::move(u);
  sol.h_opt = std::move(h);
  sol.cost_value = f;
  sol.residual_norm = frobenius_norm(stationarity_residual(sol.h_opt, problem.psi0(), problem.channels()));
  sol.iterations = it;
  return sol;
}

}  // namespace qslkit
