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
 * @file operators.hpp
 * @brief Dense complex matrices and the operator vocabulary used by every
 * other part of qslkit: Lindblad dissipators and their adjoints, the relative
 * purity angle, Pauli/ladder/Gell-Mann constructors and Hermitian bases.
 *
 * Conventions: |0> = [1, 0]^T is the excited level and |1> = [0, 1]^T the
 * ground level, so sigma_- = |1><0|. In tensor products the first factor is
 * the most significant index.
 */
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qslkit/errors.hpp"

namespace qslkit {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

inline constexpr cplx kI{0.0, 1.0};

/// Largest Hilbert-space dimension any constructor or parser will allocate.
inline constexpr Eigen::Index kMaxDimension = 4096;
/// Largest qubit count accepted by the collective-operator constructors.
inline constexpr int kMaxQubits = 12;

namespace detail {

inline void require_same_square(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionError(std::string(what) + ": operands must be square with equal dimension (got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
}

inline void require_dimension(Eigen::Index d, const char* what) {
  if (d < 1 || d > kMaxDimension) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(d) + " outside [1, " +
                      std::to_string(kMaxDimension) + "]");
  }
}

}  // namespace detail

inline bool all_finite(const ComplexMatrix& x) {
  return x.allFinite();
}

/// sqrt(Tr(X^dagger X)).
inline double frobenius_norm(const ComplexMatrix& x) {
  return x.norm();
}

/// Largest entrywise modulus of X - X^dagger.
inline double hermiticity_defect(const ComplexMatrix& x) {
  if (x.rows() != x.cols()) return std::numeric_limits<double>::infinity();
  return (x - x.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& x, double tol = 1e-10) {
  return x.rows() == x.cols() && hermiticity_defect(x) <= tol;
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require_same_square(a, b, "commutator");
  return a * b - b * a;
}

/// D[M]rho = M rho M^dagger - M^dagger M rho / 2 - rho M^dagger M / 2.
inline ComplexMatrix dissipator(const ComplexMatrix& m, const ComplexMatrix& rho) {
  detail::require_same_square(m, rho, "dissipator");
  const ComplexMatrix mdm = m.adjoint() * m;
  return m * rho * m.adjoint() - 0.5 * (mdm * rho + rho * mdm);
}

/// D^dagger[M]rho = M^dagger rho M - M^dagger M rho / 2 - rho M^dagger M / 2.
inline ComplexMatrix adjoint_dissipator(const ComplexMatrix& m, const ComplexMatrix& rho) {
  detail::require_same_square(m, rho, "adjoint_dissipator");
  const ComplexMatrix mdm = m.adjoint() * m;
  return m.adjoint() * rho * m - 0.5 * (mdm * rho + rho * mdm);
}

/// Spectral norm estimated by power iteration on A^dagger A.
inline double spectral_norm(const ComplexMatrix& a, int max_iterations = 500, double rel_tol = 1e-12) {
  if (a.size() == 0) return 0.0;
  ComplexVector v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = cplx(1.0 / static_cast<double>(i + 1), 0.5 / static_cast<double>(i + 2));
  }
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    ComplexVector w = a.adjoint() * (a * v);
    const double n = w.norm();
    if (n == 0.0) {
      // The start vector can sit in the kernel; fall back to an exact answer.
      Eigen::JacobiSVD<ComplexMatrix> svd(a);
      return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    }
    v = w / n;
    if (std::abs(n - estimate) <= rel_tol * n) {
      estimate = n;
      break;
    }
    estimate = n;
  }
  return std::sqrt(estimate);
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// A normalized state vector |psi>.
class PureState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Takes amplitudes that are already unit-norm within kNormTolerance.
  explicit PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() < 1) throw DimensionError("PureState: empty amplitude vector");
    if (!amplitudes_.allFinite()) throw DomainError("PureState: non-finite amplitude");
    const double n = amplitudes_.norm();
    if (std::abs(n - 1.0) > kNormTolerance) {
      throw DomainError("PureState: amplitudes have norm " + std::to_string(n) + ", expected 1");
    }
  }

  /// Rescales arbitrary nonzero amplitudes to unit norm.
  static PureState normalized(ComplexVector amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("PureState: cannot normalize a zero vector");
    amplitudes /= n;
    return PureState(std::move(amplitudes));
  }

  static PureState basis(Eigen::Index index, Eigen::Index dim) {
    detail::require_dimension(dim, "PureState::basis");
    if (index < 0 || index >= dim) throw DomainError("PureState::basis: index out of range");
    ComplexVector v = ComplexVector::Zero(dim);
    v[index] = 1.0;
    return PureState(std::move(v));
  }

  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }

  /// |psi><psi| as a plain matrix.
  ComplexMatrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  ComplexVector amplitudes_;
};

/// A validated density matrix: Hermitian, unit trace, positive up to slack.
class DensityMatrix {
 public:
  static constexpr double kHermitianTolerance = 1e-10;
  static constexpr double kTraceTolerance = 1e-10;
  static constexpr double kEigenvalueFloor = -1e-8;

  explicit DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() < 1 || matrix_.rows() != matrix_.cols()) {
      throw DimensionError("DensityMatrix: matrix must be square and nonempty");
    }
    if (!matrix_.allFinite()) throw NumericError("DensityMatrix: non-finite entry");
    if (hermiticity_defect(matrix_) > kHermitianTolerance) {
      throw DomainError("DensityMatrix: matrix is not Hermitian");
    }
    if (std::abs(matrix_.trace() - 1.0) > kTraceTolerance) {
      throw DomainError("DensityMatrix: trace differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kEigenvalueFloor) {
      throw DomainError("DensityMatrix: negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
    }
  }

  explicit DensityMatrix(const PureState& psi) : matrix_(psi.projector()) {}

  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

/// Tr(rho0 rho_t) clamped to [0, 1].
inline double overlap(const ComplexMatrix& rho0, const ComplexMatrix& rhot) {
  detail::require_same_square(rho0, rhot, "overlap");
  // Tr(AB) = sum_ij A_ij B_ji
  const cplx tr = (rho0.array() * rhot.transpose().array()).sum();
  return std::clamp(tr.real(), 0.0, 1.0);
}

/// Theta_t = arccos Tr(rho0 rho_t), in [0, pi/2].
inline double relative_purity_angle(const DensityMatrix& rho0, const DensityMatrix& rhot) {
  return std::acos(overlap(rho0.matrix(), rhot.matrix()));
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

enum class PauliAxis { X, Y, Z };
enum class LadderKind { Plus, Minus };

inline ComplexMatrix identity(Eigen::Index d) {
  detail::require_dimension(d, "identity");
  return ComplexMatrix::Identity(d, d);
}

inline ComplexMatrix pauli(PauliAxis axis) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (axis) {
    case PauliAxis::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case PauliAxis::Y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case PauliAxis::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

/// sigma_+ = |0><1| raises to the excited level, sigma_- = |1><0| lowers.
inline ComplexMatrix ladder(LadderKind kind) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  if (kind == LadderKind::Plus) {
    m(0, 1) = 1.0;
  } else {
    m(1, 0) = 1.0;
  }
  return m;
}

/// |i><j| in dimension d.
inline ComplexMatrix projector(Eigen::Index i, Eigen::Index j, Eigen::Index d) {
  detail::require_dimension(d, "projector");
  if (i < 0 || i >= d || j < 0 || j >= d) {
    throw DomainError("projector: index out of range for dimension " + std::to_string(d));
  }
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

/// Kronecker product A (x) B.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > kMaxDimension || cols > kMaxDimension) {
    throw DomainError("tensor: result dimension exceeds " + std::to_string(kMaxDimension));
  }
  ComplexMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace detail {

inline Eigen::Index qubit_space_dim(int n_qubits, const char* what) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw DomainError(std::string(what) + ": qubit count " + std::to_string(n_qubits) + " outside [1, " +
                      std::to_string(kMaxQubits) + "]");
  }
  return Eigen::Index{1} << n_qubits;
}

}  // namespace detail

/// sum_j sigma_-^(j) on N qubits, built directly in the 2^N basis.
inline ComplexMatrix collective_lowering(int n_qubits) {
  const Eigen::Index d = detail::qubit_space_dim(n_qubits, "collective_lowering");
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    for (int q = 0; q < n_qubits; ++q) {
      const Eigen::Index mask = Eigen::Index{1} << (n_qubits - 1 - q);
      if ((b & mask) == 0) m(b | mask, b) += 1.0;
    }
  }
  return m;
}

/// sum_j sigma_z^(j) on N qubits (diagonal).
inline ComplexMatrix collective_dephasing(int n_qubits) {
  const Eigen::Index d = detail::qubit_space_dim(n_qubits, "collective_dephasing");
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    int excited = 0;
    for (int q = 0; q < n_qubits; ++q) {
      if ((b & (Eigen::Index{1} << q)) == 0) ++excited;
    }
    m(b, b) = static_cast<double>(2 * excited - n_qubits);
  }
  return m;
}

/// Generalized Gell-Mann matrices normalized to Tr(B_i B_j) = 2 delta_ij.
///
/// Ordering: for each level k = 1..d-1, the symmetric and antisymmetric
/// pairs (j, k) for j < k, followed by the diagonal generator of level k.
/// This reproduces the Pauli matrices (x, y, z) for d = 2 and the standard
/// Lambda_1..Lambda_8 for d = 3.
inline std::vector<ComplexMatrix> hermitian_basis(Eigen::Index d) {
  if (d < 2) throw DimensionError("hermitian_basis: dimension must be at least 2");
  detail::require_dimension(d, "hermitian_basis");
  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(d * d - 1));
  for (Eigen::Index k = 1; k < d; ++k) {
    for (Eigen::Index j = 0; j < k; ++j) {
      ComplexMatrix sym = ComplexMatrix::Zero(d, d);
      sym(j, k) = 1.0;
      sym(k, j) = 1.0;
      basis.push_back(std::move(sym));
      ComplexMatrix anti = ComplexMatrix::Zero(d, d);
      anti(j, k) = -kI;
      anti(k, j) = kI;
      basis.push_back(std::move(anti));
    }
    ComplexMatrix diag = ComplexMatrix::Zero(d, d);
    const double kk = static_cast<double>(k);
    const double scale = std::sqrt(2.0 / (kk * (kk + 1.0)));
    for (Eigen::Index j = 0; j < k; ++j) diag(j, j) = scale;
    diag(k, k) = -kk * scale;
    basis.push_back(std::move(diag));
  }
  return basis;
}

/// Lambda_index for index in 1..8.
inline ComplexMatrix gell_mann(int index) {
  if (index < 1 || index > 8) throw DomainError("gell_mann: index must be in 1..8");
  return hermitian_basis(3)[static_cast<std::size_t>(index - 1)];
}

/// sum_i u_i B_i.
inline ComplexMatrix combine(const std::vector<ComplexMatrix>& basis, const Eigen::VectorXd& coefficients) {
  if (basis.empty() || static_cast<Eigen::Index>(basis.size()) != coefficients.size()) {
    throw DimensionError("combine: coefficient count does not match basis size");
  }
  ComplexMatrix out = ComplexMatrix::Zero(basis.front().rows(), basis.front().cols());
  for (std::size_t i = 0; i < basis.size(); ++i) out += coefficients[static_cast<Eigen::Index>(i)] * basis[i];
  return out;
}

}  // namespace qslkit
