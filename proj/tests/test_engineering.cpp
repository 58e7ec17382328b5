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


#include <cmath>
#include <numbers>

#include "test_support.hpp"

namespace qslkit {
namespace {

using std::numbers::sqrt2;
using std::numbers::sqrt3;
using testing::matrix_near;
using testing::random_hermitian;
using testing::random_matrix;
using testing::random_state;
using testing::uniform;
using testing::vec;

struct Instance {
  PureState psi0;
  std::vector<ComplexMatrix> channels;
};

Instance qubit(double gamma = 1.0) {
  return {PureState(vec({0.5, sqrt3 / 2})), {std::sqrt(gamma) * ladder(LadderKind::Minus)}};
}

Instance qutrit(double gamma = 1.0) {
  return {PureState(vec({0.5, 1 / sqrt2, 0.5})), {std::sqrt(gamma) * (projector(1, 0, 3) + projector(2, 1, 3))}};
}

Instance random_instance(Eigen::Index d) {
  std::vector<ComplexMatrix> ms;
  const int n = 1 + static_cast<int>(uniform(0.0, 3.0));
  for (int j = 0; j < n; ++j) ms.push_back(random_matrix(d, uniform(0.2, 1.0)));
  return {random_state(d), ms};
}

ComplexMatrix random_traceless_hermitian(Eigen::Index d, double scale = 1.0) {
  const ComplexMatrix h = random_hermitian(d, scale);
  return h - (h.trace() / static_cast<double>(d)) * identity(d);
}

TEST(DriftTerm, Examples) {
  const Instance q = qubit(0.7);
  const ComplexMatrix g = drift_term(q.psi0, q.channels);
  EXPECT_TRUE(matrix_near(g, (sqrt3 * 0.7 / 16.0) * pauli(PauliAxis::Y), 1e-15));
  EXPECT_LT(hermiticity_defect(g), 1e-12);
  EXPECT_TRUE(matrix_near(drift_term(PureState::basis(0, 2), {pauli(PauliAxis::Z)}), ComplexMatrix::Zero(2, 2), 0.0));
  EXPECT_TRUE(matrix_near(drift_term(q.psi0, {}), ComplexMatrix::Zero(2, 2), 0.0));
  EXPECT_THROW(drift_term(q.psi0, {random_matrix(3)}), DimensionError);
}

TEST(Cost, QubitClosedForm) {
  const Instance q = qubit();
  EXPECT_EQ(cost(ComplexMatrix::Zero(2, 2), q.psi0, q.channels), 0.0);
  for (double u2 : {-1.0, -0.3, -sqrt3 / 16, 0.0, 0.25, 2.0}) {
    EXPECT_NEAR(cost(u2 * pauli(PauliAxis::Y), q.psi0, q.channels), u2 * u2 + sqrt3 / 8 * u2, 1e-14);
  }
  EXPECT_THROW(cost(random_hermitian(3), q.psi0, q.channels), DimensionError);
}

TEST(Cost, RelationToAmplitude) {
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const Instance inst = random_instance(d);
    const ComplexMatrix h = random_hermitian(d);
    const SystemModel m(d, {h}, inst.channels);
    const double a = amplitude(m, inst.psi0);
    ComplexMatrix dd = ComplexMatrix::Zero(d, d);
    for (const auto& c : inst.channels) dd += adjoint_dissipator(c, inst.psi0.projector());
    const double rhs = a * a / 4.0 - (dd * dd).trace().real() / 2.0;
    EXPECT_NEAR(cost(h, inst.psi0, inst.channels), rhs, 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST(Cost, Convex) {
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const Instance inst = random_instance(d);
    const ComplexMatrix h1 = random_hermitian(d), h2 = random_hermitian(d);
    const double t = uniform(0.0, 1.0);
    const double lhs = cost(t * h1 + (1 - t) * h2, inst.psi0, inst.channels);
    const double rhs = t * cost(h1, inst.psi0, inst.channels) + (1 - t) * cost(h2, inst.psi0, inst.channels);
    EXPECT_LE(lhs, rhs + 1e-10);
  }
}

TEST(CostGradient, AtZeroIsTransposedDrift) {
  const Instance q = qubit();
  const ComplexMatrix grad = cost_gradient(ComplexMatrix::Zero(2, 2), q.psi0, q.channels);
  EXPECT_TRUE(matrix_near(grad, -(sqrt3 / 16) * pauli(PauliAxis::Y), 1e-15));
  EXPECT_TRUE(matrix_near(grad, drift_term(q.psi0, q.channels).transpose(), 1e-15));
}

TEST(CostGradient, MatchesFiniteDifferences) {
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const Instance inst = random_instance(d);
    const EngineeringProblem problem(inst.psi0, inst.channels);
    const ComplexMatrix h = random_traceless_hermitian(d);
    const Eigen::VectorXd analytic = coefficient_gradient(problem, h);
    const auto& basis = problem.basis();
    Eigen::VectorXd numeric(analytic.size());
    const double eps = 1e-5;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double fp = cost(h + eps * basis[i], inst.psi0, inst.channels);
      const double fm = cost(h - eps * basis[i], inst.psi0, inst.channels);
      numeric[static_cast<Eigen::Index>(i)] = (fp - fm) / (2 * eps);
    }
    EXPECT_LT((analytic - numeric).norm(), 1e-6 * analytic.norm());
  }
}

TEST(Stationarity, ReferenceSolutionsAreExact) {
  const Instance q = qubit();
  EXPECT_LT(frobenius_norm(stationarity_residual(-(sqrt3 / 16) * pauli(PauliAxis::Y), q.psi0, q.channels)), 1e-12);
  const Instance t = qutrit();
  const ComplexMatrix h = (-3.0 / (8 * sqrt2)) * gell_mann(2) + (-1.0 / (8 * sqrt2)) * gell_mann(7);
  EXPECT_LT(frobenius_norm(stationarity_residual(h, t.psi0, t.channels)), 1e-12);
  EXPECT_TRUE(matrix_near(stationarity_residual(ComplexMatrix::Zero(2, 2), PureState::basis(0, 2), {}),
                          ComplexMatrix::Zero(2, 2), 0.0));
}

TEST(Stationarity, ResidualIsTransposedGradient) {
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(3);
    const ComplexMatrix h = random_hermitian(3);
    EXPECT_TRUE(matrix_near(stationarity_residual(h, inst.psi0, inst.channels),
                            cost_gradient(h, inst.psi0, inst.channels).transpose(), 1e-12));
  }
}

TEST(SolveOptimal, Qubit) {
  for (double gamma : {1.0, 0.3}) {
    const Instance q = qubit(gamma);
    const EngineeringProblem problem(q.psi0, q.channels);
    const EngineeringSolution sol = solve_optimal(problem);
    EXPECT_LT(sol.residual_norm, 1e-10);
    EXPECT_NEAR(sol.u[0], 0.0, 1e-12);
    EXPECT_NEAR(sol.u[1], -sqrt3 * gamma / 16, 1e-10);
    EXPECT_NEAR(sol.u[2], 0.0, 1e-12);
    ASSERT_EQ(sol.nullspace.size(), 1u);
    const Eigen::VectorXd& v = sol.nullspace[0];
    EXPECT_NEAR(v[0] + sqrt3 * v[2], 0.0, 1e-10);
    EXPECT_NEAR(std::abs(v[0]), sqrt3 / 2, 1e-10);
    EXPECT_NEAR(v[1], 0.0, 1e-10);
    EXPECT_NEAR(sol.cost_value, -3 * gamma * gamma / 256, 1e-14);
    EXPECT_TRUE(matrix_near(sol.h_opt, combine(problem.basis(), sol.u), 0.0));
  }
}

TEST(SolveOptimal, QutritSatisfiesReferenceConditions) {
  const EngineeringProblem problem(qutrit().psi0, qutrit().channels);
  const EngineeringSolution sol = solve_optimal(problem);
  const Eigen::VectorXd& u = sol.u;
  auto c = [&](int i) { return u[i - 1]; };
  EXPECT_NEAR(2 * sqrt2 * c(1) + 5 * c(3) + 2 * c(4) - 2 * sqrt2 * c(6) + sqrt3 * c(8), 0.0, 1e-9);
  EXPECT_NEAR(3 * c(3) + 2 * c(4) - sqrt3 * c(8), 0.0, 1e-9);
  EXPECT_NEAR(3 * sqrt2 * c(2) + 2 * c(5) - sqrt2 * c(7), -1.0, 1e-9);
  EXPECT_NEAR(8 * c(5) + 8 * sqrt2 * c(7), -1.0, 1e-9);
  EXPECT_EQ(sol.nullspace.size(), 4u);
  // Minimum-norm representative.
  EXPECT_NEAR(c(2), -1 / (4 * sqrt2), 1e-10);
  EXPECT_NEAR(c(5), -0.125, 1e-10);
  EXPECT_NEAR(u.norm(), std::hypot(1 / (4 * sqrt2), 0.125), 1e-10);
}

TEST(SolveOptimal, NullspaceDimensionAndCommutation) {
  for (Eigen::Index d = 2; d <= 5; ++d) {
    const Instance inst = random_instance(d);
    const EngineeringProblem problem(inst.psi0, inst.channels);
    const EngineeringSolution sol = solve_optimal(problem);
    EXPECT_EQ(sol.nullspace.size(), static_cast<std::size_t>((d - 1) * (d - 1)));
    const ComplexMatrix rho0 = inst.psi0.projector();
    for (const auto& v : sol.nullspace) {
      const ComplexMatrix n = combine(problem.basis(), v);
      EXPECT_LT(frobenius_norm(commutator(n, rho0)), 1e-10);
      for (double s : {-1.0, 1.0}) {
        EXPECT_NEAR(cost(sol.h_opt + s * n, inst.psi0, inst.channels), sol.cost_value, 1e-10);
      }
    }
  }
}

TEST(SolveOptimal, NoChannels) {
  const EngineeringProblem problem(PureState::basis(1, 3), {});
  const EngineeringSolution sol = solve_optimal(problem);
  EXPECT_LT(sol.u.norm(), 1e-15);
  EXPECT_EQ(sol.nullspace.size(), 4u);
}

TEST(SolveOptimal, BeatsRandomHamiltonians) {
  for (const Instance& inst : {qubit(), qutrit(), random_instance(4)}) {
    const Eigen::Index d = inst.psi0.dim();
    const EngineeringSolution sol = solve_optimal(EngineeringProblem(inst.psi0, inst.channels));
    const double a_opt = amplitude(SystemModel(d, {sol.h_opt}, inst.channels), inst.psi0);
    EXPECT_LE(a_opt, amplitude(SystemModel(d, {}, inst.channels), inst.psi0) + 1e-12);
    for (int trial = 0; trial < 1000; ++trial) {
      const ComplexMatrix h = random_hermitian(d, uniform(0.01, 2.0));
      EXPECT_LE(sol.cost_value, cost(h, inst.psi0, inst.channels) + 1e-12);
      EXPECT_LE(a_opt, amplitude(SystemModel(d, {h}, inst.channels), inst.psi0) + 1e-12);
    }
    EXPECT_LT(frobenius_norm(cost_gradient(sol.h_opt, inst.psi0, inst.channels)), 1e-9);
  }
}

TEST(BruteForce, AgreesWithSolver) {
  const Instance q = qubit();
  const EngineeringProblem qp(q.psi0, q.channels);
  EXPECT_NEAR(brute_force_minimize(qp).cost_value, -3.0 / 256, 1e-8);
  const EngineeringSolution zero = brute_force_minimize(EngineeringProblem(PureState::basis(0, 2), {}));
  EXPECT_EQ(zero.u.norm(), 0.0);
  EXPECT_EQ(zero.cost_value, 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = random_instance(2 + trial % 3);
    const EngineeringProblem problem(inst.psi0, inst.channels);
    EXPECT_NEAR(brute_force_minimize(problem).cost_value, solve_optimal(problem).cost_value, 1e-7);
  }
}

TEST(BruteForce, RejectsBadArguments) {
  const EngineeringProblem qp(qubit().psi0, qubit().channels);
  EXPECT_THROW(brute_force_minimize(qp, 0), DomainError);
  EXPECT_THROW(brute_force_minimize(qp, 10, -1.0), DomainError);
  EXPECT_THROW(brute_force_minimize(qp, 1, 1e-6), NumericError);
}

TEST(Problem, Validation) {
  EXPECT_THROW(EngineeringProblem(PureState::basis(0, 1), {}), DimensionError);
  EXPECT_THROW(EngineeringProblem(PureState::basis(0, 2), {random_matrix(3)}), DimensionError);
  EXPECT_THROW(EngineeringProblem(PureState::basis(0, 2), {}, {random_matrix(2)}), DomainError);
  EXPECT_THROW(EngineeringProblem(PureState::basis(0, 2), {}, {}), DimensionError);
}

}  // namespace
}  // namespace qslkit
