// Copyright 2026 The pintmg Authors
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

#ifndef PINTMG_SOLVER_HPP
#define PINTMG_SOLVER_HPP

#include <memory>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "pintmg/composite.hpp"

namespace pintmg {

struct SolverConfig {
  int smoother_steps = 3;  // k
  double tol = 1e-8;       // absolute, infinity norm of u0 - C u
  int max_iter = 200;
  double omega = 1.0;
  bool predictor = false;
  int coarse_passes = 1;
  int smoother_workers = 1;  // threads for the L independent step sweeps
};

struct RunReport {
  int iterations = 0;
  std::vector<double> residual_history;  // iterations + 1 entries
  bool converged = false;
  CVector solution;
};

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Solves (I - mu Q_delta (x) A) x = r on one step by forward substitution
/// over the nodes, with one sparse LU per distinct diagonal weight.
class StepSolver {
 public:
  StepSolver(const CMatrix& qdelta, const SparseMatrix& a, Complex mu);

  /// r and x are N x M, column m holding node m.
  void solve(const CMatrix& r, Eigen::Ref<CMatrix> x) const;

 private:
  using Lu = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
  CMatrix qdelta_;
  const SparseMatrix* a_;
  Complex mu_;
  std::vector<std::shared_ptr<Lu>> node_lu_;  // nullptr where the diagonal weight is 0
};

/// Kronecker-structured, matrix-free application of C, P^_omega^{-1} and the
/// coarse-grid correction. Vectors are viewed as N x (L M) matrices.
class BlockOperators {
 public:
  BlockOperators(const CompositeProblem& problem, double omega);

  CVector apply_c(const CVector& u) const;
  CVector residual(const CVector& u, const CVector& u0) const { return u0 - apply_c(u); }
  /// P^_omega^{-1} r, step blocks solved independently on up to `workers` threads.
  CVector apply_smoother_inverse(const CVector& r, int workers = 1) const;
  /// T_C^F P~^{-1} T_F^C r, coarse steps solved in order.
  CVector apply_coarse_correction(const CVector& r) const;

  const CompositeProblem& problem() const { return problem_; }

 private:
  CompositeProblem problem_;
  SparseMatrix a_, a_coarse_, restrict_space_, interp_space_;
  std::unique_ptr<StepSolver> fine_, coarse_;
};

/// One iteration: coarse-grid correction followed by k smoother sweeps.
CVector pfasst_iteration(const BlockOperators& ops, const SolverConfig& cfg, const CVector& u,
                         const CVector& u0);

/// Iterates from zero (initial value only in the right-hand side) until the
/// residual drops below cfg.tol or cfg.max_iter is reached.
RunReport solve(const CompositeProblem& problem, const CVector& initial_value, const SolverConfig& cfg);

/// Sequential SDC sweeps to tolerance on each step, the last node handed on.
/// Throws NoConvergence when a step needs more than 10 * max_iter sweeps.
CVector serial_sdc_reference(const CollocationSpec& spec, const SpaceProblem& space, Complex mu, Eigen::Index l,
                             const CVector& initial_value, double tol, int max_iter = 200);

}  // namespace pintmg

#endif  // PINTMG_SOLVER_HPP
