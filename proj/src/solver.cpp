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

#include "pintmg/solver.hpp"

#include <cmath>
#include <string>

#include "pintmg/parallel.hpp"

namespace pintmg {
namespace {

SparseMatrix to_sparse(const CMatrix& m) { return m.sparseView(); }

double inf_norm(const CVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

StepSolver::StepSolver(const CMatrix& qdelta, const SparseMatrix& a, Complex mu)
    : qdelta_(qdelta), a_(&a), mu_(mu) {
  const Eigen::Index m = qdelta.rows();
  const Eigen::Index n = a.rows();
  node_lu_.resize(static_cast<std::size_t>(m));
  SparseMatrix eye(n, n);
  eye.setIdentity();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Complex w = qdelta(i, i);
    if (w == Complex(0.0)) continue;
    // Reuse an earlier factorization with the same weight.
    for (Eigen::Index j = 0; j < i; ++j) {
      if (qdelta(j, j) == w) node_lu_[static_cast<std::size_t>(i)] = node_lu_[static_cast<std::size_t>(j)];
    }
    if (node_lu_[static_cast<std::size_t>(i)]) continue;
    auto lu = std::make_shared<Lu>();
    const SparseMatrix block = eye - (mu * w) * a;
    lu->compute(block);
    if (lu->info() != Eigen::Success) {
      throw Error(ErrorCode::kSingularPreconditioner, "sparse LU failed for node " + std::to_string(i));
    }
    node_lu_[static_cast<std::size_t>(i)] = std::move(lu);
  }
}

void StepSolver::solve(const CMatrix& r, Eigen::Ref<CMatrix> x) const {
  const Eigen::Index m = qdelta_.rows();
  for (Eigen::Index i = 0; i < m; ++i) {
    CVector rhs = r.col(i);
    if (i > 0) {
      CVector acc = CVector::Zero(r.rows());
      for (Eigen::Index j = 0; j < i; ++j) {
        if (qdelta_(i, j) != Complex(0.0)) acc += qdelta_(i, j) * x.col(j);
      }
      rhs += mu_ * (*a_ * acc);
    }
    const auto& lu = node_lu_[static_cast<std::size_t>(i)];
    if (lu) {
      x.col(i) = lu->solve(rhs);
    } else {
      x.col(i) = rhs;
    }
  }
}

BlockOperators::BlockOperators(const CompositeProblem& problem, double omega)
    : problem_(problem),
      a_(to_sparse(problem.fine.space.a)),
      a_coarse_(to_sparse(problem.coarse.space.a)),
      restrict_space_(to_sparse(problem.transfer.restrict_space)),
      interp_space_(to_sparse(problem.transfer.interp_space)) {
  if (!(omega > 0.0)) throw Error(ErrorCode::kInvalidArgument, "omega must be positive");
  fine_ = std::make_unique<StepSolver>(CMatrix(omega * problem.fine.coll.qdelta), a_, problem.mu);
  coarse_ = std::make_unique<StepSolver>(problem.coarse.coll.qdelta, a_coarse_, problem.mu);
}

CVector BlockOperators::apply_c(const CVector& u) const {
  const Eigen::Index n = problem_.fine.space.n;
  const Eigen::Index m = problem_.fine.coll.m;
  const Eigen::Index l = problem_.l;
  if (u.size() != l * m * n) throw Error(ErrorCode::kDimensionMismatch, "apply_c: wrong vector size");
  const Eigen::Map<const CMatrix> uu(u.data(), n, l * m);
  const CMatrix au = a_ * uu;
  const CMatrix qt = problem_.fine.coll.q.transpose();
  CVector out(u.size());
  Eigen::Map<CMatrix> oo(out.data(), n, l * m);
  for (Eigen::Index s = 0; s < l; ++s) {
    oo.middleCols(s * m, m) = uu.middleCols(s * m, m) - problem_.mu * (au.middleCols(s * m, m) * qt);
    if (s > 0) oo.middleCols(s * m, m).colwise() -= uu.col(s * m - 1);
  }
  return out;
}

CVector BlockOperators::apply_smoother_inverse(const CVector& r, int workers) const {
  const Eigen::Index n = problem_.fine.space.n;
  const Eigen::Index m = problem_.fine.coll.m;
  const Eigen::Index l = problem_.l;
  CVector out(r.size());
  const Eigen::Map<const CMatrix> rr(r.data(), n, l * m);
  Eigen::Map<CMatrix> oo(out.data(), n, l * m);
  auto sweep = [&](std::size_t step) {
    const auto s = static_cast<Eigen::Index>(step);
    fine_->solve(rr.middleCols(s * m, m), oo.middleCols(s * m, m));
  };
  parallel_for(static_cast<std::size_t>(l), sweep, workers);
  return out;
}

CVector BlockOperators::apply_coarse_correction(const CVector& r) const {
  const Eigen::Index n = problem_.fine.space.n;
  const Eigen::Index m = problem_.fine.coll.m;
  const Eigen::Index nc = problem_.coarse.space.n;
  const Eigen::Index mc = problem_.coarse.coll.m;
  const Eigen::Index l = problem_.l;
  const CMatrix rq_t = problem_.transfer.restrict_nodes.transpose();
  const CMatrix pq_t = problem_.transfer.interp_nodes.transpose();
  const Eigen::Map<const CMatrix> rr(r.data(), n, l * m);

  CVector out(r.size());
  Eigen::Map<CMatrix> oo(out.data(), n, l * m);
  CMatrix y(nc, mc);
  CMatrix rhs(nc, mc);
  for (Eigen::Index s = 0; s < l; ++s) {
    rhs = (restrict_space_ * rr.middleCols(s * m, m)) * rq_t;
    if (s > 0) rhs.colwise() += y.col(mc - 1);  // H~ y_{s-1}
    coarse_->solve(rhs, y);
    oo.middleCols(s * m, m) = (interp_space_ * y) * pq_t;
  }
  return out;
}

CVector pfasst_iteration(const BlockOperators& ops, const SolverConfig& cfg, const CVector& u, const CVector& u0) {
  CVector next = u;
  for (int pass = 0; pass < cfg.coarse_passes; ++pass) {
    next += ops.apply_coarse_correction(ops.residual(next, u0));
  }
  for (int sweep = 0; sweep < cfg.smoother_steps; ++sweep) {
    next += ops.apply_smoother_inverse(ops.residual(next, u0), cfg.smoother_workers);
  }
  return next;
}

RunReport solve(const CompositeProblem& problem, const CVector& initial_value, const SolverConfig& cfg) {
  if (cfg.smoother_steps < 1 || !(cfg.tol > 0.0) || cfg.max_iter < 0) {
    throw Error(ErrorCode::kInvalidArgument, "solver config needs k >= 1, tol > 0, max_iter >= 0");
  }
  const BlockOperators ops(problem, cfg.omega);
  const CVector u0 = initial_rhs(problem.l, problem.fine.coll.m, initial_value);

  RunReport report;
  report.solution = CVector::Zero(u0.size());
  if (cfg.predictor) report.solution = ops.apply_coarse_correction(u0);
  double res = inf_norm(ops.residual(report.solution, u0));
  report.residual_history.push_back(res);
  while (res > cfg.tol && report.iterations < cfg.max_iter) {
    report.solution = pfasst_iteration(ops, cfg, report.solution, u0);
    ++report.iterations;
    res = inf_norm(ops.residual(report.solution, u0));
    report.residual_history.push_back(res);
    if (!std::isfinite(res)) break;
  }
  report.converged = res <= cfg.tol;
  return report;
}

CVector serial_sdc_reference(const CollocationSpec& spec, const SpaceProblem& space, Complex mu, Eigen::Index l,
                             const CVector& initial_value, double tol, int max_iter) {
  const Eigen::Index n = space.n;
  const Eigen::Index m = spec.m;
  if (initial_value.size() != n) throw Error(ErrorCode::kDimensionMismatch, "initial value has wrong size");
  const SparseMatrix a = to_sparse(space.a);
  const StepSolver sweep(spec.qdelta, a, mu);
  const CMatrix qt = spec.q.transpose();

  CVector out(l * m * n);
  Eigen::Map<CMatrix> oo(out.data(), n, l * m);
  CVector start = initial_value;
  CMatrix d(n, m);
  for (Eigen::Index s = 0; s < l; ++s) {
    CMatrix u = start.replicate(1, m);
    int sweeps = 0;
    while (true) {
      // U_l - (I - mu Q (x) A) U
      const CMatrix r = start.replicate(1, m) - u + mu * ((a * u) * qt);
      if (r.cwiseAbs().maxCoeff() <= tol) break;
      if (++sweeps > 10 * max_iter) {
        throw Error(ErrorCode::kNoConvergence, "SDC sweeps stalled on step " + std::to_string(s));
      }
      sweep.solve(r, d);
      u += d;
    }
    oo.middleCols(s * m, m) = u;
    start = u.col(m - 1);
  }
  return out;
}

}  // namespace pintmg
