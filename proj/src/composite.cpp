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

#include "pintmg/composite.hpp"

#include <string>

namespace pintmg {
namespace {

void require_factorable(const CMatrix& block, const char* name) {
  try {
    LuDecomposition lu(block);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kSingularMatrix) throw;
    throw Error(ErrorCode::kSingularPreconditioner, std::string(name) + " is singular: " + err.what());
  }
}

}  // namespace

Level coarse_level(const Level& fine) { return {fine.coll, coarsen(fine.space)}; }

CMatrix CompositeSystem::phat_omega(double w) const {
  return identity(size()) - mu * kron(identity(l), CMatrix(w * fine.coll.qdelta), fine.space.a);
}

CompositeSystem assemble(Eigen::Index l, Complex mu, const Level& fine, const Level& coarse,
                         const TransferPair& transfer, double omega) {
  if (l < 1) throw Error(ErrorCode::kInvalidArgument, "assemble: l must be >= 1");
  if (!(omega > 0.0)) throw Error(ErrorCode::kInvalidArgument, "assemble: omega must be positive");
  if (transfer.l != l || transfer.fine_size() != l * fine.block_size() ||
      transfer.coarse_size() != l * coarse.block_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "assemble: transfer operators do not match the levels");
  }

  CompositeSystem sys;
  sys.l = l;
  sys.mu = mu;
  sys.omega = omega;
  sys.fine = fine;
  sys.coarse = coarse;
  sys.transfer = transfer;

  const CMatrix il = identity(l);
  sys.e = subdiagonal_shift(l);
  sys.h = kron(fine.coll.nmat, identity(fine.space.n));
  sys.h_coarse = kron(coarse.coll.nmat, identity(coarse.space.n));

  const Eigen::Index n = l * fine.block_size();
  const Eigen::Index nc = l * coarse.block_size();
  const CMatrix e_h = kron(sys.e, sys.h);
  sys.c = identity(n) - mu * kron(il, fine.coll.q, fine.space.a) - e_h;
  sys.phat = identity(n) - mu * kron(il, fine.coll.qdelta, fine.space.a);
  sys.ptilde = identity(nc) - mu * kron(il, coarse.coll.qdelta, coarse.space.a) - kron(sys.e, sys.h_coarse);

  const Eigen::Index b = fine.block_size();
  const Eigen::Index bc = coarse.block_size();
  require_factorable(sys.phat_omega(omega).topLeftCorner(b, b), "fine preconditioner block");
  require_factorable(sys.ptilde.topLeftCorner(bc, bc), "coarse preconditioner block");
  return sys;
}

CompositeProblem make_problem(Eigen::Index l, Complex mu, const Level& fine) {
  if (l < 1) throw Error(ErrorCode::kInvalidArgument, "make_problem: l must be >= 1");
  CompositeProblem problem;
  problem.l = l;
  problem.mu = mu;
  problem.fine = fine;
  problem.coarse = coarse_level(fine);
  problem.transfer = standard_transfer(l, fine.coll, problem.coarse.coll, fine.space, problem.coarse.space);
  return problem;
}

CompositeSystem assemble(const CompositeProblem& problem, double omega) {
  return assemble(problem.l, problem.mu, problem.fine, problem.coarse, problem.transfer, omega);
}

CompositeSystem assemble_standard(Eigen::Index l, Complex mu, const Level& fine, double omega) {
  return assemble(make_problem(l, mu, fine), omega);
}

CVector initial_rhs(Eigen::Index l, int m, const CVector& initial_value) {
  const Eigen::Index n = initial_value.size();
  CVector u0 = CVector::Zero(l * m * n);
  for (int node = 0; node < m; ++node) u0.segment(node * n, n) = initial_value;
  return u0;
}

CVector residual(const CompositeSystem& sys, const CVector& u, const CVector& u0) {
  if (u.size() != sys.size() || u0.size() != sys.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "residual: vector size does not match the system");
  }
  return u0 - sys.c * u;
}

CVector direct_solve(const CompositeSystem& sys, const CVector& u0) {
  return LuDecomposition(sys.c).solve(u0);
}

}  // namespace pintmg
