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

#ifndef PINTMG_COMPOSITE_HPP
#define PINTMG_COMPOSITE_HPP

#include "pintmg/collocation.hpp"
#include "pintmg/densela.hpp"
#include "pintmg/spaceops.hpp"
#include "pintmg/transfer.hpp"

namespace pintmg {

/// Collocation rule plus spatial operator on one level.
struct Level {
  CollocationSpec coll;
  SpaceProblem space;

  Eigen::Index block_size() const { return coll.m * space.n; }
};

/// Same nodes, spatially coarsened operator (dahlquist stays as is).
Level coarse_level(const Level& fine);

/// The factors that define a composite system, without the assembled
/// L M N x L M N matrices. This is what the matrix-free solver consumes.
struct CompositeProblem {
  Eigen::Index l = 1;
  Complex mu{0.0, 0.0};
  Level fine;
  Level coarse;
  TransferPair transfer;

  Eigen::Index size() const { return l * fine.block_size(); }
};

/// Standard coarse level and transfers for the given fine level.
CompositeProblem make_problem(Eigen::Index l, Complex mu, const Level& fine);

/// C = I - mu I_L (x) Q (x) A - E (x) H and its preconditioners over L steps.
///
/// Vector layout: index ((step * M) + node) * N + dof.
struct CompositeSystem {
  Eigen::Index l = 1;
  Complex mu{0.0, 0.0};
  double omega = 1.0;
  Level fine;
  Level coarse;
  TransferPair transfer;

  CMatrix e;         // L x L, ones on the first subdiagonal
  CMatrix h;         // N (x) I_N on the fine level
  CMatrix h_coarse;  // same on the coarse level
  CMatrix c;
  CMatrix phat;      // I - mu I_L (x) Q_delta (x) A
  CMatrix ptilde;    // I - mu I_L (x) Q~_delta (x) A~ - E (x) H~

  Eigen::Index size() const { return c.rows(); }
  CompositeProblem problem() const { return {l, mu, fine, coarse, transfer}; }
  Eigen::Index coarse_size() const { return ptilde.rows(); }
  /// I - mu I_L (x) omega Q_delta (x) A.
  CMatrix phat_omega(double w) const;
};

/// Assembles every matrix by Kronecker products and verifies that the
/// diagonal blocks of P^ (with the stored omega) and P~ can be factored.
/// Throws SingularPreconditioner.
CompositeSystem assemble(Eigen::Index l, Complex mu, const Level& fine, const Level& coarse,
                         const TransferPair& transfer, double omega = 1.0);

CompositeSystem assemble(const CompositeProblem& problem, double omega = 1.0);

/// Fine level as given, coarse level from coarse_level and standard transfers.
CompositeSystem assemble_standard(Eigen::Index l, Complex mu, const Level& fine, double omega = 1.0);

/// (U_0, 0, ..., 0) with the initial value copied to all M nodes of step one.
CVector initial_rhs(Eigen::Index l, int m, const CVector& initial_value);

/// u0 - C u.
CVector residual(const CompositeSystem& sys, const CVector& u, const CVector& u0);

/// Dense LU solve of C u = u0. Throws SingularMatrix.
CVector direct_solve(const CompositeSystem& sys, const CVector& u0);

}  // namespace pintmg

#endif  // PINTMG_COMPOSITE_HPP
