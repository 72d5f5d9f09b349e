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

#include "pintmg/transfer.hpp"

#include <string>

namespace pintmg {

TransferOps space_transfer(BoundaryKind kind, Eigen::Index n_fine, Eigen::Index n_coarse) {
  TransferOps ops;
  ops.interpolation = CMatrix::Zero(n_fine, n_coarse);
  if (kind == BoundaryKind::kDirichlet) {
    if (n_coarse < 1 || n_fine != 2 * n_coarse + 1) {
      throw Error(ErrorCode::kDimensionMismatch, "dirichlet transfer needs n_fine = 2 n_coarse + 1, got " +
                                                     std::to_string(n_fine) + ", " + std::to_string(n_coarse));
    }
    for (Eigen::Index j = 0; j < n_coarse; ++j) {
      ops.interpolation(2 * j, j) = 0.5;
      ops.interpolation(2 * j + 1, j) = 1.0;
      ops.interpolation(2 * j + 2, j) = 0.5;
    }
  } else {
    if (n_coarse < 1 || n_fine != 2 * n_coarse) {
      throw Error(ErrorCode::kDimensionMismatch, "periodic transfer needs n_fine = 2 n_coarse, got " +
                                                     std::to_string(n_fine) + ", " + std::to_string(n_coarse));
    }
    for (Eigen::Index j = 0; j < n_coarse; ++j) {
      ops.interpolation(2 * j, j) += 1.0;
      ops.interpolation(2 * j + 1, j) += 0.5;
      ops.interpolation((2 * j + n_fine - 1) % n_fine, j) += 0.5;
    }
  }
  ops.restriction = 0.5 * ops.interpolation.transpose();
  return ops;
}

TransferOps node_transfer(const std::vector<double>& fine_nodes, const std::vector<double>& coarse_nodes) {
  if (fine_nodes.empty() || coarse_nodes.empty() || fine_nodes.back() != 1.0 || coarse_nodes.back() != 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "node_transfer: both node sets must end at 1");
  }
  const auto m = static_cast<Eigen::Index>(fine_nodes.size());
  const auto mc = static_cast<Eigen::Index>(coarse_nodes.size());
  TransferOps ops;
  ops.interpolation.resize(m, mc);
  for (Eigen::Index i = 0; i < m; ++i) {
    ops.interpolation.row(i) = lagrange_values(coarse_nodes, fine_nodes[static_cast<std::size_t>(i)])
                                   .transpose()
                                   .cast<Complex>();
  }
  ops.restriction.resize(mc, m);
  for (Eigen::Index i = 0; i < mc; ++i) {
    ops.restriction.row(i) = lagrange_values(fine_nodes, coarse_nodes[static_cast<std::size_t>(i)])
                                 .transpose()
                                 .cast<Complex>();
  }
  return ops;
}

CMatrix TransferPair::tfc() const { return kron(identity(l), restrict_nodes, restrict_space); }

CMatrix TransferPair::tcf() const { return kron(identity(l), interp_nodes, interp_space); }

TransferPair assemble_pair(Eigen::Index l, const TransferOps& nodes, const TransferOps& space) {
  if (l < 1) throw Error(ErrorCode::kInvalidArgument, "assemble_pair: l must be >= 1");
  if (nodes.restriction.cols() != nodes.interpolation.rows() ||
      nodes.restriction.rows() != nodes.interpolation.cols() ||
      space.restriction.cols() != space.interpolation.rows() ||
      space.restriction.rows() != space.interpolation.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "assemble_pair: inconsistent transfer shapes");
  }
  TransferPair pair;
  pair.l = l;
  pair.restrict_space = space.restriction;
  pair.interp_space = space.interpolation;
  pair.restrict_nodes = nodes.restriction;
  pair.interp_nodes = nodes.interpolation;

  // (E (x) H~) T_F^C - T_F^C (E (x) H) = E (x) (N~ R_Q - R_Q N) (x) R_A, and the
  // infinity norm of a Kronecker product is the product of the norms.
  if (l >= 2) {
    const CMatrix n_fine = build_nmat(static_cast<int>(nodes.interpolation.rows()));
    const CMatrix n_coarse = build_nmat(static_cast<int>(nodes.interpolation.cols()));
    const CMatrix defect = n_coarse * nodes.restriction - nodes.restriction * n_fine;
    pair.compatibility_residual = norm(defect, NormKind::kInf) * norm(space.restriction, NormKind::kInf);
  }
  if (pair.compatibility_residual > 1e-12) {
    throw Error(ErrorCode::kCompatibilityViolated,
                "restriction does not commute with the step transfer, residual " +
                    std::to_string(pair.compatibility_residual));
  }
  return pair;
}

TransferPair standard_transfer(Eigen::Index l, const CollocationSpec& fine, const CollocationSpec& coarse,
                               const SpaceProblem& fine_space, const SpaceProblem& coarse_space) {
  const TransferOps nodes = node_transfer(fine.nodes, coarse.nodes);
  TransferOps space;
  if (fine_space.n == coarse_space.n) {
    space.restriction = identity(fine_space.n);
    space.interpolation = identity(fine_space.n);
  } else if (fine_space.kind == SpaceKind::kHeatDirichlet) {
    space = space_transfer(BoundaryKind::kDirichlet, fine_space.n, coarse_space.n);
  } else if (fine_space.kind == SpaceKind::kAdvectionPeriodic) {
    space = space_transfer(BoundaryKind::kPeriodic, fine_space.n, coarse_space.n);
  } else {
    throw Error(ErrorCode::kDimensionMismatch, "no spatial transfer for this problem pair");
  }
  return assemble_pair(l, nodes, space);
}

}  // namespace pintmg
