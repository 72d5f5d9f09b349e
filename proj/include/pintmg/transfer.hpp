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

#ifndef PINTMG_TRANSFER_HPP
#define PINTMG_TRANSFER_HPP

#include <vector>

#include "pintmg/collocation.hpp"
#include "pintmg/densela.hpp"
#include "pintmg/spaceops.hpp"

namespace pintmg {

enum class BoundaryKind { kDirichlet, kPeriodic };

/// Restriction (coarse x fine) and interpolation (fine x coarse).
struct TransferOps {
  CMatrix restriction;
  CMatrix interpolation;
};

/// Linear interpolation and full-weighting restriction (half its transpose).
/// Dirichlet needs n_fine = 2 n_coarse + 1, periodic n_fine = 2 n_coarse;
/// throws DimensionMismatch otherwise.
TransferOps space_transfer(BoundaryKind kind, Eigen::Index n_fine, Eigen::Index n_coarse);

/// interpolation(i, j) = l_j^coarse(tau_i^fine), restriction(i, j) =
/// l_j^fine(tau_i^coarse). Both node sets must end at 1.
TransferOps node_transfer(const std::vector<double>& fine_nodes,
                          const std::vector<double>& coarse_nodes);

/// Kronecker factors of T_F^C = I_L (x) R_Q (x) R_A and T_C^F = I_L (x) P_Q (x) P_A.
struct TransferPair {
  Eigen::Index l = 1;
  CMatrix restrict_space;
  CMatrix interp_space;
  CMatrix restrict_nodes;
  CMatrix interp_nodes;
  double compatibility_residual = 0.0;  // ||(E (x) H~) T_F^C - T_F^C (E (x) H)||_inf

  CMatrix tfc() const;
  CMatrix tcf() const;
  Eigen::Index fine_size() const { return l * interp_nodes.rows() * interp_space.rows(); }
  Eigen::Index coarse_size() const { return l * interp_nodes.cols() * interp_space.cols(); }
};

/// Throws CompatibilityViolated when the residual exceeds 1e-12.
TransferPair assemble_pair(Eigen::Index l, const TransferOps& nodes, const TransferOps& space);

/// Node and space transfers chosen from the problem kinds (identity for
/// dahlquist and whenever the grids coincide).
TransferPair standard_transfer(Eigen::Index l, const CollocationSpec& fine, const CollocationSpec& coarse,
                               const SpaceProblem& fine_space, const SpaceProblem& coarse_space);

}  // namespace pintmg

#endif  // PINTMG_TRANSFER_HPP
