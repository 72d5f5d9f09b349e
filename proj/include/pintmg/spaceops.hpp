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

#ifndef PINTMG_SPACEOPS_HPP
#define PINTMG_SPACEOPS_HPP

#include <optional>
#include <string_view>
#include <vector>

#include "pintmg/densela.hpp"

namespace pintmg {

enum class SpaceKind { kHeatDirichlet, kAdvectionPeriodic, kDahlquist };

std::string_view to_string(SpaceKind kind);

/// Normalized spatial operator. All mesh and coefficient factors live in the
/// CFL number mu, so `a` is a pure stencil (times the coarse-grid ratio on
/// coarse levels).
struct SpaceProblem {
  SpaceKind kind = SpaceKind::kDahlquist;
  Eigen::Index n = 0;
  CMatrix a;
  std::optional<std::vector<Complex>> eigen;  // closed form, same order as the formula index
  bool invertible = true;
  CMatrix null_basis;  // orthonormal columns spanning ker(a); n x 0 when invertible
  double dx = 1.0;     // mesh width on the unit interval (1 for dahlquist)
};

/// tridiag(1, -2, 1) on n Dirichlet interior points.
SpaceProblem make_heat(Eigen::Index n);

/// Periodic centred difference, (a u)_j = (u_{j+1} - u_{j-1}) / 2.
SpaceProblem make_advection(Eigen::Index n);

SpaceProblem make_dahlquist(Complex lambda);

/// The operator on the next coarser grid, expressed in the fine grid's mu:
/// heat n -> (n - 1) / 2 scaled by 1/4, advection n -> n / 2 scaled by 1/2,
/// dahlquist unchanged. Throws DimensionMismatch for incompatible n.
SpaceProblem coarsen(const SpaceProblem& fine);

/// Orthogonal projector onto ker(a) (zero matrix for invertible problems).
CMatrix null_projector(const SpaceProblem& problem);

/// CFL number for coefficient nu (heat) or c (advection) and step dt;
/// dahlquist returns dt (lambda is already inside a).
double cfl_number(const SpaceProblem& problem, double coefficient, double dt);

}  // namespace pintmg

#endif  // PINTMG_SPACEOPS_HPP
