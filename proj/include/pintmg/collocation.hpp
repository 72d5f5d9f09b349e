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

#ifndef PINTMG_COLLOCATION_HPP
#define PINTMG_COLLOCATION_HPP

#include <string_view>
#include <vector>

#include "pintmg/densela.hpp"

namespace pintmg {

/// Simplified quadrature used by the SDC preconditioner.
enum class QDeltaKind { kLU, kIE, kEE };

std::string_view to_string(QDeltaKind kind);
/// Accepts "LU", "IE", "EE" (case-insensitive); throws InvalidArgument.
QDeltaKind parse_qdelta_kind(std::string_view text);

/// One time-step's collocation data on the unit interval.
struct CollocationSpec {
  int m = 0;
  std::vector<double> nodes;  // 0 < tau_1 < ... < tau_M = 1
  CMatrix q;                  // q(m, j) = integral of l_j over [0, tau_m]
  CMatrix qdelta;
  QDeltaKind qdelta_kind = QDeltaKind::kLU;
  CMatrix nmat;               // every row (0, ..., 0, 1)
};

/// Radau-right points on (0, 1]. Safeguarded Newton on the Legendre form of
/// the Radau polynomial. Throws NoConvergence.
std::vector<double> radau_right_nodes(int m);

/// Exact Lagrange-basis integrals via monomial expansion. Throws DuplicateNodes.
CMatrix build_q(const std::vector<double>& nodes);

/// LU: transpose of U in q^T = L U. IE: (m, j) = tau_j - tau_{j-1}, j <= m.
/// EE: (m, j) = tau_{j+1} - tau_j, j < m. Throws ZeroPivot for LU.
CMatrix build_qdelta(const CMatrix& q, const std::vector<double>& nodes, QDeltaKind kind);

CMatrix build_nmat(int m);

/// Values of the Lagrange basis of `nodes` at x, as a row vector.
RVector lagrange_values(const std::vector<double>& nodes, double x);

/// Radau-right nodes plus all derived matrices.
CollocationSpec make_collocation(int m, QDeltaKind kind);

}  // namespace pintmg

#endif  // PINTMG_COLLOCATION_HPP
