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

#include "pintmg/spaceops.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace pintmg {

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::kHeatDirichlet:
      return "heat";
    case SpaceKind::kAdvectionPeriodic:
      return "advection";
    case SpaceKind::kDahlquist:
      return "dahlquist";
  }
  return "?";
}

SpaceProblem make_heat(Eigen::Index n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "make_heat: n must be >= 1");
  SpaceProblem p;
  p.kind = SpaceKind::kHeatDirichlet;
  p.n = n;
  p.a = CMatrix::Zero(n, n);
  std::vector<Complex> eig;
  for (Eigen::Index i = 0; i < n; ++i) {
    p.a(i, i) = -2.0;
    if (i > 0) p.a(i, i - 1) = 1.0;
    if (i + 1 < n) p.a(i, i + 1) = 1.0;
    const double s = std::sin(static_cast<double>(i + 1) * std::numbers::pi / (2.0 * static_cast<double>(n + 1)));
    eig.emplace_back(-4.0 * s * s);
  }
  p.eigen = std::move(eig);
  p.invertible = true;
  p.null_basis = CMatrix::Zero(n, 0);
  p.dx = 1.0 / static_cast<double>(n + 1);
  return p;
}

SpaceProblem make_advection(Eigen::Index n) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "make_advection: n must be >= 2");
  SpaceProblem p;
  p.kind = SpaceKind::kAdvectionPeriodic;
  p.n = n;
  p.a = CMatrix::Zero(n, n);
  std::vector<Complex> eig;
  for (Eigen::Index i = 0; i < n; ++i) {
    p.a(i, (i + 1) % n) += 0.5;
    p.a(i, (i + n - 1) % n) -= 0.5;
    eig.emplace_back(0.0, std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
  }
  p.eigen = std::move(eig);
  p.invertible = false;

  // ker(a): constants, plus the alternating vector when n is even.
  const Eigen::Index k = n % 2 == 0 ? 2 : 1;
  p.null_basis = CMatrix::Zero(n, k);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    p.null_basis(i, 0) = scale;
    if (k == 2) p.null_basis(i, 1) = i % 2 == 0 ? scale : -scale;
  }
  p.dx = 1.0 / static_cast<double>(n);
  return p;
}

SpaceProblem make_dahlquist(Complex lambda) {
  SpaceProblem p;
  p.kind = SpaceKind::kDahlquist;
  p.n = 1;
  p.a = CMatrix::Constant(1, 1, lambda);
  p.eigen = std::vector<Complex>{lambda};
  p.invertible = lambda != Complex(0.0);
  p.null_basis = p.invertible ? CMatrix::Zero(1, 0) : CMatrix::Ones(1, 1);
  p.dx = 1.0;
  return p;
}

SpaceProblem coarsen(const SpaceProblem& fine) {
  switch (fine.kind) {
    case SpaceKind::kHeatDirichlet: {
      if (fine.n < 3 || fine.n % 2 == 0) {
        throw Error(ErrorCode::kDimensionMismatch, "heat coarsening needs odd n >= 3, got " + std::to_string(fine.n));
      }
      SpaceProblem coarse = make_heat((fine.n - 1) / 2);
      coarse.a *= 0.25;
      for (Complex& z : *coarse.eigen) z *= 0.25;
      coarse.dx = 2.0 * fine.dx;
      return coarse;
    }
    case SpaceKind::kAdvectionPeriodic: {
      if (fine.n < 4 || fine.n % 2 != 0) {
        throw Error(ErrorCode::kDimensionMismatch, "advection coarsening needs even n >= 4, got " + std::to_string(fine.n));
      }
      SpaceProblem coarse = make_advection(fine.n / 2);
      coarse.a *= 0.5;
      for (Complex& z : *coarse.eigen) z *= 0.5;
      coarse.dx = 2.0 * fine.dx;
      return coarse;
    }
    case SpaceKind::kDahlquist:
      return fine;
  }
  return fine;
}

CMatrix null_projector(const SpaceProblem& problem) {
  return problem.null_basis * problem.null_basis.adjoint();
}

double cfl_number(const SpaceProblem& problem, double coefficient, double dt) {
  switch (problem.kind) {
    case SpaceKind::kHeatDirichlet:
      return coefficient * dt / (problem.dx * problem.dx);
    case SpaceKind::kAdvectionPeriodic:
      return coefficient * dt / problem.dx;
    case SpaceKind::kDahlquist:
      return dt;
  }
  return dt;
}

}  // namespace pintmg
