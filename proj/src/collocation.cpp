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

#include "pintmg/collocation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace pintmg {
namespace {

constexpr double kNodeTolerance = 1e-14;

void check_nodes(const std::vector<double>& nodes) {
  if (nodes.empty()) throw Error(ErrorCode::kInvalidArgument, "empty node list");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(nodes[i] > 0.0 && nodes[i] <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "node outside (0, 1]");
    }
    if (i > 0 && std::abs(nodes[i] - nodes[i - 1]) < kNodeTolerance) {
      throw Error(ErrorCode::kDuplicateNodes, "nodes " + std::to_string(i - 1) + " and " +
                                                  std::to_string(i) + " coincide");
    }
    if (i > 0 && nodes[i] < nodes[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "nodes not increasing");
    }
  }
}

// f(t) = P_m(t) - P_{m-1}(t) and its derivative, by the three-term recurrence.
struct RadauPoly {
  double value;
  double derivative;
};

RadauPoly radau_poly(int m, double t) {
  double p_prev = 1.0, p = t;      // P_0, P_1
  double d_prev = 0.0, d = 1.0;    // P_0', P_1'
  if (m == 1) return {p - p_prev, d - d_prev};
  for (int n = 1; n < m; ++n) {
    const double p_next = ((2.0 * n + 1.0) * t * p - n * p_prev) / (n + 1.0);
    const double d_next = d_prev + (2.0 * n + 1.0) * p;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p - p_prev, d - d_prev};
}

// g(t) = f(t) / (t - 1) has the m - 1 interior roots; g' by the quotient rule.
RadauPoly deflated(int m, double t) {
  const RadauPoly f = radau_poly(m, t);
  const double s = t - 1.0;
  return {f.value / s, (f.derivative * s - f.value) / (s * s)};
}

double safeguarded_newton(int m, double lo, double hi) {
  double g_lo = deflated(m, lo).value;
  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const RadauPoly g = deflated(m, t);
    if (g.value == 0.0) return t;
    if ((g.value < 0.0) == (g_lo < 0.0)) {
      lo = t;
      g_lo = g.value;
    } else {
      hi = t;
    }
    double next = t - g.value / g.derivative;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
    const double step = std::abs(next - t);
    t = next;
    if (step < 1e-16 || hi - lo < 1e-16) return t;
  }
  throw Error(ErrorCode::kNoConvergence, "Radau root iteration stalled");
}

}  // namespace

std::string_view to_string(QDeltaKind kind) {
  switch (kind) {
    case QDeltaKind::kLU:
      return "LU";
    case QDeltaKind::kIE:
      return "IE";
    case QDeltaKind::kEE:
      return "EE";
  }
  return "?";
}

QDeltaKind parse_qdelta_kind(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  if (upper == "LU") return QDeltaKind::kLU;
  if (upper == "IE") return QDeltaKind::kIE;
  if (upper == "EE") return QDeltaKind::kEE;
  throw Error(ErrorCode::kInvalidArgument, "unknown qdelta kind '" + std::string(text) + "'");
}

std::vector<double> radau_right_nodes(int m) {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "radau_right_nodes: m must be >= 1");
  std::vector<double> roots;
  if (m > 1) {
    // Bracket the sign changes of g on a fine grid of (-1, 1), then refine.
    const int cells = 400 * m;
    double prev_t = -1.0;
    double prev_g = deflated(m, prev_t).value;
    for (int i = 1; i <= cells; ++i) {
      const double t = -1.0 + 2.0 * i / (cells + 1.0);
      const double g = deflated(m, t).value;
      if (g == 0.0) {
        roots.push_back(t);
      } else if ((g < 0.0) != (prev_g < 0.0) && prev_g != 0.0) {
        roots.push_back(safeguarded_newton(m, prev_t, t));
      }
      prev_t = t;
      prev_g = g;
    }
    if (roots.size() != static_cast<std::size_t>(m - 1)) {
      throw Error(ErrorCode::kNoConvergence, "found " + std::to_string(roots.size()) +
                                                 " Radau roots, expected " + std::to_string(m - 1));
    }
  }
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(m));
  for (double t : roots) nodes.push_back(0.5 * (t + 1.0));
  nodes.push_back(1.0);
  return nodes;
}

CMatrix build_q(const std::vector<double>& nodes) {
  check_nodes(nodes);
  const auto m = static_cast<Eigen::Index>(nodes.size());
  CMatrix q(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    // Monomial coefficients of l_j, lowest degree first.
    std::vector<double> coeff{1.0};
    for (Eigen::Index k = 0; k < m; ++k) {
      if (k == j) continue;
      const double denom = nodes[static_cast<std::size_t>(j)] - nodes[static_cast<std::size_t>(k)];
      const double root = nodes[static_cast<std::size_t>(k)];
      std::vector<double> next(coeff.size() + 1, 0.0);
      for (std::size_t p = 0; p < coeff.size(); ++p) {
        next[p + 1] += coeff[p] / denom;
        next[p] -= root * coeff[p] / denom;
      }
      coeff = std::move(next);
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      const double tau = nodes[static_cast<std::size_t>(i)];
      double integral = 0.0;
      double power = tau;
      for (std::size_t p = 0; p < coeff.size(); ++p) {
        integral += coeff[p] * power / static_cast<double>(p + 1);
        power *= tau;
      }
      q(i, j) = integral;
    }
  }
  return q;
}

CMatrix build_qdelta(const CMatrix& q, const std::vector<double>& nodes, QDeltaKind kind) {
  check_nodes(nodes);
  const auto m = static_cast<Eigen::Index>(nodes.size());
  if (q.rows() != m || q.cols() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "build_qdelta: q does not match the nodes");
  }
  CMatrix qdelta = CMatrix::Zero(m, m);
  switch (kind) {
    case QDeltaKind::kLU:
      qdelta = lu_factor_nopivot(q.transpose()).upper.transpose();
      break;
    case QDeltaKind::kIE:
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
          const double left = j == 0 ? 0.0 : nodes[static_cast<std::size_t>(j - 1)];
          qdelta(i, j) = nodes[static_cast<std::size_t>(j)] - left;
        }
      }
      break;
    case QDeltaKind::kEE:
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
          qdelta(i, j) = nodes[static_cast<std::size_t>(j + 1)] - nodes[static_cast<std::size_t>(j)];
        }
      }
      break;
  }
  return qdelta;
}

CMatrix build_nmat(int m) {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "build_nmat: m must be >= 1");
  CMatrix n = CMatrix::Zero(m, m);
  n.col(m - 1).setOnes();
  return n;
}

RVector lagrange_values(const std::vector<double>& nodes, double x) {
  check_nodes(nodes);
  const auto m = static_cast<Eigen::Index>(nodes.size());
  RVector values(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    double v = 1.0;
    const double tj = nodes[static_cast<std::size_t>(j)];
    for (Eigen::Index k = 0; k < m; ++k) {
      if (k == j) continue;
      const double tk = nodes[static_cast<std::size_t>(k)];
      v *= (x - tk) / (tj - tk);
    }
    values(j) = v;
  }
  return values;
}

CollocationSpec make_collocation(int m, QDeltaKind kind) {
  CollocationSpec spec;
  spec.m = m;
  spec.nodes = radau_right_nodes(m);
  spec.q = build_q(spec.nodes);
  spec.qdelta = build_qdelta(spec.q, spec.nodes, kind);
  spec.qdelta_kind = kind;
  spec.nmat = build_nmat(m);
  return spec;
}

}  // namespace pintmg
