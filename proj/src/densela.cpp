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

#include "pintmg/densela.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pintmg {
namespace {

void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": matrix is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()));
  }
}

// Tarjan's algorithm without recursion; edge i -> j whenever a(i, j) != 0.
std::vector<std::vector<Eigen::Index>> strongly_connected_components(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  std::vector<std::vector<Eigen::Index>> adjacency(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j && a(i, j) != Complex(0.0)) adjacency[static_cast<std::size_t>(i)].push_back(j);
    }
  }

  std::vector<Eigen::Index> index(static_cast<std::size_t>(n), -1);
  std::vector<Eigen::Index> low(static_cast<std::size_t>(n), 0);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Index> stack;
  std::vector<std::pair<Eigen::Index, std::size_t>> calls;
  std::vector<std::vector<Eigen::Index>> components;
  Eigen::Index counter = 0;

  auto visit = [&](Eigen::Index v) {
    const auto uv = static_cast<std::size_t>(v);
    index[uv] = low[uv] = counter++;
    stack.push_back(v);
    on_stack[uv] = 1;
    calls.emplace_back(v, 0);
  };

  for (Eigen::Index root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    visit(root);
    while (!calls.empty()) {
      auto& [v, next] = calls.back();
      const auto uv = static_cast<std::size_t>(v);
      if (next < adjacency[uv].size()) {
        const Eigen::Index w = adjacency[uv][next++];
        const auto uw = static_cast<std::size_t>(w);
        if (index[uw] < 0) {
          visit(w);
        } else if (on_stack[uw]) {
          low[uv] = std::min(low[uv], index[uw]);
        }
        continue;
      }
      const Eigen::Index finished = v;
      const auto uf = static_cast<std::size_t>(finished);
      calls.pop_back();
      if (!calls.empty()) {
        const auto parent = static_cast<std::size_t>(calls.back().first);
        low[parent] = std::min(low[parent], low[uf]);
      }
      if (low[uf] == index[uf]) {
        std::vector<Eigen::Index> component;
        Eigen::Index w = -1;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          component.push_back(w);
        } while (w != finished);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
    }
  }
  return components;
}

void reduce_to_hessenberg(CMatrix& h) {
  const Eigen::Index n = h.rows();
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index m = n - k - 1;
    CVector v = h.col(k).segment(k + 1, m);
    const double xnorm = v.norm();
    if (xnorm == 0.0) continue;
    const Complex alpha = v(0) == Complex(0.0) ? Complex(-xnorm) : -std::polar(xnorm, std::arg(v(0)));
    v(0) -= alpha;
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    v /= vnorm;

    auto rows = h.block(k + 1, k, m, n - k);
    rows.noalias() -= 2.0 * v * (v.adjoint() * rows);
    auto cols = h.block(0, k + 1, n, m);
    cols.noalias() -= 2.0 * (cols * v) * v.adjoint();

    h(k + 1, k) = alpha;
    h.col(k).segment(k + 2, m - 1).setZero();
  }
}

struct Givens {
  double c = 1.0;
  Complex s{0.0, 0.0};
};

// [c s; -conj(s) c] [x; y] = [r; 0]
Givens make_givens(Complex x, Complex y) {
  if (y == Complex(0.0)) return {};
  if (x == Complex(0.0)) return {0.0, std::conj(y) / std::abs(y)};
  const double ax = std::abs(x);
  const double r = std::hypot(ax, std::abs(y));
  const Complex phase = x / ax;
  return {ax / r, phase * std::conj(y) / r};
}

struct QrResult {
  double max_discarded = 0.0;
  bool converged = true;
};

// Eigenvalues-only shifted QR on an upper Hessenberg matrix; the diagonal of h
// holds the eigenvalues on return.
QrResult hessenberg_qr(CMatrix& h, const Tolerances& tol) {
  const Eigen::Index n = h.rows();
  const double eps = std::numeric_limits<double>::epsilon();
  const double small = std::numeric_limits<double>::min() * (static_cast<double>(n) / eps);
  const long budget = static_cast<long>(tol.qr_budget_factor) * static_cast<long>(n) *
                      static_cast<long>(n);

  QrResult result;
  long total = 0;
  int iter = 0;
  Eigen::Index iu = n - 1;
  while (iu > 0) {
    Eigen::Index il = iu;
    for (; il > 0; --il) {
      const double sub = std::abs(h(il, il - 1));
      if (sub <= small) break;
      double tst = std::abs(h(il, il)) + std::abs(h(il - 1, il - 1));
      if (tst == 0.0) {
        if (il >= 2) tst += std::abs(h(il - 1, il - 2));
        if (il + 1 <= iu) tst += std::abs(h(il + 1, il));
      }
      if (sub <= eps * tst) break;
    }
    if (il > 0) {
      result.max_discarded = std::max(result.max_discarded, std::abs(h(il, il - 1)));
      h(il, il - 1) = 0.0;
    }
    if (il == iu) {
      --iu;
      iter = 0;
      continue;
    }
    if (total >= budget) {
      result.converged = false;
      break;
    }

    Complex shift;
    if (iter > 0 && iter % 10 == 0) {
      // exceptional shift breaks cycles of the Wilkinson shift
      shift = h(iu, iu) + 0.75 * std::abs(h(iu, iu - 1).real());
    } else {
      const Complex a = h(iu - 1, iu - 1);
      const Complex b = h(iu - 1, iu);
      const Complex c = h(iu, iu - 1);
      const Complex d = h(iu, iu);
      const Complex half_trace = 0.5 * (a + d);
      const Complex disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
      const Complex l1 = half_trace + disc;
      const Complex l2 = half_trace - disc;
      shift = std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
    }

    Complex x = h(il, il) - shift;
    Complex y = h(il + 1, il);
    for (Eigen::Index k = il; k < iu; ++k) {
      if (k > il) {
        x = h(k, k - 1);
        y = h(k + 1, k - 1);
      }
      const Givens g = make_givens(x, y);
      for (Eigen::Index j = std::max(il, k - 1); j <= iu; ++j) {
        const Complex p = h(k, j);
        const Complex q = h(k + 1, j);
        h(k, j) = g.c * p + g.s * q;
        h(k + 1, j) = -std::conj(g.s) * p + g.c * q;
      }
      if (k > il) h(k + 1, k - 1) = 0.0;
      const Eigen::Index last = std::min(k + 2, iu);
      for (Eigen::Index i = il; i <= last; ++i) {
        const Complex p = h(i, k);
        const Complex q = h(i, k + 1);
        h(i, k) = p * g.c + q * std::conj(g.s);
        h(i, k + 1) = -p * g.s + q * g.c;
      }
    }
    ++iter;
    ++total;
  }
  return result;
}

}  // namespace

const Tolerances& default_tolerances() {
  static const Tolerances tolerances{};
  return tolerances;
}

CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

CMatrix subdiagonal_shift(Eigen::Index l) {
  CMatrix e = CMatrix::Zero(l, l);
  for (Eigen::Index i = 1; i < l; ++i) e(i, i - 1) = 1.0;
  return e;
}

CMatrix matrix_power(const CMatrix& a, int k) {
  require_square(a, "matrix_power");
  if (k < 0) throw Error(ErrorCode::kInvalidArgument, "matrix_power: negative exponent");
  CMatrix result = identity(a.rows());
  CMatrix base = a;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

bool all_finite(const CMatrix& a) { return a.allFinite(); }

LuDecomposition::LuDecomposition(const CMatrix& a, const Tolerances& tol) : packed_(a) {
  require_square(a, "lu");
  if (!a.allFinite()) throw Error(ErrorCode::kInvalidArgument, "lu: non-finite entries");
  const Eigen::Index n = a.rows();
  perm_.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm_[static_cast<std::size_t>(i)] = i;
  const double scale = n > 0 ? a.cwiseAbs().maxCoeff() : 0.0;

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = 0;
    const double pivot = packed_.col(k).tail(n - k).cwiseAbs().maxCoeff(&p);
    p += k;
    if (!(pivot > tol.pivot * scale)) {
      throw Error(ErrorCode::kSingularMatrix,
                  "pivot " + std::to_string(pivot) + " in column " + std::to_string(k));
    }
    if (p != k) {
      packed_.row(k).swap(packed_.row(p));
      std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(p)]);
    }
    const Eigen::Index rest = n - k - 1;
    if (rest == 0) continue;
    packed_.col(k).tail(rest) /= packed_(k, k);
    packed_.bottomRightCorner(rest, rest).noalias() -=
        packed_.col(k).tail(rest) * packed_.row(k).tail(rest);
  }
}

void LuDecomposition::solve_in_place(Eigen::Ref<CMatrix> rhs) const {
  if (rhs.rows() != packed_.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "lu solve: right-hand side has wrong row count");
  }
  CMatrix permuted(rhs.rows(), rhs.cols());
  for (Eigen::Index i = 0; i < rhs.rows(); ++i) {
    permuted.row(i) = rhs.row(perm_[static_cast<std::size_t>(i)]);
  }
  packed_.triangularView<Eigen::UnitLower>().solveInPlace(permuted);
  packed_.triangularView<Eigen::Upper>().solveInPlace(permuted);
  rhs = permuted;
}

CMatrix LuDecomposition::solve(const CMatrix& rhs) const {
  CMatrix x = rhs;
  solve_in_place(x);
  return x;
}

CVector LuDecomposition::solve(const CVector& rhs) const {
  CMatrix x = rhs;
  solve_in_place(x);
  return x.col(0);
}

CMatrix LuDecomposition::inverse() const { return solve(identity(size())); }

CMatrix lu_solve(const CMatrix& a, const CMatrix& rhs, const Tolerances& tol) {
  return LuDecomposition(a, tol).solve(rhs);
}

LuFactors lu_factor_nopivot(const CMatrix& a, const Tolerances& tol) {
  require_square(a, "lu_factor_nopivot");
  const Eigen::Index n = a.rows();
  const double scale = n > 0 ? norm(a, NormKind::kInf) : 0.0;
  CMatrix work = a;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(std::abs(work(k, k)) > tol.pivot * scale)) {
      throw Error(ErrorCode::kZeroPivot, "leading pivot " + std::to_string(k) + " vanishes");
    }
    const Eigen::Index rest = n - k - 1;
    if (rest == 0) continue;
    work.col(k).tail(rest) /= work(k, k);
    work.bottomRightCorner(rest, rest).noalias() -= work.col(k).tail(rest) * work.row(k).tail(rest);
  }
  LuFactors factors;
  factors.lower = work.triangularView<Eigen::UnitLower>();
  factors.upper = work.triangularView<Eigen::Upper>();
  return factors;
}

Spectrum eigenvalues(const CMatrix& a, const Tolerances& tol) {
  require_square(a, "eigenvalues");
  if (!a.allFinite()) throw Error(ErrorCode::kInvalidArgument, "eigenvalues: non-finite entries");
  Spectrum spectrum;
  const Eigen::Index n = a.rows();
  spectrum.eigenvalues.reserve(static_cast<std::size_t>(n));
  const double fro = a.norm();
  if (fro == 0.0) {
    spectrum.eigenvalues.assign(static_cast<std::size_t>(n), Complex(0.0));
    return spectrum;
  }

  double discarded = 0.0;
  for (const auto& component : strongly_connected_components(a)) {
    const auto size = static_cast<Eigen::Index>(component.size());
    if (size == 1) {
      spectrum.eigenvalues.push_back(a(component[0], component[0]));
      continue;
    }
    CMatrix block(size, size);
    for (Eigen::Index j = 0; j < size; ++j) {
      for (Eigen::Index i = 0; i < size; ++i) {
        block(i, j) = a(component[static_cast<std::size_t>(i)], component[static_cast<std::size_t>(j)]);
      }
    }
    reduce_to_hessenberg(block);
    const QrResult qr = hessenberg_qr(block, tol);
    discarded = std::max(discarded, qr.max_discarded);
    spectrum.converged = spectrum.converged && qr.converged;
    for (Eigen::Index i = 0; i < size; ++i) spectrum.eigenvalues.push_back(block(i, i));
  }
  spectrum.residual_bound = discarded / fro;
  if (spectrum.residual_bound >= tol.eigen) spectrum.converged = false;
  return spectrum;
}

double spectral_radius(const CMatrix& a, const Tolerances& tol) {
  const Spectrum spectrum = eigenvalues(a, tol);
  if (!spectrum.converged) {
    throw Error(ErrorCode::kNoConvergence, "QR iteration did not converge");
  }
  double rho = 0.0;
  for (const Complex& lambda : spectrum.eigenvalues) rho = std::max(rho, std::abs(lambda));
  return rho;
}

double norm(const CMatrix& a, NormKind kind, const Tolerances& tol) {
  if (a.size() == 0) return 0.0;
  switch (kind) {
    case NormKind::kInf:
      return a.cwiseAbs().rowwise().sum().maxCoeff();
    case NormKind::kFro:
      return a.norm();
    case NormKind::kTwo:
      break;
  }

  const Eigen::Index n = a.cols();
  CVector v(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double t = static_cast<double>(j + 1) / static_cast<double>(n + 1);
    v(j) = Complex(1.0 + 0.37 * t, 0.11 * t * t);
  }
  v.normalize();
  double lambda = 0.0;
  for (int step = 0; step < tol.power_iteration_max_steps; ++step) {
    const CVector w = a.adjoint() * (a * v);
    lambda = v.dot(w).real();  // v^H w
    const double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;
    if ((w - lambda * v).norm() <= tol.power_iteration * std::abs(lambda)) break;
    v = w / wnorm;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace pintmg
