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

#include "pintmg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pintmg/parallel.hpp"

namespace pintmg {
namespace {

LuDecomposition factor_preconditioner(const CMatrix& block) {
  try {
    return LuDecomposition(block);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kSingularMatrix) throw;
    throw Error(ErrorCode::kSingularPreconditioner, err.what());
  }
}

double max_abs_eigenvalue(const std::vector<Complex>& eig) {
  double rho = 0.0;
  for (const Complex& z : eig) rho = std::max(rho, std::abs(z));
  return rho;
}

}  // namespace

CMatrix smoother_matrix(const CompositeSystem& sys, double omega) {
  const Eigen::Index b = sys.fine.block_size();
  const CMatrix block = identity(b) - sys.mu * kron(CMatrix(omega * sys.fine.coll.qdelta), sys.fine.space.a);
  const LuDecomposition lu = factor_preconditioner(block);
  CMatrix t(sys.size(), sys.size());
  for (Eigen::Index s = 0; s < sys.l; ++s) t.middleRows(s * b, b) = -lu.solve(CMatrix(sys.c.middleRows(s * b, b)));
  t.diagonal().array() += 1.0;
  return t;
}

CMatrix cgc_matrix(const CompositeSystem& sys) {
  const LuDecomposition lu = factor_preconditioner(sys.ptilde);
  CMatrix t = -(sys.transfer.tcf() * lu.solve(CMatrix(sys.transfer.tfc() * sys.c)));
  t.diagonal().array() += 1.0;
  return t;
}

CMatrix deflated_inverse(const CMatrix& a, const CMatrix& null_basis) {
  if (null_basis.cols() == 0) return LuDecomposition(a).inverse();
  const CMatrix p = null_basis * null_basis.adjoint();
  return LuDecomposition(CMatrix(a + p)).inverse() - p;
}

IterationMatrixSet build_iteration_matrices(const CompositeSystem& sys, int k, double omega) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "build_iteration_matrices: k must be >= 1");
  IterationMatrixSet set;
  set.k = k;
  set.omega = omega;
  set.t_s = smoother_matrix(sys, omega);
  set.t_cgc = cgc_matrix(sys);
  set.t_pfasst = matrix_power(set.t_s, k) * set.t_cgc;

  const Eigen::Index n = sys.size();
  const CMatrix il = identity(sys.l);
  set.t_s_zero = kron(sys.e, sys.h);
  const CMatrix tcf = sys.transfer.tcf();
  const CMatrix tfc = sys.transfer.tfc();
  set.t_cgc_zero = identity(n) - tcf * tfc;
  set.t_zero = matrix_power(set.t_s_zero, k) * set.t_cgc_zero;

  // The stiff limits need Q_delta^{-1}; they stay empty for explicit Q_delta.
  const auto& fine = sys.fine;
  const auto& coarse = sys.coarse;
  try {
    const CMatrix qdq = LuDecomposition(fine.coll.qdelta).solve(fine.coll.q) / omega;
    set.t_s_inf = kron(il, CMatrix(identity(fine.coll.m) - qdq), identity(fine.space.n));
    const CMatrix qd_coarse_inv = LuDecomposition(coarse.coll.qdelta).inverse();
    const CMatrix a_coarse_inv =
        coarse.space.invertible ? LuDecomposition(coarse.space.a).inverse()
                                : deflated_inverse(coarse.space.a, coarse.space.null_basis);
    set.t_cgc_inf_deflated = !coarse.space.invertible;
    set.t_cgc_inf = identity(n) - tcf * kron(il, qd_coarse_inv, a_coarse_inv) * tfc *
                                      kron(il, fine.coll.q, fine.space.a);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kSingularMatrix) throw;
    set.t_s_inf.resize(0, 0);
    set.t_cgc_inf.resize(0, 0);
  }
  return set;
}

SystemBuilder standard_builder(const Level& fine, Eigen::Index l, double omega) {
  return [fine, l, omega](Complex mu) { return assemble_standard(l, mu, fine, omega); };
}

std::vector<SweepPoint> specrad_sweep(const SystemBuilder& builder, const std::vector<Complex>& mu_grid, int k,
                                      SweepTarget target, double omega, int workers) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "specrad_sweep: k must be >= 1");
  std::vector<SweepPoint> points(mu_grid.size());
  parallel_for(
      mu_grid.size(),
      [&](std::size_t i) {
        SweepPoint& point = points[i];
        point.mu = mu_grid[i];
        try {
          const CompositeSystem sys = builder(point.mu);
          const CMatrix t_s = smoother_matrix(sys, omega);
          if (target == SweepTarget::kSmoother) {
            // rho(T^k) = rho(T)^k by the spectral mapping theorem.
            point.rho = std::pow(spectral_radius(t_s), k);
          } else {
            point.rho = spectral_radius(CMatrix(matrix_power(t_s, k) * cgc_matrix(sys)));
          }
        } catch (const Error& err) {
          point.ok = false;
          point.rho = std::numeric_limits<double>::quiet_NaN();
          point.error = err.what();
        }
      },
      workers);
  return points;
}

std::vector<HeatmapPoint> heatmap(double re_min, double re_max, double im_min, double im_max, int points, int k,
                                  Eigen::Index l, int m, QDeltaKind kind, int workers) {
  if (points < 1) throw Error(ErrorCode::kInvalidArgument, "heatmap: points must be >= 1");
  const Level level{make_collocation(m, kind), make_dahlquist(1.0)};
  auto coordinate = [points](double lo, double hi, int i) {
    return points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  };
  std::vector<Complex> grid;
  grid.reserve(static_cast<std::size_t>(points) * static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    for (int i = 0; i < points; ++i) grid.emplace_back(coordinate(re_min, re_max, i), coordinate(im_min, im_max, j));
  }
  const auto sweep = specrad_sweep(standard_builder(level, l), grid, k, SweepTarget::kSmoother, 1.0, workers);
  std::vector<HeatmapPoint> out;
  out.reserve(sweep.size());
  for (const SweepPoint& p : sweep) out.push_back({p.mu.real(), p.mu.imag(), p.rho, p.ok});
  return out;
}

PropertyNorms property_norms(const CompositeSystem& sys, int k, double omega, NormKind kind) {
  PropertyNorms out;
  const CMatrix c_inv = LuDecomposition(sys.c).inverse();
  const CMatrix coarse = sys.transfer.tcf() * factor_preconditioner(sys.ptilde).solve(sys.transfer.tfc());
  out.approx = norm(CMatrix(c_inv - coarse), kind);

  const CMatrix t_s = smoother_matrix(sys, 1.0);
  out.smooth = norm(CMatrix(sys.c * matrix_power(t_s, k)), kind);

  const CMatrix t_w = smoother_matrix(sys, omega);
  const CMatrix t_w_k = matrix_power(t_w, k);
  out.smooth_damped = norm(CMatrix(sys.c * t_w_k), kind);
  out.full_bound = out.approx * out.smooth_damped;

  const CMatrix t_cgc = cgc_matrix(sys);
  out.post_smoothing = norm(CMatrix(t_w_k * t_cgc), kind);
  out.pre_smoothing = norm(CMatrix(t_cgc * t_w_k), kind);

  // C = (P^/2)(I - B) and T = (I + B)/2 with B = 2T - I.
  out.reusken_bound = std::sqrt(8.0 / (std::numbers::pi * k)) * 0.5 * norm(sys.phat_omega(omega), kind);
  CMatrix b = 2.0 * t_w;
  b.diagonal().array() -= 1.0;
  out.damped_b_norm = norm(b, kind);
  return out;
}

double bnorm_inf_limit(int m, double omega, QDeltaKind kind) {
  if (!(omega > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bnorm_inf_limit: omega must be positive");
  const CollocationSpec spec = make_collocation(m, kind);
  const CMatrix qdq = LuDecomposition(spec.qdelta).solve(spec.q);
  return norm(CMatrix(identity(m) - (2.0 / omega) * qdq), NormKind::kInf);
}

std::vector<CMatrix> fourier_blocks(const CollocationSpec& spec, const std::vector<Complex>& lambdas, Complex mu,
                                    Eigen::Index l) {
  const CMatrix il = identity(l);
  const Eigen::Index size = l * spec.m;
  const CMatrix e_n = kron(subdiagonal_shift(l), spec.nmat);
  const CMatrix i_q = kron(il, spec.q);
  const CMatrix i_qd = kron(il, spec.qdelta);
  std::vector<CMatrix> blocks;
  blocks.reserve(lambdas.size());
  for (const Complex& lambda : lambdas) {
    const Complex z = mu * lambda;
    const CMatrix lhs = identity(size) - z * i_qd;
    const CMatrix rhs = identity(size) - z * i_q - e_n;
    blocks.push_back(identity(size) - LuDecomposition(lhs).solve(rhs));
  }
  return blocks;
}

SymbolEvaluator SymbolEvaluator::smoother_zero_limit(const CMatrix& nmat, Eigen::Index n) {
  const CMatrix h = kron(nmat, identity(n));
  return {SymbolKind::kSmootherZeroLimit, CMatrix::Zero(h.rows(), h.cols()), h};
}

SymbolEvaluator SymbolEvaluator::pfasst_zero_limit(const CMatrix& nmat, const TransferPair& transfer) {
  const Eigen::Index n = transfer.interp_space.rows();
  const CMatrix h = kron(nmat, identity(n));
  const CMatrix x = transfer.interp_nodes * transfer.restrict_nodes;
  const CMatrix y = transfer.interp_space * transfer.restrict_space;
  const CMatrix shifted = h * (identity(h.rows()) - kron(x, y));
  return {SymbolKind::kPfasstZeroLimit, CMatrix::Zero(h.rows(), h.cols()), shifted};
}

SymbolEvaluator SymbolEvaluator::smoother_block(const CollocationSpec& spec, Complex z) {
  const CMatrix fixed =
      LuDecomposition(CMatrix(identity(spec.m) - z * spec.qdelta)).solve(CMatrix(z * (spec.q - spec.qdelta)));
  return {SymbolKind::kSmootherBlock, fixed, spec.nmat};
}

SymbolSup symbol_sup(const SymbolEvaluator& evaluator, int x_samples) {
  if (x_samples < 2) throw Error(ErrorCode::kInvalidArgument, "symbol_sup: x_samples must be >= 2");
  SymbolSup best;
  best.value = -1.0;
  auto rho_at = [&](double x, bool& ok) {
    const Spectrum s = eigenvalues(evaluator(x));
    ok = s.converged;
    return max_abs_eigenvalue(s.eigenvalues);
  };
  const double pi = std::numbers::pi;
  const double h = 2.0 * pi / (x_samples - 1);
  for (int i = 0; i < x_samples; ++i) {
    const double x = -pi + h * i;
    bool ok = true;
    const double rho = rho_at(x, ok);
    if (!ok) {
      ++best.failed_points;
      continue;
    }
    if (rho > best.value) {
      best.value = rho;
      best.x = x;
    }
  }
  if (best.value < 0.0) throw Error(ErrorCode::kNoConvergence, "symbol_sup: no grid point converged");

  // Golden-section refinement on the neighbouring cells.
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::max(-pi, best.x - h);
  double b = std::min(pi, best.x + h);
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  bool ok_c = true, ok_d = true;
  double fc = rho_at(c, ok_c), fd = rho_at(d, ok_d);
  for (int iter = 0; iter < 80 && b - a > 1e-13; ++iter) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = rho_at(c, ok_c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = rho_at(d, ok_d);
    }
  }
  const double x_star = 0.5 * (a + b);
  bool ok = true;
  const double refined = rho_at(x_star, ok);
  if (ok && refined > best.value) {
    best.value = refined;
    best.x = x_star;
  }
  return best;
}

Rank1Check rank1_cgc_eigencheck(const TransferPair& transfer, const CMatrix& nmat) {
  const Eigen::Index m = nmat.rows();
  const Eigen::Index n = transfer.interp_space.rows();
  const CMatrix x = transfer.interp_nodes * transfer.restrict_nodes;
  const CMatrix y = transfer.interp_space * transfer.restrict_space;
  Rank1Check out;
  out.c = x.row(m - 1).sum().real();
  out.k_eigenvalues = eigenvalues(CMatrix(identity(n) - out.c * y)).eigenvalues;
  const CMatrix full = kron(nmat, identity(n)) * (identity(m * n) - kron(x, y));
  out.full_eigenvalues = eigenvalues(full).eigenvalues;
  std::vector<Complex> expected(static_cast<std::size_t>((m - 1) * n), Complex(0.0));
  expected.insert(expected.end(), out.k_eigenvalues.begin(), out.k_eigenvalues.end());
  out.mismatch = multiset_distance(out.full_eigenvalues, expected);
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::kInvalidArgument, "loglog_slope: need >= 2 pairs");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double multiset_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<char> used(b.size(), 0);
  double worst = 0.0;
  for (const Complex& z : a) {
    std::size_t best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && std::abs(z - b[j]) < best_distance) {
        best_distance = std::abs(z - b[j]);
        best = j;
      }
    }
    used[best] = 1;
    worst = std::max(worst, best_distance);
  }
  return worst;
}

}  // namespace pintmg
