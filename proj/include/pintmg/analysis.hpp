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

#ifndef PINTMG_ANALYSIS_HPP
#define PINTMG_ANALYSIS_HPP

#include <functional>
#include <string>
#include <vector>

#include "pintmg/composite.hpp"

namespace pintmg {

/// Iteration matrices of one composite system and their mu -> 0 and mu -> inf
/// limits. Smoothing is applied after the coarse-grid correction.
struct IterationMatrixSet {
  int k = 1;
  double omega = 1.0;
  CMatrix t_s;         // I - P^_omega^{-1} C
  CMatrix t_cgc;       // I - T_C^F P~^{-1} T_F^C C
  CMatrix t_pfasst;    // t_s^k t_cgc
  CMatrix t_s_zero;    // E (x) H
  CMatrix t_s_inf;     // I_L (x) (I_M - omega^{-1} Q_delta^{-1} Q) (x) I_N
  CMatrix t_cgc_zero;  // I - T_C^F T_F^C
  CMatrix t_cgc_inf;   // I - T_C^F (I_L (x) Q~_delta (x) A~)^+ T_F^C (I_L (x) Q (x) A)
  CMatrix t_zero;      // (E (x) H)^k (I - T_C^F T_F^C)
  bool t_cgc_inf_deflated = false;  // A~ singular: pseudo-inverse on ker(A~)^perp
};

IterationMatrixSet build_iteration_matrices(const CompositeSystem& sys, int k, double omega = 1.0);

/// I - P^_omega^{-1} C, using the block-diagonal structure of P^.
CMatrix smoother_matrix(const CompositeSystem& sys, double omega = 1.0);

/// I - T_C^F P~^{-1} T_F^C C.
CMatrix cgc_matrix(const CompositeSystem& sys);

/// Inverse of a, or (a + P)^{-1} - P with P the projector onto the given
/// orthonormal null-space basis (the pseudo-inverse when a is normal).
CMatrix deflated_inverse(const CMatrix& a, const CMatrix& null_basis);

enum class SweepTarget { kSmoother, kPfasst };

struct SweepPoint {
  Complex mu;
  double rho = 0.0;
  bool ok = true;
  std::string error;
};

using SystemBuilder = std::function<CompositeSystem(Complex mu)>;

/// Builder for assemble_standard at fixed L and omega.
SystemBuilder standard_builder(const Level& fine, Eigen::Index l, double omega = 1.0);

/// rho(T_S^k) or rho(T_S^k T_CGC) at each mu. Failures are recorded per
/// point and the sweep continues. Points run on up to `workers` threads.
std::vector<SweepPoint> specrad_sweep(const SystemBuilder& builder, const std::vector<Complex>& mu_grid, int k,
                                      SweepTarget target, double omega = 1.0, int workers = 1);

struct HeatmapPoint {
  double re = 0.0;
  double im = 0.0;
  double rho = 0.0;
  bool ok = true;
};

/// rho(T_S^k) for the Dahlquist problem at dt*lambda = re + i im over a
/// points x points grid spanning [re_min, re_max] x [im_min, im_max].
std::vector<HeatmapPoint> heatmap(double re_min, double re_max, double im_min, double im_max, int points, int k,
                                  Eigen::Index l, int m, QDeltaKind kind, int workers = 1);

struct PropertyNorms {
  double approx = 0.0;         // ||C^{-1} - T_C^F P~^{-1} T_F^C||
  double smooth = 0.0;         // ||C T_S^k||
  double smooth_damped = 0.0;  // ||C T_{S,omega}^k||
  double full_bound = 0.0;     // approx * smooth_damped
  double post_smoothing = 0.0; // ||T_{S,omega}^k T_CGC||
  double pre_smoothing = 0.0;  // ||T_CGC T_{S,omega}^k||
  double reusken_bound = 0.0;  // sqrt(8 / (pi k)) ||P^_omega / 2||, the damped bound for omega = 2
  double damped_b_norm = 0.0;  // ||I - 2 P^_omega^{-1} C||, must be <= 1 for the damped bound
};

/// Throws SingularMatrix when C is singular.
PropertyNorms property_norms(const CompositeSystem& sys, int k, double omega = 2.0, NormKind kind = NormKind::kInf);

/// ||I_M - (2 / omega) Q_delta^{-1} Q||_inf.
double bnorm_inf_limit(int m, double omega, QDeltaKind kind);

/// B_n = I - (I - mu lambda_n I_L (x) Q_delta)^{-1} (I - mu lambda_n I_L (x) Q - E (x) N).
std::vector<CMatrix> fourier_blocks(const CollocationSpec& spec, const std::vector<Complex>& lambdas, Complex mu,
                                    Eigen::Index l);

enum class SymbolKind { kSmootherZeroLimit, kPfasstZeroLimit, kSmootherBlock };

/// Matrix-valued function of x in [-pi, pi].
class SymbolEvaluator {
 public:
  /// e^{-ix} (N (x) I_n).
  static SymbolEvaluator smoother_zero_limit(const CMatrix& nmat, Eigen::Index n);
  /// e^{-ix} H (I - T_{C,Q}^F T_{F,Q}^C (x) T_{C,A}^F T_{F,A}^C) for one step.
  static SymbolEvaluator pfasst_zero_limit(const CMatrix& nmat, const TransferPair& transfer);
  /// (I - z Q_delta)^{-1} z (Q - Q_delta) + e^{-ix} N with z = mu lambda_n.
  static SymbolEvaluator smoother_block(const CollocationSpec& spec, Complex z);

  SymbolKind kind() const { return kind_; }
  Eigen::Index size() const { return fixed_.rows(); }
  CMatrix operator()(double x) const { return fixed_ + std::polar(1.0, -x) * shifted_; }

 private:
  SymbolEvaluator(SymbolKind kind, CMatrix fixed, CMatrix shifted)
      : kind_(kind), fixed_(std::move(fixed)), shifted_(std::move(shifted)) {}
  SymbolKind kind_;
  CMatrix fixed_;    // x-independent part
  CMatrix shifted_;  // coefficient of e^{-ix}
};

struct SymbolSup {
  double value = 0.0;
  double x = 0.0;
  int failed_points = 0;
};

/// max over a uniform grid of [-pi, pi] of rho(symbol(x)), refined by a
/// golden-section search around the best grid point.
SymbolSup symbol_sup(const SymbolEvaluator& evaluator, int x_samples = 721);

struct Rank1Check {
  std::vector<Complex> k_eigenvalues;     // eig(I - c T_{C,A}^F T_{F,A}^C)
  std::vector<Complex> full_eigenvalues;  // eig(H (I - T_{C,Q}^F T_{F,Q}^C (x) T_{C,A}^F T_{F,A}^C))
  double c = 0.0;                         // last-row sum of T_{C,Q}^F T_{F,Q}^C
  double mismatch = 0.0;                  // multiset distance to {0 x (M-1)N} + eig(K)
};

Rank1Check rank1_cgc_eigencheck(const TransferPair& transfer, const CMatrix& nmat);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Greedy nearest-neighbour distance between two eigenvalue multisets.
double multiset_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

}  // namespace pintmg

#endif  // PINTMG_ANALYSIS_HPP
