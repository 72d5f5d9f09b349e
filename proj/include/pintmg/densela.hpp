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

#ifndef PINTMG_DENSELA_HPP
#define PINTMG_DENSELA_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "pintmg/error.hpp"

namespace pintmg {

using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CMatrix = Matrix<Complex>;
using CVector = Vector<Complex>;
using RMatrix = Matrix<double>;
using RVector = Vector<double>;

/// All numerical thresholds used by the dense kernels, in one place.
struct Tolerances {
  double solve = 1e-10;        // relative residual target for lu_solve
  double pivot = 1e-14;        // relative pivot threshold (LU, Doolittle)
  double eigen = 1e-12;        // subdiagonal annihilation, relative to ||a||_F
  double power_iteration = 1e-10;
  int power_iteration_max_steps = 200000;
  int qr_budget_factor = 100;  // QR steps allowed: factor * n^2
};

const Tolerances& default_tolerances();

enum class NormKind { kTwo, kInf, kFro };

/// Kronecker product; entry ((i,k),(j,l)) = a(i,j) * b(k,l).
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                      typename DerivedB::Scalar>::ReturnType;
  const Eigen::Index br = b.rows();
  const Eigen::Index bc = b.cols();
  Matrix<Scalar> out(a.rows() * br, a.cols() * bc);
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * br, j * bc, br, bc) = Scalar(a(i, j)) * b.template cast<Scalar>();
    }
  }
  return out;
}

/// kron(a, kron(b, c)), the shape every composite operator takes.
template <typename DerivedA, typename DerivedB, typename DerivedC>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
          const Eigen::MatrixBase<DerivedC>& c) {
  return kron(a, kron(b, c));
}

CMatrix identity(Eigen::Index n);

/// L x L matrix with ones on the first subdiagonal.
CMatrix subdiagonal_shift(Eigen::Index l);

CMatrix matrix_power(const CMatrix& a, int k);

/// LU factorization with partial pivoting, reusable for many right-hand sides.
class LuDecomposition {
 public:
  LuDecomposition() = default;
  explicit LuDecomposition(const CMatrix& a, const Tolerances& tol = default_tolerances());

  CMatrix solve(const CMatrix& rhs) const;
  CVector solve(const CVector& rhs) const;
  /// Solves in place on a column block, avoiding a temporary.
  void solve_in_place(Eigen::Ref<CMatrix> rhs) const;

  Eigen::Index size() const { return packed_.rows(); }
  CMatrix inverse() const;

 private:
  CMatrix packed_;                  // unit lower L below the diagonal, U on and above
  std::vector<Eigen::Index> perm_;  // row i of P*a is row perm_[i] of a
};

/// Solves a * x = rhs by partial-pivoting LU. Throws SingularMatrix.
CMatrix lu_solve(const CMatrix& a, const CMatrix& rhs, const Tolerances& tol = default_tolerances());

struct LuFactors {
  CMatrix lower;  // unit lower triangular
  CMatrix upper;
};

/// Doolittle factorization a = L U without pivoting. Throws ZeroPivot.
LuFactors lu_factor_nopivot(const CMatrix& a, const Tolerances& tol = default_tolerances());

struct Spectrum {
  std::vector<Complex> eigenvalues;
  bool converged = true;
  double residual_bound = 0.0;  // largest discarded subdiagonal, relative to ||a||_F
};

/// All eigenvalues of a square matrix.
///
/// The nonzero pattern is first permuted to block triangular form (strongly
/// connected components); each irreducible diagonal block is reduced to upper
/// Hessenberg form by Householder reflections and then iterated with
/// Wilkinson-shifted complex QR. The eigenvalues of reducible matrices are
/// therefore computed from their diagonal blocks and are not polluted by
/// rounding across exactly-zero couplings.
///
/// Does not throw on stagnation: `converged` is false and the eigenvalue list
/// holds the current diagonal of the partially reduced matrix.
Spectrum eigenvalues(const CMatrix& a, const Tolerances& tol = default_tolerances());

/// max |lambda|; throws NoConvergence if the QR iteration stagnated.
double spectral_radius(const CMatrix& a, const Tolerances& tol = default_tolerances());

/// Induced two-norm (power iteration on a^H a), infinity norm or Frobenius norm.
double norm(const CMatrix& a, NormKind kind, const Tolerances& tol = default_tolerances());

bool all_finite(const CMatrix& a);

}  // namespace pintmg

#endif  // PINTMG_DENSELA_HPP
