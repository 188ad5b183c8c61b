// Copyright 2026 The adiab Authors
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

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace adiab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr std::size_t kDefaultMaxDim = 16;
inline constexpr double kDefaultGapTol = 1e-6;

/// Time-dependent d x d matrix s -> A(s) on [0, 1].
///
/// The derivative comes from an analytic closure when one is supplied and
/// otherwise from a second-order finite difference with step `fd_step`
/// (central in the interior, one-sided within `fd_step` of an endpoint so the
/// evaluator is never called outside [0, 1]).
class OperatorFamily {
 public:
  using Evaluator = std::function<Matrix(double)>;

  OperatorFamily() = default;
  OperatorFamily(std::size_t dim, Evaluator eval, Evaluator derivative = {},
                 int smoothness_order = 3, double fd_step = 1e-5);

  /// Constant family A(s) = a.
  static OperatorFamily constant(const Matrix& a);
  static OperatorFamily zero(std::size_t dim);

  std::size_t dim() const { return dim_; }
  int smoothness_order() const { return smoothness_; }
  bool has_analytic_derivative() const { return static_cast<bool>(deriv_); }

  Matrix operator()(double s) const;
  Matrix derivative(double s) const;

 private:
  std::size_t dim_ = 0;
  Evaluator eval_;
  Evaluator deriv_;
  int smoothness_ = 3;
  double fd_step_ = 1e-5;
};

struct SpectralDecomposition {
  std::vector<cplx> eigenvalues;
  /// Unit-norm right eigenvectors, column k pairs with eigenvalues[k].
  Matrix eigenvectors;
  /// 2-norm condition number of the eigenvector matrix.
  double condition_estimate = 1.0;
};

/// Eigendecomposition of a general complex matrix.
///
/// Eigenvalues are sorted lexicographically on (Re, Im). Throws
/// DefectiveMatrix when the eigenvector matrix is numerically singular
/// (condition number above `max_condition`) or a residual exceeds `tol`.
SpectralDecomposition spectral_decompose(const Matrix& a, double tol = 1e-9,
                                         std::size_t max_dim = kDefaultMaxDim,
                                         double max_condition = 1e10);

/// Hermitian path: real eigenvalues ascending, orthonormal eigenvectors.
struct HermitianDecomposition {
  Eigen::VectorXd eigenvalues;
  Matrix eigenvectors;
};
HermitianDecomposition hermitian_decompose(const Matrix& a);

/// Projection onto ker L1 along ran L1.
Matrix kernel_projection(const Matrix& l1, double gap_tol = kDefaultGapTol);

/// The unique w with L1 w = v and P w = 0, for v in ran L1. The kernel
/// component of v may not exceed range_tol * max(|v|, reference_norm).
Vector reduced_inverse(const Matrix& l1, const Vector& v,
                       double gap_tol = kDefaultGapTol,
                       double range_tol = 1e-6, double reference_norm = 0.0);

/// Matrix exponential (scaling and squaring with a Pade approximant).
Matrix expm(const Matrix& a);

/// Largest singular value.
double operator_norm(const Matrix& a);

/// Largest eigenvalue of (A + A^*)/2.
double max_hermitian_part(const Matrix& a);

bool is_hermitian(const Matrix& a, double tol);

}  // namespace adiab
