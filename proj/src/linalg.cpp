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

#include "adiab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "adiab/errors.hpp"

namespace adiab {

OperatorFamily::OperatorFamily(std::size_t dim, Evaluator eval, Evaluator derivative,
                               int smoothness_order, double fd_step)
    : dim_(dim),
      eval_(std::move(eval)),
      deriv_(std::move(derivative)),
      smoothness_(smoothness_order),
      fd_step_(fd_step) {}

OperatorFamily OperatorFamily::constant(const Matrix& a) {
  const auto dim = static_cast<std::size_t>(a.rows());
  return OperatorFamily(
      dim, [a](double) { return a; },
      [dim](double) { return Matrix::Zero(dim, dim).eval(); }, 100);
}

OperatorFamily OperatorFamily::zero(std::size_t dim) {
  return constant(Matrix::Zero(dim, dim));
}

Matrix OperatorFamily::operator()(double s) const { return eval_(s); }

Matrix OperatorFamily::derivative(double s) const {
  if (deriv_) return deriv_(s);
  const double h = fd_step_;
  if (s - h < 0.0) {
    return (-3.0 * eval_(s) + 4.0 * eval_(s + h) - eval_(s + 2 * h)) / (2 * h);
  }
  if (s + h > 1.0) {
    return (3.0 * eval_(s) - 4.0 * eval_(s - h) + eval_(s - 2 * h)) / (2 * h);
  }
  return (eval_(s + h) - eval_(s - h)) / (2 * h);
}

SpectralDecomposition spectral_decompose(const Matrix& a, double tol, std::size_t max_dim,
                                         double max_condition) {
  const auto n = static_cast<std::size_t>(a.rows());
  if (n == 0 || a.rows() != a.cols()) throw DefectiveMatrix("matrix must be square and non-empty");
  if (n > max_dim) {
    throw DimensionTooLarge("dimension " + std::to_string(n) + " exceeds maximum " +
                            std::to_string(max_dim));
  }
  if (!a.allFinite()) throw DefectiveMatrix("matrix has non-finite entries");

  Eigen::ComplexEigenSolver<Matrix> solver(a, true);
  if (solver.info() != Eigen::Success) throw DefectiveMatrix("eigen-solver did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& vals = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (vals[i].real() != vals[j].real()) return vals[i].real() < vals[j].real();
    return vals[i].imag() < vals[j].imag();
  });

  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = vals[order[k]];
    Vector v = solver.eigenvectors().col(order[k]);
    out.eigenvectors.col(k) = v / v.norm();
  }

  Eigen::JacobiSVD<Matrix> svd(out.eigenvectors);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  out.condition_estimate = smin > 0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  if (!(out.condition_estimate <= max_condition)) {
    throw DefectiveMatrix("eigenvector matrix is ill-conditioned (cond = " +
                          std::to_string(out.condition_estimate) + ")");
  }
  const double scale = std::max(1.0, a.norm());
  for (std::size_t k = 0; k < n; ++k) {
    const double res = (a * out.eigenvectors.col(k) - out.eigenvalues[k] * out.eigenvectors.col(k)).norm();
    if (res > tol * scale) {
      throw DefectiveMatrix("eigenpair residual " + std::to_string(res) + " above tolerance");
    }
  }
  return out;
}

HermitianDecomposition hermitian_decompose(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw DefectiveMatrix("Hermitian eigen-solver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

struct KernelSplit {
  SpectralDecomposition spec;
  Matrix dual;  // inverse of the eigenvector matrix; row k is the dual of column k
  std::vector<bool> in_kernel;
};

KernelSplit split_kernel(const Matrix& l1, double gap_tol) {
  KernelSplit out{spectral_decompose(l1), {}, {}};
  const double zero_tol = 1e-3 * gap_tol * std::max(1.0, l1.norm());
  std::size_t kernel_dim = 0;
  for (const cplx& lambda : out.spec.eigenvalues) {
    const double mag = std::abs(lambda);
    if (mag <= zero_tol) {
      out.in_kernel.push_back(true);
      ++kernel_dim;
    } else if (mag <= gap_tol) {
      throw GapViolation("eigenvalue " + std::to_string(mag) +
                         " is within gap_tol of 0 but not in the kernel");
    } else {
      out.in_kernel.push_back(false);
    }
  }
  if (kernel_dim == 0) throw GapViolation("0 is not an eigenvalue (empty kernel)");
  out.dual = out.spec.eigenvectors.inverse();
  return out;
}

}  // namespace

Matrix kernel_projection(const Matrix& l1, double gap_tol) {
  const KernelSplit split = split_kernel(l1, gap_tol);
  const auto n = l1.rows();
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (split.in_kernel[k]) p += split.spec.eigenvectors.col(k) * split.dual.row(k);
  }
  return p;
}

Vector reduced_inverse(const Matrix& l1, const Vector& v, double gap_tol, double range_tol,
                       double reference_norm) {
  const KernelSplit split = split_kernel(l1, gap_tol);
  const auto n = l1.rows();
  const Vector coeff = split.dual * v;
  Vector kernel_part = Vector::Zero(n);
  Vector w = Vector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (split.in_kernel[k]) {
      kernel_part += coeff(k) * split.spec.eigenvectors.col(k);
    } else {
      w += (coeff(k) / split.spec.eigenvalues[k]) * split.spec.eigenvectors.col(k);
    }
  }
  const double scale = std::max(v.norm(), reference_norm);
  if (kernel_part.norm() > range_tol * scale) {
    throw NotInRange("vector has a kernel component of relative size " +
                     std::to_string(kernel_part.norm() / scale));
  }
  return w;
}

Matrix expm(const Matrix& a) { return a.exp(); }

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double max_hermitian_part(const Matrix& a) {
  const Matrix h = 0.5 * (a + a.adjoint());
  return hermitian_decompose(h).eigenvalues.maxCoeff();
}

bool is_hermitian(const Matrix& a, double tol) { return (a - a.adjoint()).norm() <= tol; }

}  // namespace adiab
