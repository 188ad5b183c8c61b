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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adiab/errors.hpp"
#include "adiab/linalg.hpp"
#include "adiab/rng.hpp"

using namespace adiab;

namespace {

Matrix rotation(double t) {
  Matrix r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

Matrix random_matrix(std::uint64_t seed, Eigen::Index n) {
  const NormalStream ns(seed, 7);
  Matrix a(n, n);
  std::uint64_t k = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c, k += 2) a(r, c) = cplx(ns.normal(k), ns.normal(k + 1));
  }
  return a;
}

// L1 = -(iH + G^2/2) for the two-level rotating model at angle t.
Matrix rotating_l1(double t) {
  const Matrix p1 = rotation(t) * Eigen::Vector2cd(0, 1).asDiagonal() * rotation(t).adjoint();
  return cplx(0, -1) * p1 - 0.5 * p1;
}

}  // namespace

TEST_CASE("spectral_decompose sorts eigenvalues and reconstructs the matrix") {
  Matrix a(3, 3);
  a << 2, 1, 0, 0, -1, 0, 0, 0, cplx(0, 3);
  const auto sd = spectral_decompose(a);
  REQUIRE(sd.eigenvalues.size() == 3);
  CHECK(sd.eigenvalues[0].real() == doctest::Approx(-1.0));
  CHECK(sd.eigenvalues[1].real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sd.eigenvalues[1].imag() == doctest::Approx(3.0));
  CHECK(sd.eigenvalues[2].real() == doctest::Approx(2.0));
  for (int k = 0; k < 3; ++k) {
    const Vector v = sd.eigenvectors.col(k);
    CHECK((a * v - sd.eigenvalues[static_cast<std::size_t>(k)] * v).norm() < 1e-12);
  }
}

TEST_CASE("spectral_decompose rejects defective and oversized inputs") {
  Matrix jordan(2, 2);
  jordan << 0, 1, 0, 0;
  CHECK_THROWS_AS(spectral_decompose(jordan), DefectiveMatrix);
  CHECK_THROWS_AS(spectral_decompose(Matrix::Identity(17, 17)), DimensionTooLarge);
  CHECK_NOTHROW(spectral_decompose(Matrix::Identity(17, 17), 1e-9, 32));
}

TEST_CASE("random non-normal matrices decompose with small residual") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix a = random_matrix(seed, 4);
    const auto sd = spectral_decompose(a);
    Eigen::VectorXcd lam(4);
    for (int k = 0; k < 4; ++k) lam(k) = sd.eigenvalues[static_cast<std::size_t>(k)];
    const Matrix rec = sd.eigenvectors * lam.asDiagonal() * sd.eigenvectors.inverse();
    CHECK((rec - a).norm() < 1e-9 * a.norm());
  }
}

TEST_CASE("hermitian_decompose returns an orthonormal eigenbasis") {
  const Matrix x = random_matrix(3, 5);
  const Matrix h = x + x.adjoint();
  const auto hd = hermitian_decompose(h);
  CHECK((hd.eigenvectors.adjoint() * hd.eigenvectors - Matrix::Identity(5, 5)).norm() < 1e-12);
  const Matrix rec = hd.eigenvectors * hd.eigenvalues.cast<cplx>().asDiagonal() *
                     hd.eigenvectors.adjoint();
  CHECK((rec - h).norm() < 1e-12);
  for (int k = 1; k < 5; ++k) CHECK(hd.eigenvalues(k - 1) <= hd.eigenvalues(k));
}

TEST_CASE("kernel_projection of the rotating generator is psi0 psi0^T") {
  for (double t : {0.0, 0.3, 0.785}) {
    const Matrix p = kernel_projection(rotating_l1(t));
    Vector psi0(2);
    psi0 << std::cos(t), std::sin(t);
    CHECK((p - psi0 * psi0.adjoint()).norm() < 1e-12);
    CHECK((p * p - p).norm() < 1e-12);
  }
}

TEST_CASE("kernel_projection of a non-normal generator projects along the range") {
  Matrix l1(2, 2);
  l1 << 0, 1, 0, -2;
  const Matrix p = kernel_projection(l1);
  CHECK((p * p - p).norm() < 1e-12);
  CHECK((l1 * p).norm() < 1e-12);
  CHECK((p * l1).norm() < 1e-12);
}

TEST_CASE("small nonzero eigenvalues are a gap violation") {
  const Matrix l1 = Eigen::Vector2cd(0.0, -1e-7).asDiagonal();
  CHECK_THROWS_AS(kernel_projection(l1), GapViolation);
  const Matrix ok = Eigen::Vector2cd(0.0, -1e-3).asDiagonal();
  CHECK_NOTHROW(kernel_projection(ok));
  CHECK_THROWS_AS(kernel_projection(Matrix(Matrix::Identity(2, 2))), GapViolation);
}

TEST_CASE("reduced_inverse inverts on the range and rejects kernel components") {
  const cplx lam(-0.5, -1.0);
  const Matrix l1 = Eigen::Vector2cd(0.0, lam).asDiagonal();
  Vector v(2);
  v << 0, 1;
  const Vector w = reduced_inverse(l1, v);
  CHECK(std::abs(w(0)) < 1e-15);
  CHECK(std::abs(w(1) - 1.0 / lam) < 1e-14);
  v << 1e-3, 1;
  CHECK_THROWS_AS(reduced_inverse(l1, v), NotInRange);
  CHECK_NOTHROW(reduced_inverse(l1, v, kDefaultGapTol, 1e-6, 1e4));
}

TEST_CASE("expm of a rotation generator is the rotation") {
  Matrix gen(2, 2);
  gen << 0, -0.7, 0.7, 0;
  CHECK((expm(gen) - rotation(0.7)).norm() < 1e-14);
  const Matrix d = Eigen::Vector2cd(cplx(0, 2), -1.0).asDiagonal();
  CHECK(std::abs(expm(d)(0, 0) - std::exp(cplx(0, 2))) < 1e-14);
  CHECK(std::abs(expm(d)(1, 1) - std::exp(-1.0)) < 1e-14);
}

TEST_CASE("operator_norm, hermitian part and hermiticity checks") {
  CHECK(operator_norm(rotation(0.4)) == doctest::Approx(1.0));
  const Matrix d = Eigen::Vector2cd(cplx(-1, 3), cplx(0.25, -2)).asDiagonal();
  CHECK(max_hermitian_part(d) == doctest::Approx(0.25));
  CHECK(is_hermitian(rotation(0.0), 1e-12));
  CHECK_FALSE(is_hermitian(rotation(0.4), 1e-12));
}

TEST_CASE("OperatorFamily finite-difference derivative") {
  const OperatorFamily f(1, [](double s) { return Matrix::Constant(1, 1, cplx(s * s * s, s)); });
  for (double s : {0.0, 0.5, 1.0}) {
    const cplx d = f.derivative(s)(0, 0);
    CHECK(d.real() == doctest::Approx(3 * s * s).epsilon(1e-8));
    CHECK(d.imag() == doctest::Approx(1.0).epsilon(1e-8));
  }
  const OperatorFamily c = OperatorFamily::constant(rotation(0.2));
  CHECK(c.derivative(0.3).norm() < 1e-12);
  CHECK(OperatorFamily::zero(3)(0.5).norm() == 0.0);
}
