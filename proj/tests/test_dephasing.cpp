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
#include <numeric>
#include <sstream>

#include "adiab/dephasing.hpp"
#include "adiab/errors.hpp"
#include "adiab/stats.hpp"

using namespace adiab;

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kTheta = kPi / 4.0;

SchemeConfig scheme(Scheme s) {
  SchemeConfig c;
  c.scheme = s;
  return c;
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

TEST_CASE("constant model has a constant frame and no transitions") {
  DephasingModel m;
  m.H = OperatorFamily::constant(pauli_z());
  m.G = OperatorFamily::constant(0.5 * pauli_z());
  const auto f = build_frame(m, 100);
  CHECK(f.energies[0](0) == doctest::Approx(-1.0));
  CHECK(f.energies[0](1) == doctest::Approx(1.0));
  for (const auto& d : f.psi_dot) CHECK(d.norm() < 1e-12);
  const auto c = transition_coefficients(f);
  for (const auto& t : c.t) CHECK(t.norm() < 1e-12);
}

TEST_CASE("rotating model frame: levels, overlaps and gauge") {
  const auto m = DephasingModel::rotating_dephasing();
  const std::size_t steps = 1000;
  const auto f = build_frame(m, steps);
  CHECK(f.reference == 0);
  double worst_overlap = 0.0, worst_connection = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    CHECK(f.energies[i](0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.energies[i](1) == doctest::Approx(1.0));
    CHECK(f.couplings[i](1) == doctest::Approx(1.0));
    const cplx ov = f.psi[i].col(1).dot(f.psi_dot[i].col(0));
    worst_overlap = std::max(worst_overlap, std::abs(ov - kTheta));
    worst_connection = std::max(worst_connection, std::abs(f.psi[i].col(0).dot(f.psi_dot[i].col(0))));
  }
  CHECK(worst_overlap < 1e-4);
  // Overlap-phase gauge: the diagonal connection vanishes to O(dt^2).
  CHECK(worst_connection < 1e-5);
}

TEST_CASE("transition coefficients of the rotating model") {
  const auto f = build_frame(DephasingModel::rotating_dephasing(), 800);
  const auto c = transition_coefficients(f);
  for (std::size_t i = 0; i <= 800; i += 100) {
    CHECK(std::norm(c.t[i](1)) == doctest::Approx(kPi * kPi / 20.0).epsilon(1e-6));
    CHECK(std::norm(c.r[i](1)) == doctest::Approx(std::norm(c.t[i](1))).epsilon(1e-12));
    CHECK(c.t[i](0) == cplx(0.0));
  }
}

TEST_CASE("zero relative coupling gives zero transition coefficients") {
  DephasingModel m = DephasingModel::rotating_dephasing();
  m.G = OperatorFamily::zero(2);
  const auto c = transition_coefficients(build_frame(m, 200));
  for (const auto& t : c.t) CHECK(std::abs(t(1)) == 0.0);
}

TEST_CASE("gauge subtraction moves the reference level") {
  const auto m = DephasingModel::rotating_dephasing();
  const auto same = gauge_subtract(m, 0);
  const auto f0 = build_frame(same, 200);
  CHECK(f0.energies[100](1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(f0.couplings[100](1) == doctest::Approx(1.0).epsilon(1e-10));

  const auto shifted = gauge_subtract(m, 1);
  CHECK(shifted.reference == 1);
  const auto f1 = build_frame(shifted, 200);
  CHECK(f1.energies[100](0) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(f1.couplings[100](0) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(std::abs(f1.energies[100](1)) < 1e-10);
  CHECK(shifted.energy_shift(0.3) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(gauge_subtract(m, 2), std::out_of_range);
}

TEST_CASE("gauge subtraction of a varying level uses a smooth fit") {
  const auto m = DephasingModel::three_level(0.7, 0.4, 1.0, 1.0, 2.5, 0.6);
  DephasingModel tilted = m;
  const OperatorFamily h = m.H;
  tilted.H = OperatorFamily(3, [h](double s) {
    return Matrix(h(s) + 0.2 * std::sin(3.0 * s) * Matrix::Identity(3, 3));
  });
  const auto g = gauge_subtract(tilted, 0, 512);
  const auto f = build_frame(g, 300);
  double worst = 0.0;
  for (std::size_t i = 0; i <= 300; ++i) worst = std::max(worst, std::abs(f.energies[i](0)));
  CHECK(worst < 1e-6);
}

TEST_CASE("dynamical phases compose and have unit modulus") {
  const auto f = build_frame(DephasingModel::rotating_dephasing(), 400);
  const BrownianPath p = sample_path(400, 3, 1);
  const double eps = 0.5;
  const cplx whole = dynamical_phase(f, 1, eps, p, 400, 0);
  const cplx split = dynamical_phase(f, 1, eps, p, 400, 200) * dynamical_phase(f, 1, eps, p, 200, 0);
  CHECK(std::abs(whole) == doctest::Approx(1.0));
  CHECK(std::abs(whole - split) < 1e-12);
  CHECK(dynamical_phase(f, 1, eps, p, 7, 7) == cplx(1.0));
  CHECK(std::abs(dynamical_phase(f, 0, eps, p, 400, 0) - 1.0) < 1e-12);
  const cplx expected = std::exp(cplx(0, -1) * (1.0 / eps + p.values.back() / std::sqrt(eps)));
  CHECK(std::abs(whole - expected) < 1e-10);
  CHECK_THROWS_AS(dynamical_phase(f, 1, eps, p, 10, 20), std::out_of_range);
}

TEST_CASE("simulate_psi matches closed forms on a static model") {
  DephasingModel m;
  m.H = OperatorFamily::constant(pauli_z());
  m.G = OperatorFamily::constant(0.5 * pauli_z());
  const double eps = 0.2;
  const BrownianPath p = sample_path(2000, 4, 2);
  Vector psi0(2);
  psi0 << 1.0 / std::sqrt(2.0), cplx(0, 1) / std::sqrt(2.0);
  const auto t = simulate_psi(m, eps, p, scheme(Scheme::Exponential), psi0);
  const double b = p.values.back();
  // Level order follows the sorted spectrum: E = -1 is component 1.
  const cplx up = std::exp(cplx(0, -1) * (1.0 / eps + 0.5 * b / std::sqrt(eps)));
  CHECK(std::abs(t.psi.back()(0) - psi0(0) * up) < 1e-10);
  CHECK(std::abs(t.psi.back()(1) - psi0(1) * std::conj(up)) < 1e-10);
  CHECK(t.max_norm_deviation < 1e-12);
}

TEST_CASE("exponential scheme conserves the norm, Euler-Maruyama does not") {
  const auto m = DephasingModel::three_level();
  const BrownianPath p = sample_path(4000, 1, 1);
  const auto e = simulate_psi(m, 0.05, p, scheme(Scheme::Exponential));
  const auto em = simulate_psi(m, 0.05, p, scheme(Scheme::EulerMaruyama));
  CHECK(e.max_norm_deviation < 1e-9);
  CHECK(em.max_norm_deviation > 100.0 * e.max_norm_deviation);
}

TEST_CASE("tunneling samples: completeness and totals") {
  const auto m = DephasingModel::three_level();
  const double eps = 0.05;
  const std::size_t steps = required_steps(eps, 200);
  const auto f = build_frame(m, steps);
  const auto c = transition_coefficients(f);
  const auto s = tunneling_sample(f, c, eps, sample_path(steps, 1, 9), scheme(Scheme::Exponential));
  CHECK(s.completeness_error < 1e-12);
  CHECK(s.T_sim[0] == 0.0);
  CHECK(s.T_total == doctest::Approx(s.T_sim[1] + s.T_sim[2]).epsilon(1e-9));
  CHECK(s.T_pred[1] == doctest::Approx(eps * std::norm(s.A[1])));
  CHECK(s.path_id == 9);
}

TEST_CASE("no rotation means no tunneling") {
  const auto m = DephasingModel::rotating_dephasing(1.0, 1.0, 0.0);
  TunnelingOptions opt;
  opt.eps = 0.1;
  opt.paths = 20;
  const auto ens = tunneling_ensemble(m, opt);
  for (const auto& s : ens.samples) {
    CHECK(s.T_sim[1] < 1e-20);
    CHECK(std::abs(s.A[1]) == 0.0);
  }
}

TEST_CASE("simulated and predicted tunneling agree to first order") {
  const auto m = DephasingModel::rotating_dephasing();
  const std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> res;
  for (double eps : eps_list) {
    TunnelingOptions opt;
    opt.eps = eps;
    opt.paths = 40;
    opt.workers = 4;
    const auto ens = tunneling_ensemble(m, opt);
    double acc = 0.0;
    for (const auto& s : ens.samples) acc += s.first_order_residual;
    res.push_back(acc / static_cast<double>(ens.samples.size()));
  }
  CHECK(convergence_fit(eps_list, res).slope == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("tunneling mean approaches the integrated rate") {
  const auto m = DephasingModel::rotating_dephasing();
  TunnelingOptions opt;
  opt.eps = 0.05;
  opt.paths = 1000;
  opt.workers = 4;
  opt.forward_form = true;
  const auto ens = tunneling_ensemble(m, opt);
  const auto s = summarize(ens.level(1));
  CHECK(std::abs(s.mean - kPi * kPi / 20.0) < 4.0 * s.stderr_mean);
  std::vector<double> fwd;
  for (const auto& v : ens.forward) fwd.push_back(v[1]);
  CHECK(std::abs(summarize(fwd).mean - kPi * kPi / 20.0) < 4.0 * summarize(fwd).stderr_mean);
  CHECK(ens.max_norm_deviation < 1e-9);
}

TEST_CASE("overlap magnitudes do not depend on the eigenvector phases") {
  const auto m = DephasingModel::three_level();
  DephasingModel rephased = m;
  const OperatorFamily h = m.H, g = m.G;
  // A constant diagonal unitary changes every eigenvector phase.
  Matrix u = Eigen::Vector3cd(1.0, std::polar(1.0, 0.7), std::polar(1.0, -1.9)).asDiagonal();
  rephased.H = OperatorFamily(3, [h, u](double s) { return Matrix(u * h(s) * u.adjoint()); });
  rephased.G = OperatorFamily(3, [g, u](double s) { return Matrix(u * g(s) * u.adjoint()); });
  const auto ca = transition_coefficients(build_frame(m, 300));
  const auto cb = transition_coefficients(build_frame(rephased, 300));
  for (std::size_t i = 0; i <= 300; i += 50) {
    for (int k = 1; k < 3; ++k) CHECK(std::abs(ca.t[i](k)) == doctest::Approx(std::abs(cb.t[i](k))).epsilon(1e-9));
  }
}

TEST_CASE("frame construction rejects invalid models") {
  DephasingModel nc;
  nc.H = OperatorFamily::constant(pauli_x());
  nc.G = OperatorFamily::constant(pauli_z());
  CHECK_THROWS_AS(build_frame(nc, 10), NotCommuting);

  DephasingModel nh;
  Matrix bad(2, 2);
  bad << 0, 1, 0, 0;
  nh.H = OperatorFamily::constant(bad);
  nh.G = OperatorFamily::zero(2);
  CHECK_THROWS_AS(build_frame(nh, 10), NotHermitian);

  DephasingModel flat;
  flat.H = OperatorFamily::zero(2);
  flat.G = OperatorFamily::zero(2);
  CHECK_THROWS_AS(build_frame(flat, 10), SpectrumCollision);

  DephasingModel weak;
  weak.H = OperatorFamily::zero(2);
  weak.G = OperatorFamily::constant(Matrix(Eigen::Vector2cd(0.0, 1e-4).asDiagonal()));
  const auto f = build_frame(weak, 10);
  CHECK_THROWS_AS(transition_coefficients(f), GapViolation);
}

TEST_CASE("tabulated model reproduces the analytic rates") {
  const auto m = DephasingModel::rotating_dephasing();
  std::vector<Matrix> hs, gs;
  const std::size_t knots = 41;
  for (std::size_t j = 0; j < knots; ++j) {
    const double s = static_cast<double>(j) / (knots - 1);
    hs.push_back(m.H(s));
    gs.push_back(m.G(s));
  }
  const auto t = DephasingModel::table(hs, gs);
  const auto c = transition_coefficients(build_frame(t, 400));
  for (std::size_t i = 100; i <= 300; i += 50) {
    CHECK(std::norm(c.t[i](1)) == doctest::Approx(kPi * kPi / 20.0).epsilon(1e-2));
  }
  CHECK_THROWS_AS(DephasingModel::table({hs[0], hs[1], hs[2]}, {gs[0], gs[1], gs[2]}), ConfigInvalid);
}

TEST_CASE("samples CSV lists one row per path and level") {
  TunnelingOptions opt;
  opt.eps = 0.1;
  opt.paths = 3;
  const auto ens = tunneling_ensemble(DephasingModel::three_level(), opt);
  std::ostringstream os;
  write_samples_csv(os, ens);
  const std::string s = os.str();
  CHECK(s.rfind("path_id,epsilon,k,T_sim,T_pred,A_k_re,A_k_im\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 3 * 2);
}
