#include <doctest.h>

#include <random>

#include "dpgstar/mixed_core.hpp"

using namespace dpg;

namespace {

// G = I₂, B = (1, 0)ᵀ, L = (2, 3)ᵀ, Ĝ = (1)
MixedSystem<double> tiny() {
  MixedSystem<double> s;
  s.gram = Matrix<double>::Identity(2, 2);
  s.b_matrix = Matrix<double>(2, 1);
  s.b_matrix << 1, 0;
  s.load_l = Vector<double>(2);
  s.load_l << 2, 3;
  s.load_g = Vector<double>::Constant(1, 1.0);
  return s;
}

} // namespace

TEST_CASE("solve_mixed on the 2x2 hand example") {
  const auto s = tiny();
  const auto sol = solve_mixed(s);
  CHECK(sol.u(0) == doctest::Approx(1.0));
  CHECK(sol.psi(0) == doctest::Approx(1.0));
  CHECK(sol.psi(1) == doctest::Approx(3.0));
  CHECK((s.b_matrix.transpose() * sol.psi)(0) == doctest::Approx(1.0));
}

TEST_CASE("zero second load and L in range(B) give zero error representation") {
  std::mt19937_64 rng(7);
  auto s = random_mixed_system<Complex>(rng, 12, 5);
  const VectorXc w = detail::random_matrix<Complex>(rng, 5, 1);
  s.load_l = s.b_matrix * w;
  s.load_g.setZero();
  const auto sol = solve_mixed(s);
  CHECK(sol.psi.norm() <= 1e-12 * s.load_l.norm());
  CHECK((sol.u - w).norm() <= 1e-10 * w.norm());
}

TEST_CASE("random complex system residuals") {
  std::mt19937_64 rng(11);
  const auto s = random_mixed_system<Complex>(rng, 20, 8);
  const auto sol = solve_mixed(s);
  const double scale = residual_scale(s, sol);
  CHECK(sol.res1 <= 1e-10 * scale);
  CHECK(sol.res2 <= 1e-10 * scale);
}

TEST_CASE("dual and energy norms") {
  Matrix<double> g = Matrix<double>::Zero(2, 2);
  g.diagonal() << 1, 4;
  Vector<double> f(2);
  f << 2, 2;
  CHECK(dual_norm(g, f) == doctest::Approx(std::sqrt(5.0)));
  CHECK(dual_norm<double>(g, Vector<double>::Zero(2)) == 0.0);
  CHECK(dual_norm<double>(Matrix<double>::Identity(2, 2), f) == doctest::Approx(f.norm()));

  const auto s = tiny();
  CHECK(energy_norm<double>(s, Vector<double>::Zero(1)) == 0.0);
  CHECK(energy_norm<double>(s, Vector<double>::Constant(1, 3.0)) == doctest::Approx(3.0));
  CHECK(energy_norm<double>(s, Vector<double>::Constant(1, 6.0)) == doctest::Approx(2 * energy_norm<double>(s, Vector<double>::Constant(1, 3.0))));
  CHECK(dual_energy_norm<double>(s, Vector<double>::Zero(1)) == 0.0);
  CHECK(dual_energy_norm<double>(s, Vector<double>::Constant(1, 1.0)) == doctest::Approx(1.0));
}

TEST_CASE("dual energy norm of the second load equals the V norm of psi when L = 0") {
  std::mt19937_64 rng(3);
  auto s = random_mixed_system<Complex>(rng, 15, 6);
  s.load_l.setZero();
  const auto sol = solve_mixed(s);
  CHECK(dual_energy_norm(s, s.load_g) == doctest::Approx(weighted_norm(s.gram, sol.psi)).epsilon(1e-10));
  // the solution lies in the orthogonal complement of the kernel
  CHECK(weighted_norm(s.gram, kernel_decompose(s, sol.psi).psi0) <= 1e-10 * weighted_norm(s.gram, sol.psi));
}

TEST_CASE("kernel decomposition") {
  const auto s = tiny();
  Vector<double> psi(2);
  psi << 1, 1;
  const auto k = kernel_decompose(s, psi);
  CHECK(k.psi_perp(0) == doctest::Approx(1.0));
  CHECK(std::abs(k.psi_perp(1)) < 1e-15);
  CHECK(std::abs(k.psi0(0)) < 1e-15);
  CHECK(k.psi0(1) == doctest::Approx(1.0));

  Vector<double> in_kernel(2);
  in_kernel << 0, 5;
  CHECK(kernel_decompose(s, in_kernel).psi_perp.norm() < 1e-15);

  std::mt19937_64 rng(5);
  const auto r = random_mixed_system<Complex>(rng, 18, 7);
  const VectorXc v = detail::random_matrix<Complex>(rng, 18, 1);
  const auto split = kernel_decompose(r, v);
  CHECK((split.psi0 + split.psi_perp - v).norm() <= 1e-12 * v.norm());
  CHECK((r.b_matrix.adjoint() * split.psi0).norm() <= 1e-10 * r.b_matrix.norm() * v.norm());
  const double cross = std::abs(split.psi0.dot(r.gram * split.psi_perp));
  CHECK(cross <= 1e-10 * weighted_norm(r.gram, split.psi0) * weighted_norm(r.gram, split.psi_perp));
}

TEST_CASE("fundamental identity on the hand example") {
  const auto s = tiny();
  const auto sol = solve_mixed(s);
  const auto rep = verify_fundamental_identity(s, sol);
  CHECK(rep.at("fundamental_identity").lhs == doctest::Approx(11.0));
  CHECK(rep.at("fundamental_identity").rhs == doctest::Approx(11.0));
  CHECK(rep.all_pass());

  const auto bounds = verify_stability_bounds(s, sol);
  const double expected = std::pow(std::sqrt(13.0) + 1.0, 2) + 1.0 - 11.0;
  CHECK(bounds.at("stability_bound").slack == doctest::Approx(expected));
  CHECK(bounds.all_pass());
}

TEST_CASE("fundamental identity with zero second load and L in range(B)") {
  std::mt19937_64 rng(9);
  auto s = random_mixed_system<Complex>(rng, 10, 4);
  s.load_l = s.b_matrix * detail::random_matrix<Complex>(rng, 4, 1);
  s.load_g.setZero();
  const auto rec = verify_fundamental_identity(s, solve_mixed(s)).at("fundamental_identity");
  const double l = dual_norm(s.gram, s.load_l);
  CHECK(rec.lhs == doctest::Approx(l * l).epsilon(1e-10));
  CHECK(rec.pass());
}

TEST_CASE("energy and psi bounds collapse when L = 0") {
  std::mt19937_64 rng(13);
  auto s = random_mixed_system<Complex>(rng, 14, 5);
  s.load_l.setZero();
  const auto rep = verify_stability_bounds(s, solve_mixed(s));
  CHECK(std::abs(rep.at("energy_bound").slack) <= 1e-10 * rep.at("energy_bound").rhs);
  CHECK(std::abs(rep.at("psi_bound").slack) <= 1e-10 * rep.at("psi_bound").rhs);
}

TEST_CASE("a-posteriori bounds") {
  const auto s = tiny();
  const auto sol = solve_mixed(s);
  const auto exact = aposteriori_bounds(s, sol, sol.psi, sol.u);
  for (const auto &r : exact.records) {
    CHECK(r.lhs == doctest::Approx(0.0));
    CHECK(r.rhs == doctest::Approx(0.0));
  }
  const auto zero = aposteriori_bounds<double>(s, sol, Vector<double>::Zero(2), Vector<double>::Zero(1));
  CHECK(zero.at("aposteriori_bound").lhs == doctest::Approx(11.0));
  CHECK(zero.at("aposteriori_bound").rhs == doctest::Approx(std::pow(std::sqrt(13.0) + 1.0, 2) + 1.0));
  CHECK(zero.all_pass());
}

TEST_CASE("nested energy identity, hand example") {
  MixedSystem<double> s;
  s.gram = Matrix<double>::Identity(3, 3);
  s.b_matrix = Matrix<double>::Zero(3, 2);
  s.b_matrix(0, 0) = s.b_matrix(1, 1) = 1.0;
  s.load_l = s.b_matrix * Vector<double>::Ones(2);
  s.load_g = Vector<double>::Zero(2);
  const Matrix<double> trial = Matrix<double>::Identity(2, 1);
  const auto nested = energy_error_identity<double>(s, trial, Matrix<double>::Identity(3, 3));
  CHECK(nested.u_h(0) == doctest::Approx(1.0));
  CHECK(nested.u_h(1) == doctest::Approx(0.0));
  CHECK(nested.psi_h(1) == doctest::Approx(1.0));
  const auto &r = nested.report.at("nested_energy_identity");
  CHECK(r.lhs == doctest::Approx(1.0));
  CHECK(r.rhs == doctest::Approx(1.0));
}

TEST_CASE("nested energy identity, random nested spaces") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 20; ++k) {
    auto s = random_mixed_system<Complex>(rng, 20, 8);
    s.load_l = s.b_matrix * detail::random_matrix<Complex>(rng, 8, 1);
    s.load_g.setZero();
    const MatrixXc trial = detail::random_matrix<Complex>(rng, 8, 3);
    const MatrixXc test = detail::random_matrix<Complex>(rng, 20, 9);
    CHECK(energy_error_identity(s, trial, test).report.all_pass());
  }
  // coarse trial = fine trial: both sides vanish
  auto s = random_mixed_system<Complex>(rng, 9, 4);
  s.load_l = s.b_matrix * detail::random_matrix<Complex>(rng, 4, 1);
  s.load_g.setZero();
  const auto same = energy_error_identity<Complex>(s, MatrixXc::Identity(4, 4), MatrixXc::Identity(9, 9));
  CHECK(same.psi_h.norm() <= 1e-12 * s.load_l.norm());
  CHECK(same.report.records[0].lhs <= 1e-20 * s.load_l.squaredNorm());
}

TEST_CASE("nested energy identity rejects a nonzero fine error representation") {
  std::mt19937_64 rng(19);
  const auto s = random_mixed_system<Complex>(rng, 8, 3);
  CHECK_THROWS_AS(energy_error_identity<Complex>(s, MatrixXc::Identity(3, 2), MatrixXc::Identity(8, 8)), PreconditionError);
}

TEST_CASE("factorization failures carry the pivot") {
  MixedSystem<double> s = tiny();
  s.gram(1, 1) = -1.0;
  try {
    solve_mixed(s);
    FAIL("expected a factorization error");
  } catch (const FactorizationError &e) {
    CHECK(e.pivot() == 1);
  }

  MixedSystem<double> r;
  r.gram = Matrix<double>::Identity(3, 3);
  r.b_matrix = Matrix<double>::Zero(3, 2);
  r.b_matrix(0, 0) = 1.0;
  r.b_matrix(1, 0) = 1.0; // second column zero: rank deficient
  r.load_l = Vector<double>::Ones(3);
  r.load_g = Vector<double>::Zero(2);
  CHECK_THROWS_AS(solve_mixed(r), FactorizationError);
}

TEST_CASE("property suite over random systems") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 100; ++k) {
    const Index n = std::uniform_int_distribution<Index>(3, 40)(rng);
    const Index m = std::uniform_int_distribution<Index>(1, n - 1)(rng);
    const auto s = random_mixed_system<Complex>(rng, n, m);
    const auto sol = solve_mixed(s);
    IdentityReport rep = verify_fundamental_identity(s, sol);
    rep.append(verify_stability_bounds(s, sol));
    rep.append(aposteriori_bounds(s, sol, VectorXc(sol.psi + detail::random_matrix<Complex>(rng, n, 1)),
                                  VectorXc(sol.u + detail::random_matrix<Complex>(rng, m, 1))));
    CHECK(rep.all_pass());
  }
}
