#include <doctest.h>

#include <cmath>

#include "dpgstar/acoustics.hpp"
#include "dpgstar/linalg.hpp"

using namespace dpg;

namespace {

constexpr double pi = 3.14159265358979323846;

// Coefficients of a constant in one component block of the nodal test basis.
VectorXc constant_test(const TestDofLayout &test, int component) {
  VectorXc c = VectorXc::Zero(test.per_element());
  c.segment(component * test.block(), test.block()).setOnes();
  return c;
}

AcousticsConfig config(Index p, Index dp, double omega = 4 * pi, double angle = 40.0) {
  AcousticsConfig cfg;
  cfg.p = p;
  cfg.dp = dp;
  cfg.omega = omega;
  cfg.angle_deg = angle;
  return cfg;
}

} // namespace

TEST_CASE("plane wave values") {
  const PlaneWave w(4 * pi, 40.0);
  CHECK(std::abs(w.pressure(Point(0, 0)) - 1.0) < 1e-15);
  CHECK(w.velocity(Point(0, 0)).x().real() == doctest::Approx(-0.76604).epsilon(1e-5));
  CHECK(w.velocity(Point(0, 0)).y().real() == doctest::Approx(-0.64279).epsilon(1e-5));
  CHECK(std::abs(PlaneWave(4 * pi, 0.0).pressure(Point(0.5, 0.3)) - 1.0) < 1e-14);
  CHECK(w.impedance(Point(0, 0), Point(0, -1)).real() == doctest::Approx(1 - std::sin(40 * pi / 180)));

  const auto v = plane_wave_eval(config(3, 1), Point(0, 0), Point(0, -1));
  REQUIRE(v.g_bc.has_value());
  CHECK(v.g_bc->real() == doctest::Approx(0.35721).epsilon(1e-5));

  // first-order system holds pointwise
  const Point x(0.3, 0.8);
  CHECK(std::abs(Complex(0, 4 * pi) * w.pressure(x) + w.velocity_divergence(x)) < 1e-12);
  CHECK((Complex(0, 4 * pi) * w.velocity(x) + w.pressure_gradient(x)).norm() < 1e-12);
}

TEST_CASE("configuration validation") {
  AcousticsConfig c = config(3, 1);
  c.p = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = config(3, 1, -1.0);
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = config(3, 1);
  c.norm = TestNorm::scaled_graph(-1.0);
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("Gram entries for constants on the unit element") {
  const StructuredMesh mesh(1, 1);
  const AcousticsConfig cfg = config(1, 1);
  const TestDofLayout test(mesh, 1, 1);
  const VectorXc q = constant_test(test, 0), v1 = constant_test(test, 1);

  const MatrixXc graph = assemble_element_gram(cfg, mesh, 0);
  CHECK(q.dot(graph * q).real() == doctest::Approx(cfg.omega * cfg.omega + 1.0));
  CHECK(std::abs(q.dot(graph * v1)) < 1e-12);

  const MatrixXc math = assemble_element_gram(cfg, mesh, 0, TestNorm::mathematician());
  CHECK(q.dot(math * q).real() == doctest::Approx(1.0));
}

TEST_CASE("Gram is Hermitian positive definite") {
  const StructuredMesh mesh(2, 2);
  const AcousticsConfig cfg = config(3, 2);
  for (const TestNorm norm : {TestNorm::adjoint_graph(), TestNorm::mathematician(), TestNorm::scaled_graph(0.01)}) {
    const MatrixXc g = assemble_element_gram(cfg, mesh, 3, norm);
    CHECK((g - g.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK_NOTHROW(HermitianFactor<Complex>(g, "test gram"));
  }
  const MatrixXc one = assemble_element_gram(cfg, mesh, 1);
  const MatrixXc scaled = assemble_element_gram(cfg, mesh, 1, TestNorm::scaled_graph(1.0));
  CHECK((one - scaled).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("B volume entries follow the conjugated convention") {
  const StructuredMesh mesh(1, 1);
  const AcousticsConfig cfg = config(1, 0);
  const TrialDofLayout trial(mesh, 1);
  const TestDofLayout test(mesh, 1, 0);
  const MatrixXc b = assemble_element_b(cfg, mesh, 0, trial);
  const auto &map = trial.element_map(0);
  auto column = [&](Index global) {
    return Index(std::find(map.global.begin(), map.global.end(), global) - map.global.begin());
  };
  const Index p_col = column(trial.field_dof(0, 0, 0));
  const Index u1_col = column(trial.field_dof(0, 1, 0));
  const VectorXc q = constant_test(test, 0), v1 = constant_test(test, 1);
  const Complex minus_i_omega(0.0, -cfg.omega);
  CHECK(std::abs(q.dot(b.col(p_col)) - minus_i_omega) < 1e-12);
  CHECK(std::abs(v1.dot(b.col(u1_col)) - minus_i_omega) < 1e-12);
  CHECK(std::abs(q.dot(b.col(u1_col))) < 1e-12);
}

TEST_CASE("flux columns are local") {
  const StructuredMesh mesh(3, 1);
  const AcousticsConfig cfg = config(2, 1);
  const TrialDofLayout trial(mesh, 2);
  // element 2 touches no flux of the edge between elements 0 and 1
  const Index edge = mesh.element_edges(0)[int(Side::right)].edge;
  const Index flux = trial.flux_dof(mesh.interior_index(edge), 0);
  const auto &far = trial.element_map(2).global;
  CHECK(std::find(far.begin(), far.end(), flux) == far.end());
  const auto &near = trial.element_map(1).global;
  const Index col = Index(std::find(near.begin(), near.end(), flux) - near.begin());
  REQUIRE(col < Index(near.size()));
  CHECK(assemble_element_b(cfg, mesh, 1, trial).col(col).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("primal load") {
  const AcousticsConfig cfg = config(3, 1);
  CHECK(assemble_load_primal(cfg, StructuredMesh(3, 3), 4).cwiseAbs().maxCoeff() == 0.0);

  // θ = 0, ω = 4π on the unit square: g = p*(1 + d·n). Bottom and top carry a
  // full period of e^{i4πx} and integrate to 0, the left side has g = 0, the
  // right side g = 2. Total −⟨g, 1⟩ = −2.
  const StructuredMesh one(1, 1);
  const AcousticsConfig flat = config(1, 1, 4 * pi, 0.0);
  const VectorXc l = assemble_load_primal(flat, one, 0);
  const TestDofLayout test(one, 1, 1);
  const double err = std::abs(constant_test(test, 0).dot(l) - Complex(-2.0, 0.0));
  CHECK(err < 1e-8);
  AcousticsConfig finer = flat;
  finer.quad_extra = 6;
  const double err_fine = std::abs(constant_test(test, 0).dot(assemble_load_primal(finer, one, 0)) + 2.0);
  CHECK(err_fine < 1e-13);
  CHECK(err_fine < err);
  CHECK(std::abs(VectorXc::Zero(test.per_element()).dot(l)) == 0.0);
}

TEST_CASE("manufactured adjoint load lives on boundary traces") {
  const StructuredMesh mesh(2, 2);
  const AcousticsConfig cfg = config(3, 1);
  const TrialDofLayout trial(mesh, 3);
  const VectorXc g = assemble_load_adjoint(cfg, mesh, trial, Goal::manufactured);
  const double top = g.cwiseAbs().maxCoeff();
  const auto boundary = trial.boundary_trace_mask(mesh);
  double off = 0.0, on = 0.0;
  for (Index k = 0; k < g.size(); ++k)
    (boundary[std::size_t(k)] ? on : off) = std::max(boundary[std::size_t(k)] ? on : off, std::abs(g(k)));
  CHECK(off <= 1e-10 * top);
  CHECK(on > 0.0);
}

TEST_CASE("uniform pressure goal") {
  const StructuredMesh mesh(1, 1);
  const TrialDofLayout trial(mesh, 1);
  const VectorXc g = assemble_load_adjoint(config(1, 1), mesh, trial, Goal::uniform_pressure);
  CHECK(std::abs(g(trial.field_dof(0, 0, 0)) - 1.0) < 1e-14);
  CHECK(g.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("plane wave is consistent with the discrete form") {
  const StructuredMesh mesh(2, 2);
  const AcousticsConfig cfg = config(3, 1);
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const VectorXc exact = element_form_exact(cfg, mesh, e);
    const VectorXc load = assemble_load_primal(cfg, mesh, e);
    CHECK((exact - load).cwiseAbs().maxCoeff() <= 1e-8 * std::max(max_abs(exact), max_abs(load)));
  }
}
