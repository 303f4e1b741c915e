#include "dpgstar/acoustics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dpg {

namespace {

constexpr Complex I{0.0, 1.0};

// Reference coordinates of edge parameter t on an element side; the side is
// traversed in the direction of its global edge.
Point side_reference(Side side, double t) {
  switch (side) {
  case Side::bottom: return {t, 0.0};
  case Side::right: return {1.0, t};
  case Side::top: return {t, 1.0};
  case Side::left: return {0.0, t};
  }
  return {0.0, 0.0};
}

double side_length(const Element &el, Side side) {
  return (side == Side::bottom || side == Side::top) ? el.hx() : el.hy();
}

bool horizontal(Side side) { return side == Side::bottom || side == Side::top; }

// Values of a 1D basis at the element side: along-edge values and the
// constant transverse factor (basis evaluated at 0 or 1).
struct SideFactors {
  MatrixXd along;     // points × (order+1)
  VectorXd transverse; // (order+1)
};

SideFactors side_factors(const LagrangeBasis &basis, const BasisValues &line, Side side) {
  VectorXd end(1);
  end(0) = (side == Side::bottom || side == Side::left) ? 0.0 : 1.0;
  return {line.values, basis.eval(end).values.row(0).transpose()};
}

MatrixXc weighted_gram(const MatrixXc &rows, const VectorXd &w) {
  const Index blocks = rows.rows() / w.size();
  VectorXd wr(rows.rows());
  for (Index b = 0; b < blocks; ++b) wr.segment(b * w.size(), w.size()) = w;
  MatrixXc g = rows.adjoint() * (wr.asDiagonal() * rows);
  return 0.5 * (g + g.adjoint());
}

} // namespace

QuadratureRule wave_rule(const AcousticsConfig &cfg, const StructuredMesh &mesh) {
  return gauss_rule(cfg.wave_points(std::max(mesh.hx(), mesh.hy())));
}

MatrixXc graph_rows(double omega, const TestSample &t) {
  const Index n = t.points;
  MatrixXc av(3 * n, t.cols());
  const Complex iw = I * omega;
  av.middleRows(0, n) = iw * t.block(0) + t.block(5);
  av.middleRows(n, n) = iw * t.block(1) + t.block(3);
  av.middleRows(2 * n, n) = iw * t.block(2) + t.block(4);
  return av;
}

MatrixXc element_l2_gram(const TestSample &test, const Element &element, const QuadratureRule &rule) {
  return weighted_gram(test.volume.topRows(3 * test.points), volume_weights(element, rule));
}

std::string TestNorm::name() const {
  switch (kind) {
  case NormKind::adjoint_graph: return "graph";
  case NormKind::mathematician: return "math";
  case NormKind::pure_graph: return "pure-graph";
  case NormKind::scaled_graph: {
    std::ostringstream os;
    os << "scaled:" << alpha;
    return os.str();
  }
  }
  return "unknown";
}

void AcousticsConfig::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("omega must be positive");
  if (!(angle_deg >= 0.0 && angle_deg < 360.0)) throw ValidationError("angle must lie in [0, 360)");
  if (p < 1) throw ValidationError("trial order p must be >= 1");
  if (dp < 0) throw ValidationError("enrichment dp must be >= 0");
  if (quad_extra < 0) throw ValidationError("quadrature boost must be >= 0");
  if (norm.kind == NormKind::scaled_graph && !(norm.alpha > 0.0))
    throw ValidationError("scaled graph norm requires alpha > 0");
}

Index AcousticsConfig::wave_points(double h) const {
  return poly_points() + Index(std::ceil(omega * h / 2.0));
}

PlaneWave::PlaneWave(double omega, double angle_deg) : omega_(omega) {
  const double theta = angle_deg * std::numbers::pi / 180.0;
  d_ = {std::cos(theta), std::sin(theta)};
}

Complex PlaneWave::pressure(const Point &x) const { return std::exp(I * omega_ * d_.dot(x)); }

Eigen::Vector2cd PlaneWave::velocity(const Point &x) const {
  const Complex p = pressure(x);
  return {-d_.x() * p, -d_.y() * p};
}

Eigen::Vector2cd PlaneWave::pressure_gradient(const Point &x) const {
  const Complex p = pressure(x);
  return {I * omega_ * d_.x() * p, I * omega_ * d_.y() * p};
}

Complex PlaneWave::velocity_divergence(const Point &x) const {
  return -I * omega_ * d_.squaredNorm() * pressure(x);
}

Complex PlaneWave::impedance(const Point &x, const Point &normal) const {
  const auto u = velocity(x);
  return pressure(x) - (u.x() * normal.x() + u.y() * normal.y());
}

PlaneWaveValues plane_wave_eval(const AcousticsConfig &cfg, const Point &x, std::optional<Point> normal) {
  PlaneWave wave(cfg);
  PlaneWaveValues out{wave.pressure(x), wave.velocity(x), std::nullopt};
  if (normal) out.g_bc = wave.impedance(x, *normal);
  return out;
}

VectorXd volume_weights(const Element &element, const QuadratureRule &rule) {
  const Index n = rule.size();
  VectorXd w(n * n);
  for (Index iy = 0; iy < n; ++iy)
    for (Index ix = 0; ix < n; ++ix) w(iy * n + ix) = rule.weights(ix) * rule.weights(iy);
  return w * (element.hx() * element.hy());
}

std::vector<Point> volume_points(const Element &element, const QuadratureRule &rule) {
  const Index n = rule.size();
  std::vector<Point> pts;
  pts.reserve(std::size_t(n * n));
  for (Index iy = 0; iy < n; ++iy)
    for (Index ix = 0; ix < n; ++ix) pts.push_back(element.map(rule.points(ix), rule.points(iy)));
  return pts;
}

TestSample sample_test_basis(const AcousticsConfig &cfg, const Element &element, const QuadratureRule &rule) {
  const Index order = cfg.p + cfg.dp;
  const LagrangeBasis basis(order);
  const BasisValues line = basis.eval(rule.points);
  const Index n = rule.size(), nb = basis.size(), block = nb * nb, npts = n * n;
  const double hx = element.hx(), hy = element.hy();

  TestSample t;
  t.points = npts;
  t.volume = MatrixXc::Zero(6 * npts, 3 * block);
  for (Index iy = 0; iy < n; ++iy)
    for (Index ix = 0; ix < n; ++ix) {
      const Index r = iy * n + ix;
      for (Index j = 0; j < nb; ++j)
        for (Index i = 0; i < nb; ++i) {
          const Index a = j * nb + i;
          const double phi = line.values(ix, i) * line.values(iy, j);
          const double dx = line.derivatives(ix, i) * line.values(iy, j) / hx;
          const double dy = line.values(ix, i) * line.derivatives(iy, j) / hy;
          t.volume(0 * npts + r, a) = phi;
          t.volume(1 * npts + r, block + a) = phi;
          t.volume(2 * npts + r, 2 * block + a) = phi;
          t.volume(3 * npts + r, a) = dx;
          t.volume(4 * npts + r, a) = dy;
          t.volume(5 * npts + r, block + a) = dx;
          t.volume(5 * npts + r, 2 * block + a) = dy;
        }
    }

  for (int s = 0; s < 4; ++s) {
    const Side side = static_cast<Side>(s);
    const SideFactors f = side_factors(basis, line, side);
    const Point normal = outward_normal(side);
    MatrixXc &q = t.q_edge[std::size_t(s)];
    MatrixXc &vn = t.vn_edge[std::size_t(s)];
    q = MatrixXc::Zero(n, 3 * block);
    vn = MatrixXc::Zero(n, 3 * block);
    for (Index r = 0; r < n; ++r)
      for (Index j = 0; j < nb; ++j)
        for (Index i = 0; i < nb; ++i) {
          const Index a = j * nb + i;
          const double phi = horizontal(side) ? f.along(r, i) * f.transverse(j) : f.transverse(i) * f.along(r, j);
          q(r, a) = phi;
          vn(r, block + a) = phi * normal.x();
          vn(r, 2 * block + a) = phi * normal.y();
        }
  }
  return t;
}

TestSample sample_test_wave(const PlaneWave &wave, const Element &element, const QuadratureRule &rule) {
  const Index n = rule.size(), npts = n * n;
  TestSample t;
  t.points = npts;
  t.volume.resize(6 * npts, 1);
  const auto pts = volume_points(element, rule);
  for (Index r = 0; r < npts; ++r) {
    const Point &x = pts[std::size_t(r)];
    const auto u = wave.velocity(x);
    const auto grad = wave.pressure_gradient(x);
    t.volume(0 * npts + r, 0) = wave.pressure(x);
    t.volume(1 * npts + r, 0) = u.x();
    t.volume(2 * npts + r, 0) = u.y();
    t.volume(3 * npts + r, 0) = grad.x();
    t.volume(4 * npts + r, 0) = grad.y();
    t.volume(5 * npts + r, 0) = wave.velocity_divergence(x);
  }
  for (int s = 0; s < 4; ++s) {
    const Side side = static_cast<Side>(s);
    const Point normal = outward_normal(side);
    MatrixXc &q = t.q_edge[std::size_t(s)];
    MatrixXc &vn = t.vn_edge[std::size_t(s)];
    q.resize(n, 1);
    vn.resize(n, 1);
    for (Index r = 0; r < n; ++r) {
      const Point ref = side_reference(side, rule.points(r));
      const Point x = element.map(ref.x(), ref.y());
      const auto u = wave.velocity(x);
      q(r, 0) = wave.pressure(x);
      vn(r, 0) = u.x() * normal.x() + u.y() * normal.y();
    }
  }
  return t;
}

TrialSample sample_trial_basis(const StructuredMesh &mesh, const TrialDofLayout &trial, Index element,
                               const QuadratureRule &rule) {
  const ElementTrialMap &map = trial.element_map(element);
  const LagrangeBasis field_basis(trial.field_order());
  const BasisValues fline = field_basis.eval(rule.points);
  const Index n = rule.size(), nb = field_basis.size(), block = nb * nb, npts = n * n;

  TrialSample t;
  t.points = npts;
  t.volume = MatrixXc::Zero(3 * npts, map.size());
  for (Index iy = 0; iy < n; ++iy)
    for (Index ix = 0; ix < n; ++ix)
      for (Index j = 0; j < nb; ++j)
        for (Index i = 0; i < nb; ++i) {
          const double phi = fline.values(ix, i) * fline.values(iy, j);
          for (Index c = 0; c < 3; ++c) t.volume(c * npts + iy * n + ix, c * block + j * nb + i) = phi;
        }

  const BasisValues trace_line = LagrangeBasis(trial.order()).eval(rule.points);
  const BasisValues flux_line = LagrangeBasis(trial.order() - 1).eval(rule.points);
  const auto sides = mesh.element_edges(element);
  for (int s = 0; s < 4; ++s) {
    MatrixXc &tr = t.trace[std::size_t(s)];
    MatrixXc &fl = t.flux[std::size_t(s)];
    tr = MatrixXc::Zero(n, map.size());
    fl = MatrixXc::Zero(n, map.size());
    const auto &trace_cols = map.trace[std::size_t(s)];
    for (std::size_t k = 0; k < trace_cols.size(); ++k) tr.col(trace_cols[k]) = trace_line.values.col(Index(k));
    const auto &flux_cols = map.flux[std::size_t(s)];
    const double sign = double(sides[std::size_t(s)].sign);
    for (std::size_t k = 0; k < flux_cols.size(); ++k)
      fl.col(flux_cols[k]) = sign * flux_line.values.col(Index(k));
  }
  return t;
}

TrialSample sample_trial_wave(const PlaneWave &wave, const StructuredMesh &mesh, Index element,
                              const QuadratureRule &rule) {
  const Element &el = mesh.element(element);
  const Index n = rule.size(), npts = n * n;
  TrialSample t;
  t.points = npts;
  t.volume.resize(3 * npts, 1);
  const auto pts = volume_points(el, rule);
  for (Index r = 0; r < npts; ++r) {
    const auto u = wave.velocity(pts[std::size_t(r)]);
    t.volume(r, 0) = wave.pressure(pts[std::size_t(r)]);
    t.volume(npts + r, 0) = u.x();
    t.volume(2 * npts + r, 0) = u.y();
  }
  const auto sides = mesh.element_edges(element);
  for (int s = 0; s < 4; ++s) {
    const Side side = static_cast<Side>(s);
    const Point normal = outward_normal(side);
    const bool interior = !mesh.edge(sides[std::size_t(s)].edge).is_boundary;
    MatrixXc &tr = t.trace[std::size_t(s)];
    MatrixXc &fl = t.flux[std::size_t(s)];
    tr.resize(n, 1);
    fl = MatrixXc::Zero(n, 1);
    for (Index r = 0; r < n; ++r) {
      const Point ref = side_reference(side, rule.points(r));
      const Point x = el.map(ref.x(), ref.y());
      tr(r, 0) = -wave.pressure(x);
      if (interior) {
        const auto u = wave.velocity(x);
        fl(r, 0) = -(u.x() * normal.x() + u.y() * normal.y());
      }
    }
  }
  return t;
}

MatrixXc element_form(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element,
                      const TrialSample &trial, const TestSample &test, const QuadratureRule &rule) {
  const Element &el = mesh.element(element);
  const VectorXd w = volume_weights(el, rule);
  const Index npts = test.points;
  const MatrixXc av = graph_rows(cfg.omega, test);

  MatrixXc b = MatrixXc::Zero(test.cols(), trial.cols());
  for (Index c = 0; c < 3; ++c)
    b.noalias() += av.middleRows(c * npts, npts).adjoint() * (w.asDiagonal() * trial.volume.middleRows(c * npts, npts));

  const auto sides = mesh.element_edges(element);
  for (int s = 0; s < 4; ++s) {
    const VectorXd we = rule.weights * side_length(el, static_cast<Side>(s));
    const auto si = std::size_t(s);
    b.noalias() += test.vn_edge[si].adjoint() * (we.asDiagonal() * trial.trace[si]);
    if (mesh.edge(sides[si].edge).is_boundary)
      b.noalias() += test.q_edge[si].adjoint() * (we.asDiagonal() * trial.trace[si]);
    else
      b.noalias() += test.q_edge[si].adjoint() * (we.asDiagonal() * trial.flux[si]);
  }
  return b;
}

MatrixXc element_gram(const AcousticsConfig &cfg, const TestSample &test, const Element &element,
                      const QuadratureRule &rule, const TestNorm &norm) {
  const VectorXd w = volume_weights(element, rule);
  if (norm.kind == NormKind::mathematician) return weighted_gram(test.volume, w);

  MatrixXc g = weighted_gram(graph_rows(cfg.omega, test), w);
  if (norm.kind != NormKind::pure_graph) g += norm.alpha * element_l2_gram(test, element, rule);
  return g;
}

MatrixXc assemble_element_gram(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element,
                               const TestNorm &norm) {
  const QuadratureRule rule = gauss_rule(cfg.poly_points());
  const Element &el = mesh.element(element);
  return element_gram(cfg, sample_test_basis(cfg, el, rule), el, rule, norm);
}

MatrixXc assemble_element_gram(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element) {
  return assemble_element_gram(cfg, mesh, element, cfg.norm);
}

MatrixXc assemble_element_b(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element,
                            const TrialDofLayout &trial) {
  const QuadratureRule rule = gauss_rule(cfg.poly_points());
  const TestSample test = sample_test_basis(cfg, mesh.element(element), rule);
  return element_form(cfg, mesh, element, sample_trial_basis(mesh, trial, element, rule), test, rule);
}

VectorXc assemble_load_primal(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element) {
  const QuadratureRule rule = wave_rule(cfg, mesh);
  const Element &el = mesh.element(element);
  const TestSample test = sample_test_basis(cfg, el, rule);
  const PlaneWave wave(cfg);

  VectorXc l = VectorXc::Zero(test.cols());
  const auto sides = mesh.element_edges(element);
  for (int s = 0; s < 4; ++s) {
    const auto si = std::size_t(s);
    if (!mesh.edge(sides[si].edge).is_boundary) continue;
    const Side side = static_cast<Side>(s);
    const Point normal = outward_normal(side);
    VectorXc g(rule.size());
    for (Index r = 0; r < rule.size(); ++r) {
      const Point ref = side_reference(side, rule.points(r));
      g(r) = wave.impedance(el.map(ref.x(), ref.y()), normal) * rule.weights(r) * side_length(el, side);
    }
    l.noalias() -= test.q_edge[si].adjoint() * g;
  }
  return l;
}

ElementContribution assemble_element(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element,
                                     const TrialDofLayout &trial, const TestDofLayout &test) {
  const QuadratureRule rule = gauss_rule(cfg.poly_points());
  const Element &el = mesh.element(element);
  const TestSample sample = sample_test_basis(cfg, el, rule);

  ElementContribution c;
  c.element = element;
  c.gram = element_gram(cfg, sample, el, rule, cfg.norm);
  c.b_block = element_form(cfg, mesh, element, sample_trial_basis(mesh, trial, element, rule), sample, rule);
  c.load_l = assemble_load_primal(cfg, mesh, element);
  c.trial_global = trial.element_map(element).global;
  c.test_offset = test.offset(element);
  return c;
}

VectorXc assemble_load_adjoint(const AcousticsConfig &cfg, const StructuredMesh &mesh, const TrialDofLayout &trial,
                               Goal goal) {
  VectorXc g = VectorXc::Zero(trial.size());
  if (goal == Goal::uniform_pressure) {
    const QuadratureRule rule = gauss_rule(trial.order() + 1);
    const BasisValues line = LagrangeBasis(trial.field_order()).eval(rule.points);
    const VectorXd integrals = line.values.transpose() * rule.weights; // 1D ∫ φ_i
    const Index nb = integrals.size();
    for (Index e = 0; e < mesh.num_elements(); ++e) {
      const Element &el = mesh.element(e);
      for (Index j = 0; j < nb; ++j)
        for (Index i = 0; i < nb; ++i)
          g(trial.field_dof(e, 0, j * nb + i)) = integrals(i) * integrals(j) * el.hx() * el.hy();
    }
    return g;
  }

  const QuadratureRule rule = wave_rule(cfg, mesh);
  const PlaneWave wave(cfg);
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const TestSample psi = sample_test_wave(wave, mesh.element(e), rule);
    const MatrixXc f = element_form(cfg, mesh, e, sample_trial_basis(mesh, trial, e, rule), psi, rule);
    const auto &global = trial.element_map(e).global;
    for (std::size_t k = 0; k < global.size(); ++k) g(global[k]) += std::conj(f(0, Index(k)));
  }
  return g;
}

VectorXc element_form_exact(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element) {
  const QuadratureRule rule = wave_rule(cfg, mesh);
  const PlaneWave wave(cfg);
  const TestSample test = sample_test_basis(cfg, mesh.element(element), rule);
  return element_form(cfg, mesh, element, sample_trial_wave(wave, mesh, element, rule), test, rule).col(0);
}

} // namespace dpg
