#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpgstar/acoustics.hpp"
#include "dpgstar/errors.hpp"
#include "dpgstar/lsq.hpp"
#include "dpgstar/solver.hpp"

namespace dpg {

constexpr double two_pi = 2.0 * 3.14159265358979323846;

inline double omega_from_wavelengths(double wavelengths) { return two_pi * wavelengths; }

/// Parses graph | math | scaled:<alpha>.
TestNorm parse_norm(const std::string &text);
Method parse_method(const std::string &text);
Goal parse_goal(const std::string &text);

struct Table1Row {
  Index dp = 0;
  double dpg_l2_pct = 0.0;
  double dpgstar_l2_pct = 0.0;
  double dpgstar_graph_pct = 0.0;
};

/// DPG and DPG* errors for dp = 0..dp_max on one mesh.
std::vector<Table1Row> run_table1(const AcousticsConfig &base, const StructuredMesh &mesh, Index dp_max);

struct HconvRow {
  Index p = 0;
  Index dp = 0;
  Index nx = 0;
  Index ndof_trial = 0;
  double l2_err_pct = 0.0;
  std::optional<double> rate_h; // empty on the first mesh of a series
  double condition = 0.0;
};

/// DPG field errors on nx×nx meshes for every (p, dp), in (p, dp, nx) order.
std::vector<HconvRow> run_hconv(const AcousticsConfig &base, const std::vector<Index> &ps,
                                const std::vector<Index> &dps, const std::vector<Index> &nxs, Method method,
                                bool estimate_condition = true);

/// Worst case of one named identity or inequality over the random suite.
struct IdentitySummary {
  std::string name;
  bool is_identity = true;
  double worst_relative_defect = 0.0;
  double worst_gap = 0.0;     // identities: max |lhs − rhs|
  double worst_slack = 0.0;   // inequalities: min (rhs − lhs) / |rhs|
  Index checks = 0;
  Index failures = 0;
  bool pass() const { return failures == 0; }
};

struct PdeCheck {
  std::string name;
  double value = 0.0;
  double scale = 0.0;
  double tolerance = 0.0; // pass iff value ≤ tolerance·scale
  bool pass() const { return value <= tolerance * scale; }
};

struct IdentitySuite {
  std::uint64_t seed = 0;
  Index systems = 0;
  std::vector<IdentitySummary> identities;
  std::vector<PdeCheck> pde_checks;
  bool all_pass() const;
};

/// Names of the ten identities and inequalities of the matrix-level suite, in
/// report order.
const std::vector<std::string> &identity_names();

/// Property suite on `systems` seeded random complex mixed systems with test
/// dimension at most `max_dim`.
std::vector<IdentitySummary> run_mixed_core_suite(std::uint64_t seed, Index systems, Index max_dim);

/// Consistency, stiffness sharing, adjoint-load support and goal
/// orthogonality on one PDE configuration.
std::vector<PdeCheck> run_pde_checks(const AcousticsConfig &cfg, const StructuredMesh &mesh, std::uint64_t seed);

IdentitySuite run_identities(std::uint64_t seed, Index systems = 100, Index max_dim = 40);

/// Identity report as pretty-printed JSON.
std::string identities_json(const IdentitySuite &suite);

struct SampleRow {
  double x = 0.0;
  double y = 0.0;
  std::array<Complex, 3> values; // (p, u₁, u₂) for dpg, (q, v₁, v₂) for dpgstar
};

/// Solution values at a single point.
std::array<Complex, 3> evaluate_solution(const SolutionBundle &bundle, const Point &x);

/// Values on an n×n uniform grid of the unit square, rows by y then x.
std::vector<SampleRow> sample_solution(const SolutionBundle &bundle, Index n);

struct CsvTable {
  std::string header;
  std::vector<std::string> rows;
  std::string str() const;
};

std::string format_number(double v);

CsvTable table1_csv(const std::vector<Table1Row> &rows);
CsvTable hconv_csv(const std::vector<HconvRow> &rows);
CsvTable solution_csv(const std::vector<SampleRow> &rows);
CsvTable lsq_csv(const std::vector<AlphaRow> &rows);

} // namespace dpg
