#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dpgstar/experiments.hpp"

using namespace dpg;

namespace {

enum Exit { ok = 0, invalid = 2, numerical = 3, identity_failure = 4 };

struct Flags {
  Index nx = 2, ny = 2;
  std::optional<Index> p, dp;
  std::vector<Index> nx_list;
  Index dp_max = 6;
  double wavelengths = 2.0;
  double angle_deg = 40.0;
  std::string norm = "graph";
  std::string method = "dpg";
  std::string goal = "manufactured";
  std::vector<double> alphas = {1.0, 0.1, 0.01, 0.001};
  Index sample_grid = 101;
  std::uint64_t seed = 20240611;
  std::string out;
};

void write_file(const std::string &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("--out: cannot open '" + path + "' for writing");
  f << text;
}

AcousticsConfig base_config(const Flags &f, Index p, Index dp) {
  AcousticsConfig cfg;
  cfg.omega = omega_from_wavelengths(f.wavelengths);
  cfg.angle_deg = f.angle_deg;
  cfg.p = p;
  cfg.dp = dp;
  cfg.norm = parse_norm(f.norm);
  cfg.validate();
  return cfg;
}

void add_mesh(CLI::App *cmd, Flags &f) {
  cmd->add_option("--nx", f.nx, "elements in x")->check(CLI::PositiveNumber);
  cmd->add_option("--ny", f.ny, "elements in y")->check(CLI::PositiveNumber);
}

void add_physics(CLI::App *cmd, Flags &f) {
  cmd->add_option("--wavelengths", f.wavelengths, "wavelengths across the unit square (omega = 2 pi wavelengths)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--angle-deg", f.angle_deg, "plane wave direction in degrees");
  cmd->add_option("--norm", f.norm, "test norm: graph | math | scaled:<alpha>");
}

void add_orders(CLI::App *cmd, Flags &f) {
  cmd->add_option("--p", f.p, "trial order")->check(CLI::PositiveNumber);
  cmd->add_option("--dp", f.dp, "test enrichment")->check(CLI::NonNegativeNumber);
}

int run_table1_cmd(const Flags &f) {
  const auto rows = run_table1(base_config(f, f.p.value_or(3), 0), StructuredMesh(f.nx, f.ny), f.dp_max);
  const std::string csv = table1_csv(rows).str();
  write_file(f.out.empty() ? "table1.csv" : f.out, csv);
  std::cout << csv;
  return ok;
}

int run_hconv_cmd(const Flags &f) {
  const std::vector<Index> ps = f.p ? std::vector<Index>{*f.p} : std::vector<Index>{1, 2, 3, 4};
  const std::vector<Index> dps = f.dp ? std::vector<Index>{*f.dp} : std::vector<Index>{0, 1, 2, 3};
  const std::vector<Index> nxs = f.nx_list.empty() ? std::vector<Index>{2, 4, 8, 16} : f.nx_list;
  const auto rows = run_hconv(base_config(f, ps.front(), dps.front()), ps, dps, nxs, parse_method(f.method));
  write_file(f.out.empty() ? "hconv.csv" : f.out, hconv_csv(rows).str());
  for (const auto &r : rows)
    std::printf("p=%lld dp=%lld nx=%lld ndof=%lld l2_err_pct=%s rate_h=%s cond=%.3e\n", (long long)r.p,
                (long long)r.dp, (long long)r.nx, (long long)r.ndof_trial, format_number(r.l2_err_pct).c_str(),
                r.rate_h ? format_number(*r.rate_h).c_str() : "-", r.condition);
  return ok;
}

int run_identities_cmd(const Flags &f) {
  const IdentitySuite suite = run_identities(f.seed);
  write_file(f.out.empty() ? "identities.json" : f.out, identities_json(suite));
  for (const auto &s : suite.identities)
    std::printf("%-26s %s (%lld checks, worst relative defect %.2e)\n", s.name.c_str(), s.pass() ? "pass" : "FAIL",
                (long long)s.checks, s.worst_relative_defect);
  for (const auto &c : suite.pde_checks)
    std::printf("%-34s %s (%.2e / %.2e)\n", c.name.c_str(), c.pass() ? "pass" : "FAIL", c.value, c.scale);
  return suite.all_pass() ? ok : identity_failure;
}

int run_solve_cmd(const Flags &f) {
  const AcousticsConfig cfg = base_config(f, f.p.value_or(3), f.dp.value_or(1));
  const Method method = parse_method(f.method);
  RunOptions opts;
  opts.goal = parse_goal(f.goal);
  opts.estimate_condition = false;
  const SolutionBundle b = run(cfg, StructuredMesh(f.nx, f.ny), method, opts);
  write_file(f.out.empty() ? "solution.csv" : f.out, solution_csv(sample_solution(b, f.sample_grid)).str());

  std::printf("method=%s ndof_trial=%lld", to_string(method).c_str(), (long long)b.ndof_trial());
  if (opts.goal == Goal::manufactured) {
    const ErrorReport err = field_l2_error(b);
    std::printf(" l2_rel_pct=%s", format_number(err.l2_rel_pct).c_str());
    if (method == Method::dpgstar) std::printf(" graph_rel_pct=%s", format_number(err.graph_rel_pct).c_str());
  }
  std::printf("\n");
  return ok;
}

int run_lsq_cmd(const Flags &f) {
  const AcousticsConfig cfg = base_config(f, f.p.value_or(3), f.dp.value_or(3));
  const auto rows = alpha_sweep(cfg, StructuredMesh(f.nx, f.ny), f.alphas);
  const std::string csv = lsq_csv(rows).str();
  write_file(f.out.empty() ? "lsq.csv" : f.out, csv);
  std::cout << csv;
  return ok;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"DPG / DPG* experiments for 2D ultraweak time-harmonic acoustics"};
  app.require_subcommand(1);
  Flags f;

  auto *table1 = app.add_subcommand("table1", "DPG vs DPG* errors over the test enrichment");
  add_mesh(table1, f);
  add_physics(table1, f);
  table1->add_option("--p", f.p, "trial order")->check(CLI::PositiveNumber);
  table1->add_option("--dp-max", f.dp_max, "largest enrichment")->check(CLI::NonNegativeNumber);
  table1->add_option("--out", f.out, "output CSV");

  auto *hconv = app.add_subcommand("hconv", "h-convergence on nx x nx meshes");
  hconv->add_option("--nx", f.nx_list, "mesh sizes")->check(CLI::PositiveNumber)->delimiter(',');
  add_physics(hconv, f);
  add_orders(hconv, f);
  hconv->add_option("--method", f.method, "dpg | dpgstar");
  hconv->add_option("--out", f.out, "output CSV");

  auto *identities = app.add_subcommand("identities", "matrix-level identity suite and PDE invariants");
  identities->add_option("--seed", f.seed, "random seed");
  identities->add_option("--out", f.out, "output JSON");

  auto *solve = app.add_subcommand("solve", "single solve sampled on a uniform grid");
  add_mesh(solve, f);
  add_physics(solve, f);
  add_orders(solve, f);
  solve->add_option("--method", f.method, "dpg | dpgstar");
  solve->add_option("--goal", f.goal, "manufactured | uniform-pressure (dpgstar)");
  solve->add_option("--sample-grid", f.sample_grid, "samples per direction")->check(CLI::Range(Index(2), Index(100000)));
  solve->add_option("--out", f.out, "output CSV");

  auto *lsq = app.add_subcommand("lsq-compare", "DPG* with scaled graph norms vs weakly conforming least squares");
  add_mesh(lsq, f);
  add_physics(lsq, f);
  add_orders(lsq, f);
  lsq->add_option("--alphas", f.alphas, "descending positive alphas")->delimiter(',');
  lsq->add_option("--out", f.out, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? ok : invalid;
  }

  try {
    if (*table1) return run_table1_cmd(f);
    if (*hconv) return run_hconv_cmd(f);
    if (*identities) return run_identities_cmd(f);
    if (*solve) return run_solve_cmd(f);
    if (*lsq) return run_lsq_cmd(f);
  } catch (const ValidationError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid;
  } catch (const FactorizationError &e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return numerical;
  } catch (const PreconditionError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid;
  }
  return invalid;
}
