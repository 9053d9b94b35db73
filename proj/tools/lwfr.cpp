#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lwfr/lwfr.hpp"

namespace fs = std::filesystem;
using namespace lwfr;

namespace {

std::vector<int> parse_cells(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad cell count '" + tok + "'");
    }
  }
  return out;
}

template <class F>
void with_degree(int N, F&& f) {
  switch (N) {
    case 1: f(std::integral_constant<int, 1>{}); break;
    case 2: f(std::integral_constant<int, 2>{}); break;
    case 3: f(std::integral_constant<int, 3>{}); break;
    case 4: f(std::integral_constant<int, 4>{}); break;
    default: throw ConfigError("degree must be in 1..4");
  }
}

template <class S, class C>
void write_snapshot(const S& s, const C& c, const RunConfig& rc, int index, std::vector<std::string>& names) {
  const std::string name = snapshot_name(c.name, index, s.time(), rc.format);
  std::ofstream os(fs::path(rc.out) / name);
  if (!os) throw ConfigError("cannot write " + (fs::path(rc.out) / name).string());
  if (rc.format == "csv")
    write_snapshot_csv(os, s, c.name);
  else
    os << snapshot_json(s, c.name).dump() << "\n";
  names.push_back(name);
}

template <class S, class C>
int run(S& s, const C& c, const RunConfig& rc, double T) {
  fs::create_directories(rc.out);
  const auto t0 = std::chrono::steady_clock::now();
  const auto initial = s.totals();
  std::vector<std::string> names;
  write_snapshot(s, c, rc, 0, names);
  int status = 0;
  std::string error;
  try {
    for (int k = 1; k <= rc.snapshots; ++k) {
      const double tk = k == rc.snapshots ? T : T * k / rc.snapshots;
      s.advance_to(tk);
      write_snapshot(s, c, rc, k, names);
      std::cerr << "t = " << s.time() << "  steps = " << s.stats().steps << "\n";
    }
  } catch (const std::exception& e) {
    error = e.what();
    status = 2;
    std::cerr << "run aborted at t = " << s.time() << ": " << error << "\n";
    write_snapshot(s, c, rc, 9999, names);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto m = run_manifest(s, nlohmann::json(rc), initial, wall, names);
  m["case"] = c.name;
  m["dim"] = std::decay_t<decltype(s.equation())>::dim;
  if (!error.empty()) m["error"] = error;
  std::ofstream(fs::path(rc.out) / (c.name + "_manifest.json")) << std::setw(2) << m << "\n";
  std::cout << "wrote " << names.size() << " snapshots and " << c.name << "_manifest.json to " << rc.out << "\n";
  return status;
}

int solve(const RunConfig& rc) {
  rc.validate();
  CaseParams params{rc.gamma};
  const auto any = build_case(rc.case_name, params);
  int status = 0;
  std::visit(
      [&](const auto& c) {
        if (!ic_admissible(c, 2)) throw ConfigError("initial condition of " + c.name + " is not admissible");
        const int N = rc.degree > 0 ? rc.degree : c.degree;
        const double T = rc.tend >= 0.0 ? rc.tend : c.T;
        SolverOptions o;
        c.configure(o);
        rc.apply(o);
        using Eq = std::decay_t<decltype(c.eq)>;
        with_degree(N, [&](auto Nc) {
          constexpr int Nd = decltype(Nc)::value;
          if constexpr (Eq::dim == 1) {
            const int n = rc.cells.empty() ? 0 : rc.cells[0];
            Solver1D<Nd, Eq> s(c.eq, c.mesh(n), c.left, c.right, o);
            s.set_initial([&](double x, int e) { return c.initial(x, e, s.mesh()); });
            status = run(s, c, rc, T);
          } else {
            const int nx = rc.cells.empty() ? 0 : rc.cells[0];
            const int ny = rc.cells.size() > 1 ? rc.cells[1] : 0;
            Solver2D<Nd, Eq> s(c.eq, c.mesh(nx, ny), c.bc, o);
            s.set_initial(c.initial);
            status = run(s, c, rc, T);
          }
        });
      },
      any);
  return status;
}

int convergence(const RunConfig& base, const std::vector<int>& grids) {
  base.validate();
  const auto any = build_case(base.case_name, CaseParams{base.gamma});
  std::vector<double> errors;
  std::visit(
      [&](const auto& c) {
        if (!c.exact) throw ConfigError("case " + c.name + " has no exact solution");
        const int N = base.degree > 0 ? base.degree : c.degree;
        const double T = base.tend >= 0.0 ? base.tend : c.T;
        using Eq = std::decay_t<decltype(c.eq)>;
        for (int g : grids) {
          SolverOptions o;
          c.configure(o);
          base.apply(o);
          with_degree(N, [&](auto Nc) {
            constexpr int Nd = decltype(Nc)::value;
            if constexpr (Eq::dim == 1) {
              Solver1D<Nd, Eq> s(c.eq, c.mesh(g), c.left, c.right, o);
              s.set_initial([&](double x, int e) { return c.initial(x, e, s.mesh()); });
              s.advance_to(T);
              errors.push_back(l2_error(s, c.exact));
            } else {
              Solver2D<Nd, Eq> s(c.eq, c.mesh(g, g), c.bc, o);
              s.set_initial(c.initial);
              s.advance_to(T);
              errors.push_back(l2_error(s, c.exact));
            }
          });
          std::cerr << "cells " << g << " done\n";
        }
      },
      any);
  std::cout << "cells,l2_error,rate\n";
  for (const auto& r : convergence_rates(grids, errors)) {
    std::cout << r.cells << "," << std::setprecision(6) << std::scientific << r.error << std::defaultfloat << ",";
    if (r.rate)
      std::cout << std::fixed << std::setprecision(3) << *r.rate << std::defaultfloat;
    else if (r.degenerate)
      std::cout << "degenerate";
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lax-Wendroff flux reconstruction solver with subcell blending"};
  app.require_subcommand(1);

  RunConfig rc;
  std::string cells, config_file, grids_arg = "10,20,40";
  double gamma = 0.0;
  bool no_fc = false, no_scaling = false, no_smoothing = false, tvb_conserved = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON config file (flags given on the command line win)");
    sub->add_option("--case", rc.case_name, "case name (see 'cases')");
    sub->add_option("--degree", rc.degree, "polynomial degree N")->check(CLI::Range(1, 4));
    sub->add_option("--limiter", rc.limiter, "blend-fo, blend-mh, tvb or none");
    sub->add_option("--cfl-safety", rc.cfl_safety, "safety factor C_s");
    sub->add_option("--cfl", rc.cfl, "override CFL(N)");
    sub->add_option("--dt", rc.dt, "fixed time step");
    sub->add_option("--tend", rc.tend, "final time");
    sub->add_option("--gamma", gamma, "ratio of specific heats");
    sub->add_option("--indicator-a", rc.indicator.a, "indicator threshold amplitude");
    sub->add_option("--indicator-c", rc.indicator.c, "indicator threshold exponent");
    sub->add_option("--indicator-s", rc.indicator.s, "logistic sharpness");
    sub->add_option("--alpha-min", rc.indicator.alpha_min, "alpha below this is set to 0");
    sub->add_option("--alpha-max", rc.indicator.alpha_max, "upper clip of alpha");
    sub->add_flag("--no-alpha-smoothing", no_smoothing, "skip neighbour smoothing of alpha");
    sub->add_option("--tvb-M", rc.tvb_M, "TVB parameter M");
    sub->add_flag("--tvb-conserved", tvb_conserved, "limit conserved instead of characteristic variables");
    sub->add_flag("--no-flux-correction", no_fc, "disable the admissibility flux correction");
    sub->add_flag("--no-scaling-limiter", no_scaling, "disable the scaling limiter");
    sub->add_flag("--mean-audit", rc.mean_audit, "check high/low order means every step");
    sub->add_option("--nodes", rc.nodes, "solution points: gl or gll");
    sub->add_option("--kx", rc.kx, "2-D convex split weight k_x");
  };

  auto* list = app.add_subcommand("cases", "list available cases");
  auto* solve_cmd = app.add_subcommand("solve", "run a case and write snapshots and a manifest");
  add_common(solve_cmd);
  solve_cmd->add_option("--cells", cells, "NX or NX,NY");
  solve_cmd->add_option("--out", rc.out, "output directory");
  solve_cmd->add_option("--format", rc.format, "snapshot format")->check(CLI::IsMember({"csv", "json"}));
  solve_cmd->add_option("--snapshots", rc.snapshots, "number of output times after t = 0");
  auto* conv_cmd = app.add_subcommand("convergence", "L2 error table against the exact solution");
  add_common(conv_cmd);
  conv_cmd->add_option("--grids", grids_arg, "comma separated cell counts per direction");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& c : case_list())
        std::cout << std::left << std::setw(20) << c.name << c.dim << "-D  " << std::setw(12) << c.equation
                  << c.description << "\n";
      return 0;
    }
    CLI::App* sub = solve_cmd->parsed() ? solve_cmd : conv_cmd;
    if (!config_file.empty()) {
      RunConfig file = load_config(config_file);
      // explicit flags override the file
      auto given = [&](const char* name) { return sub->count(name) > 0; };
      RunConfig merged = file;
      if (given("--case")) merged.case_name = rc.case_name;
      if (given("--degree")) merged.degree = rc.degree;
      if (given("--limiter")) merged.limiter = rc.limiter;
      if (given("--cfl-safety")) merged.cfl_safety = rc.cfl_safety;
      if (given("--cfl")) merged.cfl = rc.cfl;
      if (given("--dt")) merged.dt = rc.dt;
      if (given("--tend")) merged.tend = rc.tend;
      if (given("--indicator-a")) merged.indicator.a = rc.indicator.a;
      if (given("--indicator-c")) merged.indicator.c = rc.indicator.c;
      if (given("--indicator-s")) merged.indicator.s = rc.indicator.s;
      if (given("--alpha-min")) merged.indicator.alpha_min = rc.indicator.alpha_min;
      if (given("--alpha-max")) merged.indicator.alpha_max = rc.indicator.alpha_max;
      if (given("--tvb-M")) merged.tvb_M = rc.tvb_M;
      if (given("--mean-audit")) merged.mean_audit = true;
      if (given("--nodes")) merged.nodes = rc.nodes;
      if (given("--kx")) merged.kx = rc.kx;
      if (sub == solve_cmd) {
        if (given("--out")) merged.out = rc.out;
        if (given("--format")) merged.format = rc.format;
        if (given("--snapshots")) merged.snapshots = rc.snapshots;
        if (given("--cells")) merged.cells = parse_cells(cells);
      }
      if (given("--gamma")) merged.gamma = gamma;
      if (no_smoothing) merged.alpha_smoothing = false;
      if (tvb_conserved) merged.tvb_characteristic = false;
      if (no_fc) merged.flux_correction = false;
      if (no_scaling) merged.scaling_limiter = false;
      rc = merged;
    } else {
      if (!cells.empty()) rc.cells = parse_cells(cells);
      if (gamma > 0.0) rc.gamma = gamma;
      rc.alpha_smoothing = !no_smoothing;
      rc.tvb_characteristic = !tvb_conserved;
      rc.flux_correction = !no_fc;
      rc.scaling_limiter = !no_scaling;
    }
    if (sub == solve_cmd) return solve(rc);
    return convergence(rc, parse_cells(grids_arg));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
