#include "fcfv/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "json.hpp"

#include "fcfv/adaptivity.hpp"
#include "fcfv/errors.hpp"
#include "fcfv/io.hpp"
#include "fcfv/swimmer.hpp"
#include "fcfv/transforms.hpp"
#include "fcfv/verification.hpp"

#ifndef FCFV_VERSION
#define FCFV_VERSION "unknown"
#endif

namespace fcfv {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string> kCommands{"generate-mesh", "solve-poisson", "solve-stokes",
                                         "converge",      "tau-sweep",     "adapt",
                                         "swimmer-surface", "legacy-demo"};

bool known_command(const std::string& c) {
  return std::find(kCommands.begin(), kCommands.end(), c) != kCommands.end();
}

json to_json(const RunConfig& c) {
  return json{{"command", c.command},     {"mesh", c.mesh},         {"cell_type", c.cell_type},
              {"nsd", c.nsd},             {"level", c.level},       {"divisions", c.divisions},
              {"case", c.case_name},      {"tau", c.tau},           {"eps", c.eps},
              {"max_iter", c.max_iter},   {"seed", c.seed},         {"distort", c.distort},
              {"stretch", c.stretch},     {"relative", c.relative}, {"levels", c.levels},
              {"taus", c.taus},           {"solver", c.solver},     {"out", c.out},
              {"gamma", c.gamma},         {"length", c.length},     {"n_lambda", c.n_lambda},
              {"n_theta", c.n_theta},     {"edges", c.edges}};
}

template <typename T>
void read_key(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

// Dimension of the problem described by the config.
int config_nsd(const RunConfig& c) {
  if (c.nsd != 0) {
    if (c.nsd != 2 && c.nsd != 3) throw ConfigError("nsd must be 2 or 3");
    return c.nsd;
  }
  if (!c.case_name.empty()) {
    if (is_stokes_case(c.case_name)) return stokes_case(c.case_name).nsd;
    return poisson_case(c.case_name).nsd;
  }
  const int d = family_dimension(mesh_family_from_string(c.cell_type));
  return d == 0 ? 2 : d;
}

MeshFamily config_family(const RunConfig& c) {
  try {
    return mesh_family_from_string(c.cell_type);
  } catch (const MeshError& ex) {
    throw ConfigError(ex.what());
  }
}

Mesh config_mesh(const RunConfig& c, int nsd, const BoundaryRule& rule) {
  if (!c.mesh.empty()) {
    Mesh m = read_mesh_json_file(c.mesh);
    if (m.nsd() != nsd) throw ConfigError("mesh dimension does not match the problem");
    return m;
  }
  const MeshFamily fam = config_family(c);
  const int fd = family_dimension(fam);
  if (fd != 0 && fd != nsd) throw ConfigError("cell type does not match the problem dimension");
  Mesh m = c.divisions > 0 ? generate_grid_mesh(nsd, fam, c.divisions, rule)
                           : generate_structured_mesh(nsd, fam, c.level, rule);
  if (c.distort) m = distort_mesh(m, c.seed);
  if (c.stretch > 1.0) m = stretch_mesh(m, c.stretch);
  return m;
}

SolverKind config_solver(const RunConfig& c, SolverKind fallback) {
  return c.solver.empty() ? fallback : solver_kind_from_string(c.solver);
}

std::string default_case(const RunConfig& c, bool stokes, int nsd) {
  if (!c.case_name.empty()) return c.case_name;
  if (stokes) return nsd == 2 ? "stokes2d" : "stokes3d";
  return nsd == 2 ? "poisson2d" : "poisson3d";
}

std::vector<int> default_levels(const RunConfig& c, int nsd) {
  if (!c.levels.empty()) return c.levels;
  return nsd == 2 ? std::vector<int>{1, 2, 3, 4, 5} : std::vector<int>{2, 3, 4, 5};
}

struct RunContext {
  fs::path out;
  json outputs = json::array();
  json timings = json::object();
  json results = json::object();

  std::string file(const std::string& name) {
    outputs.push_back(name);
    return (out / name).string();
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  return f;
}

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void cmd_generate(const RunConfig& c, RunContext& ctx) {
  const int nsd = config_nsd(c);
  const BoundaryRule rule = c.case_name.empty()
                                ? BoundaryRule(all_dirichlet)
                                : (is_stokes_case(c.case_name) ? stokes_case(c.case_name).boundary
                                                               : poisson_case(c.case_name).boundary);
  const Mesh m = config_mesh(c, nsd, rule);
  write_mesh_json_file(ctx.file("mesh.json"), m);
  write_vtk_file(ctx.file("mesh.vtk"), m, {});
  std::map<std::string, Index> counts;
  for (const Cell& cell : m.cells()) ++counts[std::string(to_string(cell.type))];
  ctx.results["n_cells"] = m.num_cells();
  ctx.results["n_vertices"] = m.num_vertices();
  ctx.results["cell_counts"] = counts;
}

void cmd_solve_poisson(const RunConfig& c, RunContext& ctx) {
  const int nsd = config_nsd(c);
  const PoissonCase pc = poisson_case(default_case(c, false, nsd));
  if (pc.nsd != nsd) throw ConfigError("case dimension does not match nsd");
  const Mesh m = config_mesh(c, nsd, pc.boundary);
  const MeshGeometry geo = compute_geometry(m);
  const PoissonSolution s = solve_poisson(m, geo, pc.problem(c.tau), config_solver(c, SolverKind::LDLT));
  const double eu = l2_error(m, linear_field(geo, nsd, s.c), exact_field(pc.u)).value;
  const double eq = l2_error(m, constant_field(s.q, nsd), exact_field(pc.flux(), nsd)).value;
  std::ofstream csv = open_out(ctx.file("errors.csv"));
  csv.precision(17);
  csv << "n_cells,n_trace_dof,h,err_u,err_q,t_assemble_s,t_solve_s\n"
      << m.num_cells() << ',' << s.numbering.count << ',' << geo.h << ',' << eu << ',' << eq << ','
      << s.t_assemble << ',' << s.t_solve << '\n';
  write_vtk_file(ctx.file("solution.vtk"), m, solution_fields(s));
  ctx.timings["assemble_s"] = s.t_assemble;
  ctx.timings["solve_s"] = s.t_solve;
  ctx.results["err_u"] = eu;
  ctx.results["err_q"] = eq;
}

void cmd_solve_stokes(const RunConfig& c, RunContext& ctx) {
  const int nsd = config_nsd(c);
  const StokesCase sc = stokes_case(default_case(c, true, nsd));
  if (sc.nsd != nsd) throw ConfigError("case dimension does not match nsd");
  const Mesh m = config_mesh(c, nsd, sc.boundary);
  const MeshGeometry geo = compute_geometry(m);
  const StokesSolution s = solve_stokes(m, geo, sc.problem(c.tau), config_solver(c, SolverKind::SchurCG));
  const double eu = l2_error(m, linear_vector_field(geo, nsd, s.c), exact_field(sc.u, nsd)).value;
  const double ep = l2_error(m, constant_field(s.p), exact_field(sc.p)).value;
  const double el = l2_error(m, constant_field(s.L, nsd), exact_field(sc.mixed(), nsd)).value;
  std::ofstream csv = open_out(ctx.file("errors.csv"));
  csv.precision(17);
  csv << "n_cells,n_trace_dof,h,err_u,err_p,err_L,t_assemble_s,t_solve_s\n"
      << m.num_cells() << ',' << nsd * s.numbering.count + m.num_cells() << ',' << geo.h << ','
      << eu << ',' << ep << ',' << el << ',' << s.t_assemble << ',' << s.t_solve << '\n';
  write_vtk_file(ctx.file("solution.vtk"), m, solution_fields(s, nsd));
  ctx.timings["assemble_s"] = s.t_assemble;
  ctx.timings["solve_s"] = s.t_solve;
  ctx.results["err_u"] = eu;
  ctx.results["err_p"] = ep;
  ctx.results["err_L"] = el;
  ctx.results["incompressibility_residual"] = s.incompressibility_residual;
}

StudyOptions study_options(const RunConfig& c, bool stokes) {
  StudyOptions o;
  o.tau = c.tau;
  if (c.distort) o.distort_seed = c.seed;
  o.stretch = c.stretch;
  o.solver = config_solver(c, stokes ? SolverKind::SchurCG : SolverKind::LDLT);
  return o;
}

void cmd_converge(const RunConfig& c, RunContext& ctx) {
  if (!c.mesh.empty()) throw ConfigError("converge builds its own mesh family; drop 'mesh'");
  const int nsd = config_nsd(c);
  const std::string name = c.case_name.empty() ? default_case(c, false, nsd) : c.case_name;
  const bool stokes = is_stokes_case(name);
  const MeshFamily fam = config_family(c);
  const std::vector<int> levels = default_levels(c, nsd);
  const ConvergenceReport r =
      stokes ? convergence_study(stokes_case(name), fam, levels, study_options(c, true))
             : convergence_study(poisson_case(name), fam, levels, study_options(c, false));
  std::ofstream csv = open_out(ctx.file("convergence.csv"));
  write_csv(csv, r);
  std::ofstream cpu = open_out(ctx.file("cpu_time.csv"));
  write_csv(cpu, cpu_time_trend(r));
  for (const LevelResult& l : r.levels) {
    if (l.failed) ctx.results["failed_levels"].push_back({{"level", l.level}, {"error", l.error}});
  }
  ctx.results["ls_order_u"] = r.ls_order_u;
}

void cmd_tau_sweep(const RunConfig& c, RunContext& ctx) {
  const int nsd = config_nsd(c);
  const std::string name = c.case_name.empty() ? default_case(c, true, nsd) : c.case_name;
  const MeshFamily fam = config_family(c);
  const std::vector<int> levels = c.levels.empty() ? std::vector<int>{c.level, c.level + 1} : c.levels;
  const std::vector<double> taus =
      c.taus.empty() ? std::vector<double>{1, 1e1, 1e2, 1e3, 1e4, 1e5} : c.taus;
  const TauSweepReport r = is_stokes_case(name)
                               ? tau_sweep(stokes_case(name), fam, levels, taus)
                               : tau_sweep(poisson_case(name), fam, levels, taus);
  std::ofstream csv = open_out(ctx.file("tau_sweep.csv"));
  write_csv(csv, r);
}

template <typename Case>
void finish_adapt(const Case& cs, const RunConfig& c, RunContext& ctx) {
  const Mesh m0 = config_mesh(c, cs.nsd, cs.boundary);
  AdaptOptions o;
  o.eps = c.eps;
  o.max_iter = c.max_iter;
  o.tau = c.tau;
  o.relative = c.relative;
  o.size_field_path = (ctx.out / "size_field.json").string();
  const auto r = adapt_loop(cs, m0, o);
  std::ofstream csv = open_out(ctx.file("adapt_history.csv"));
  write_history_csv(csv, r.state);
  write_mesh_json_file(ctx.file("adapted_mesh.json"), r.mesh);
  if constexpr (std::is_same_v<Case, StokesCase>) {
    write_vtk_file(ctx.file("adapted.vtk"), r.mesh, solution_fields(r.solution, cs.nsd, &r.state.E));
  } else {
    write_vtk_file(ctx.file("adapted.vtk"), r.mesh, solution_fields(r.solution, &r.state.E));
  }
  if (r.state.exported_size_field) ctx.outputs.push_back("size_field.json");
  ctx.results["iterations"] = r.state.n_ia;
  ctx.results["converged"] = r.state.converged;
  ctx.results["exported_size_field"] = r.state.exported_size_field;
  ctx.results["clamped_targets"] = r.state.clamped;
}

void cmd_adapt(const RunConfig& c, RunContext& ctx) {
  const std::string name = c.case_name.empty() ? "gaussian" : c.case_name;
  if (is_stokes_case(name)) {
    finish_adapt(stokes_case(name), c, ctx);
  } else {
    finish_adapt(poisson_case(name), c, ctx);
  }
}

void cmd_swimmer(const RunConfig& c, RunContext& ctx) {
  if (c.n_lambda < 2 || c.n_theta < 1) throw ConfigError("swimmer grid needs n_lambda >= 2, n_theta >= 1");
  const SwimmerParams p = SwimmerParams::reference(c.length, c.gamma);
  std::ofstream csv = open_out(ctx.file("swimmer_surface.csv"));
  csv.precision(17);
  csv << "lambda,theta,x,y,z\n";
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (int i = 0; i < c.n_lambda; ++i) {
    const double lambda = -p.L + 2.0 * p.L * i / (c.n_lambda - 1);
    for (int k = 0; k < c.n_theta; ++k) {
      const double theta = two_pi * k / c.n_theta;
      const Point s = evaluate_swimmer_surface(p, lambda, theta);
      csv << lambda << ',' << theta << ',' << s[0] << ',' << s[1] << ',' << s[2] << '\n';
    }
  }
}

void cmd_legacy(const RunConfig& c, RunContext& ctx) {
  const double tau = c.tau > 0.0 ? c.tau : 1.0;
  std::ofstream csv = open_out(ctx.file("legacy_demo.csv"));
  csv.precision(17);
  csv << "cell,edges,tau,det_nodal,det_linear_basis\n";
  const std::vector<double> qe = c.edges.size() == 4 ? c.edges : std::vector<double>{1, 1, 1, 1};
  const std::vector<double> te = c.edges.size() == 3 ? c.edges : std::vector<double>{1, 1, 1};
  // Rectangle with sides qe[0] x qe[1]: nodal pattern against the centroid-based linear basis.
  const Mesh rect(2, {Point(0, 0, 0), Point(qe[0], 0, 0), Point(qe[0], qe[1], 0), Point(0, qe[1], 0)},
                  {{CellType::Qua, {0, 1, 2, 3}}});
  const CellOperator op = build_cell_operator(rect, compute_geometry(rect), 0, tau, number_traces(rect));
  auto join = [](const std::vector<double>& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
    return s.str();
  };
  const NodalMatrix nt = legacy_nodal_local_matrix(CellType::Tri, te, tau);
  const NodalMatrix nq = legacy_nodal_local_matrix(CellType::Qua, qe, tau);
  csv << "TRI," << join(te) << ',' << tau << ',' << nt.determinant << ",\n";
  csv << "QUA," << join(qe) << ',' << tau << ',' << nq.determinant << ',' << op.m.determinant()
      << '\n';
  ctx.results["det_tri"] = nt.determinant;
  ctx.results["det_qua"] = nq.determinant;
}

void write_manifest(const RunConfig& c, const RunContext& ctx, int status, const std::string& error,
                    double total) {
  json m;
  m["command"] = c.command;
  m["config"] = to_json(c);
  m["versions"] = {{"fcfv", FCFV_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__},
                   {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  json timings = ctx.timings;
  timings["total_s"] = total;
  m["timings"] = timings;
  m["outputs"] = ctx.outputs;
  m["results"] = ctx.results;
  m["status"] = status;
  if (!error.empty()) m["error"] = error;
  std::ofstream f(ctx.out / "manifest.json");
  if (f) f << m.dump(2) << '\n';
}

std::string usage() {
  std::string s = "usage: fcfv <command> [--config file] [options]\ncommands:";
  for (const auto& c : kCommands) s += " " + c;
  return s + "\n";
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> keys{
      "command", "mesh",     "cell_type", "nsd",   "level", "divisions", "case",   "tau",
      "eps",     "max_iter", "seed",      "distort", "stretch", "relative", "levels", "taus",
      "solver",  "out",      "gamma",     "length", "n_lambda", "n_theta", "edges"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  RunConfig c;
  read_key(j, "command", c.command);
  read_key(j, "mesh", c.mesh);
  read_key(j, "cell_type", c.cell_type);
  read_key(j, "nsd", c.nsd);
  read_key(j, "level", c.level);
  read_key(j, "divisions", c.divisions);
  read_key(j, "case", c.case_name);
  read_key(j, "tau", c.tau);
  read_key(j, "eps", c.eps);
  read_key(j, "max_iter", c.max_iter);
  read_key(j, "seed", c.seed);
  read_key(j, "distort", c.distort);
  read_key(j, "stretch", c.stretch);
  read_key(j, "relative", c.relative);
  read_key(j, "levels", c.levels);
  read_key(j, "taus", c.taus);
  read_key(j, "solver", c.solver);
  read_key(j, "out", c.out);
  read_key(j, "gamma", c.gamma);
  read_key(j, "length", c.length);
  read_key(j, "n_lambda", c.n_lambda);
  read_key(j, "n_theta", c.n_theta);
  read_key(j, "edges", c.edges);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

int run(const RunConfig& c, std::ostream& log) {
  RunContext ctx;
  ctx.out = c.out;
  const auto t0 = std::chrono::steady_clock::now();
  int status = kExitOk;
  std::string error;
  try {
    if (!known_command(c.command)) throw ConfigError("unknown command '" + c.command + "'");
    if (!c.mesh.empty() && !fs::exists(c.mesh)) throw ConfigError("mesh file not found: " + c.mesh);
    if (!c.solver.empty()) solver_kind_from_string(c.solver);
    if (!c.case_name.empty() && !is_stokes_case(c.case_name)) poisson_case(c.case_name);
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) throw ConfigError("cannot create output directory " + c.out);

    if (c.command == "generate-mesh") cmd_generate(c, ctx);
    else if (c.command == "solve-poisson") cmd_solve_poisson(c, ctx);
    else if (c.command == "solve-stokes") cmd_solve_stokes(c, ctx);
    else if (c.command == "converge") cmd_converge(c, ctx);
    else if (c.command == "tau-sweep") cmd_tau_sweep(c, ctx);
    else if (c.command == "adapt") cmd_adapt(c, ctx);
    else if (c.command == "swimmer-surface") cmd_swimmer(c, ctx);
    else cmd_legacy(c, ctx);
  } catch (const ConfigError& ex) {
    status = kExitConfig;
    error = ex.what();
  } catch (const SolverError& ex) {
    status = kExitSolver;
    error = ex.what();
  } catch (const MeshError& ex) {
    status = kExitMesh;
    error = ex.what();
  } catch (const std::invalid_argument& ex) {
    status = kExitConfig;
    error = ex.what();
  } catch (const std::exception& ex) {
    status = kExitOther;
    error = ex.what();
  }
  if (!error.empty()) log << "error: " << error << '\n';
  if (fs::is_directory(ctx.out)) write_manifest(c, ctx, status, error, seconds(t0));
  return status;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Face-centred finite volume solver"};
  std::string command, config_path, cell_type, case_name, mesh, solver, output;
  double tau = 0, eps = 0, stretch = 1, gamma = 0;
  int level = 0, divisions = 0, nsd = 0, max_iter = 0;
  std::uint64_t seed = 0;
  std::vector<int> levels;
  std::vector<double> taus, edges;
  bool distort = false;
  app.add_option("command", command, "Command to run");
  app.add_option("--config", config_path, "JSON config file");
  auto* o_tau = app.add_option("--tau", tau, "Stabilisation parameter");
  auto* o_eps = app.add_option("--eps", eps, "Adaptive tolerance per cell");
  auto* o_level = app.add_option("--level", level, "Refinement level");
  auto* o_div = app.add_option("--divisions", divisions, "Grid divisions per axis");
  auto* o_cell = app.add_option("--cell-type", cell_type, "TRI QUA TET HEX PRI PYR HYBRID");
  auto* o_seed = app.add_option("--seed", seed, "Random seed");
  auto* o_out = app.add_option("--out", output, "Output directory");
  auto* o_case = app.add_option("--case", case_name, "Registered case name");
  auto* o_mesh = app.add_option("--mesh", mesh, "Mesh JSON input");
  auto* o_solver = app.add_option("--solver", solver, "sparse-lu ldlt cg schur-cg");
  auto* o_nsd = app.add_option("--nsd", nsd, "Spatial dimension");
  auto* o_iter = app.add_option("--max-iter", max_iter, "Adaptive iterations");
  auto* o_levels = app.add_option("--levels", levels, "Levels for converge and tau-sweep");
  auto* o_taus = app.add_option("--taus", taus, "Stabilisation values for tau-sweep");
  auto* o_stretch = app.add_option("--stretch", stretch, "Stretching factor");
  auto* o_gamma = app.add_option("--gamma", gamma, "Swimmer twist");
  auto* o_edges = app.add_option("--edges", edges, "Edge lengths for legacy-demo");
  auto* o_distort = app.add_flag("--distort", distort, "Randomly distort the mesh");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help() << usage();
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << '\n' << usage();
    return kExitConfig;
  }

  RunConfig c;
  try {
    if (!config_path.empty()) c = load_config(config_path);
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitConfig;
  }
  if (!command.empty()) c.command = command;
  if (*o_tau) c.tau = tau;
  if (*o_eps) c.eps = eps;
  if (*o_level) c.level = level;
  if (*o_div) c.divisions = divisions;
  if (*o_cell) c.cell_type = cell_type;
  if (*o_seed) c.seed = seed;
  if (*o_out) c.out = output;
  if (*o_case) c.case_name = case_name;
  if (*o_mesh) c.mesh = mesh;
  if (*o_solver) c.solver = solver;
  if (*o_nsd) c.nsd = nsd;
  if (*o_iter) c.max_iter = max_iter;
  if (*o_levels) c.levels = levels;
  if (*o_taus) c.taus = taus;
  if (*o_stretch) c.stretch = stretch;
  if (*o_gamma) c.gamma = gamma;
  if (*o_edges) c.edges = edges;
  if (*o_distort) c.distort = distort;
  if (!known_command(c.command)) {
    err << "error: unknown command '" << c.command << "'\n" << usage();
    return kExitConfig;
  }
  return run(c, err);
}

}  // namespace fcfv
