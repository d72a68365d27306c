#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fcfv {

/// Exit statuses of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitMesh = 4,
};

struct RunConfig {
  /// generate-mesh | solve-poisson | solve-stokes | converge | tau-sweep |
  /// adapt | swimmer-surface | legacy-demo
  std::string command;
  /// Mesh JSON input; when empty the mesh comes from the generator fields.
  std::string mesh;
  std::string cell_type = "TRI";
  /// 0 infers the dimension from the cell type or case (HYBRID defaults to 2).
  int nsd = 0;
  int level = 3;
  /// Grid divisions per axis; overrides `level` when positive.
  int divisions = 0;
  /// Registered case name; empty selects the command's default.
  std::string case_name;
  /// 0 selects 1e4 in 2D and 1e2 in 3D.
  double tau = 0.0;
  double eps = 1e-2;
  int max_iter = 10;
  std::uint64_t seed = 1;
  bool distort = false;
  double stretch = 1.0;
  bool relative = false;
  std::vector<int> levels;
  std::vector<double> taus;
  /// sparse-lu | ldlt | cg | schur-cg; empty selects the problem default.
  std::string solver;
  std::string out = "out";
  double gamma = 0.0;
  double length = 1.0;
  int n_lambda = 65;
  int n_theta = 32;
  /// Edge lengths for legacy-demo (3 or 4 values).
  std::vector<double> edges;
};

/// Strict JSON config: unknown keys or wrong types throw ConfigError.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

/// Runs one command, writing artifacts and out/manifest.json. Returns an ExitCode.
int run(const RunConfig& config, std::ostream& log);

/// Full driver: flag parsing (--config plus per-command overrides) and run().
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fcfv
