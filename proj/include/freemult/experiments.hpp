#pragma once

// Experiment configuration and the four driver subcommands.

#include "freemult/matrixlab.hpp"
#include "freemult/model.hpp"

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace freemult {

enum ExitCode : int { kExitPass = 0, kExitAssertion = 1, kExitUsage = 2, kExitNumeric = 3 };

struct ExperimentConfig {
  std::string xlaw = "rademacher"; ///< rademacher | semicircle | uniform | atomic
  double sigma = 0.5;              ///< standard deviation of x
  std::vector<std::pair<double, double>> atoms; ///< atomic law: (atom, weight)
  std::string g = "exp";           ///< exp | poly
  std::vector<double> g_coeffs{1.0};
  double gamma = 1.0;
  std::string mode = "auto";  ///< auto | gue | haar
  std::string route = "both"; ///< exact | matrix | both
  std::vector<int> n_grid{16, 32, 64, 128};
  int K = 8;
  int k_max = 3;
  int N = 256;
  int trials = 4;
  std::uint64_t seed = 1;
  std::vector<double> r_values{1.0, 2.0};
  int quantile_points = 4000;
  int workers = 1;
  std::string out_dir = ".";
  bool svg = false;

  XLaw law() const;
  ModelSpec model() const;
  /// Ensemble of trial `trial`: seed + trial.
  MatrixEnsembleSpec ensemble(int trial) const;
  /// Exact cumulants available: polynomial g or an atomic law.
  bool exact_supported() const;
  bool run_exact() const;
  bool run_matrix() const;
  /// Throws ConfigError.
  void validate() const;
};

/// Sets one key; throws ConfigError on unknown keys or malformed values.
void set_config_value(ExperimentConfig& cfg, std::string const& key, std::string const& value);
/// Flat `key = value` lines, `#` comments. A file without keys is rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(std::string const& path);

struct CommandResult {
  int exit_code = kExitPass;
  std::vector<std::string> files;
  std::vector<std::string> failures;
};

/// cumulants.csv: n, k, yn_cumulant, limit_cumulant, residual.
CommandResult cmd_cumulants(ExperimentConfig const& cfg, std::ostream& log);
/// limit_law_log.csv, limit_law_singular.csv (t, pdf, cdf), limit_law.svg.
CommandResult cmd_limit_law(ExperimentConfig const& cfg, std::ostream& log);
/// convergence_exact.csv, convergence_matrix.csv, convergence_summary.csv.
CommandResult cmd_convergence(ExperimentConfig const& cfg, std::ostream& log);
/// verify.csv: check, value, tolerance, status.
CommandResult cmd_verify(ExperimentConfig const& cfg, std::ostream& log);

/// Dispatches by name and maps exceptions to exit codes.
int run_command(std::string const& name, ExperimentConfig const& cfg, std::ostream& log);

} // namespace freemult
