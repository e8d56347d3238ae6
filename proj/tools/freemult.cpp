#include "freemult/errors.hpp"
#include "freemult/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Flags {
  std::string config;
  std::optional<long long> seed;
  std::optional<std::string> out;
  std::optional<std::string> n_grid;
  std::optional<int> N;
  std::optional<std::string> r;
  std::optional<int> workers;
  bool svg = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Config file of `key = value` lines")->required();
  cmd->add_option("--seed", f.seed, "Base seed (trial t uses seed + t)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--n-grid", f.n_grid, "Comma-separated product lengths, e.g. 4,8,16");
  cmd->add_option("--N", f.N, "Matrix size");
  cmd->add_option("--r", f.r, "Comma-separated Wasserstein orders, e.g. 1,2");
  cmd->add_option("--workers", f.workers, "Worker threads (0: hardware concurrency)");
  cmd->add_flag("--svg", f.svg, "Also write SVG plots");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free multiplicative CLT laboratory"};
  app.require_subcommand(1);
  Flags flags;
  auto* cumulants = app.add_subcommand(
      "cumulants", "Free cumulants of Y_n against the limit.\n  cumulants.csv: n,k,yn_cumulant,limit_cumulant,residual");
  auto* limit = app.add_subcommand(
      "limit-law", "Limit-law density tables.\n  limit_law_log.csv, limit_law_singular.csv: t,pdf,cdf");
  auto* convergence = app.add_subcommand(
      "convergence",
      "Exact and matrix convergence studies.\n"
      "  convergence_exact.csv: n,k,yn_cumulant,limit_cumulant,residual\n"
      "  convergence_matrix.csv: trial,seed,n,N,kolmogorov,W_<r>...\n"
      "  convergence_summary.csv: route,metric,r,gamma,fitted_decay,fit_beta1,fit_beta2,fit_r2,\n"
      "    predicted_beta1,predicted_beta2,branch,status");
  auto* verify = app.add_subcommand("verify", "Identity and lemma verification suite.\n  verify.csv: check,value,tolerance,status");
  for (auto* cmd : {cumulants, limit, convergence, verify}) add_flags(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? freemult::kExitPass : freemult::kExitUsage;
  }

  std::string const name = app.get_subcommands().front()->get_name();
  freemult::ExperimentConfig cfg;
  try {
    cfg = freemult::load_config(flags.config);
    if (flags.seed) freemult::set_config_value(cfg, "seed", std::to_string(*flags.seed));
    if (flags.out) freemult::set_config_value(cfg, "out", *flags.out);
    if (flags.n_grid) freemult::set_config_value(cfg, "n_grid", *flags.n_grid);
    if (flags.N) freemult::set_config_value(cfg, "N", std::to_string(*flags.N));
    if (flags.r) freemult::set_config_value(cfg, "r", *flags.r);
    if (flags.workers) freemult::set_config_value(cfg, "workers", std::to_string(*flags.workers));
    if (flags.svg) cfg.svg = true;
  } catch (freemult::ConfigError const& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return freemult::kExitUsage;
  }
  return freemult::run_command(name, cfg, std::cerr);
}
