#include "freemult/experiments.hpp"

#include "freemult/errors.hpp"
#include "freemult/io.hpp"
#include "freemult/limitlaw.hpp"
#include "freemult/metrics.hpp"
#include "freemult/parallel.hpp"
#include "freemult/regkit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace freemult {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kExactRouteSlack = 0.1;

std::string trim(std::string const& s) {
  auto const b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto const e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string const& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(std::string const& key, std::string const& v) {
  double x = 0;
  auto const res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("`" + key + "`: expected a number, got '" + v + "'");
  return x;
}

long long to_int(std::string const& key, std::string const& v) {
  long long x = 0;
  auto const res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("`" + key + "`: expected an integer, got '" + v + "'");
  return x;
}

int to_small_int(std::string const& key, std::string const& v) {
  long long const x = to_int(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError("`" + key + "`: value out of range");
  return static_cast<int>(x);
}

bool to_bool(std::string const& key, std::string const& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("`" + key + "`: expected true or false, got '" + v + "'");
}

template <class T, class F>
std::vector<T> to_list(std::string const& key, std::string const& v, F conv) {
  std::vector<T> out;
  for (auto const& item : split(v, ',')) {
    if (item.empty()) throw ConfigError("`" + key + "`: empty list entry");
    out.push_back(conv(key, item));
  }
  if (out.empty()) throw ConfigError("`" + key + "`: empty list");
  return out;
}

std::string path_in(ExperimentConfig const& cfg, std::string const& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::ofstream open_out(ExperimentConfig const& cfg, std::string const& name, CommandResult& res) {
  std::filesystem::create_directories(cfg.out_dir);
  std::string const p = path_in(cfg, name);
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + p);
  res.files.push_back(p);
  return os;
}

std::vector<double> as_doubles(std::vector<int> const& v) { return {v.begin(), v.end()}; }

std::string branch_name(RateBranch b) { return b == RateBranch::minus ? "minus" : "plus"; }

std::string r_label(double r) { return fmt_num(r); }

// Fitted (beta1, beta2, r2) or NaNs when the grid is too short for the regression.
RateFit try_rate_fit(std::vector<double> const& ns, std::vector<double> const& ds, bool with_log) {
  bool usable = ns.size() >= 4;
  for (std::size_t i = 0; usable && i < ns.size(); ++i)
    usable = ds[i] > 0 && (!with_log || ns[i] > std::exp(1.0));
  if (!usable) return {kNaN, kNaN, kNaN};
  return rate_fit(ns, ds, with_log);
}

} // namespace

XLaw ExperimentConfig::law() const {
  if (xlaw == "rademacher") return XLaw::rademacher(sigma);
  if (xlaw == "semicircle") return XLaw::semicircle(sigma * sigma);
  if (xlaw == "uniform") return XLaw::uniform(sigma * std::sqrt(3.0));
  if (xlaw == "atomic") return XLaw::atomic(atoms);
  throw ConfigError("unknown xlaw '" + xlaw + "'");
}

ModelSpec ExperimentConfig::model() const {
  GFunc const gf = g == "exp" ? GFunc::exp() : GFunc::polynomial_real(g_coeffs);
  return ModelSpec{law(), gf, gamma};
}

MatrixEnsembleSpec ExperimentConfig::ensemble(int trial) const {
  MatrixEnsembleSpec s;
  s.N = N;
  s.xlaw = law();
  bool const gue = mode == "gue" || (mode == "auto" && s.xlaw.kind() == XLaw::Kind::semicircle);
  s.mode = gue ? EnsembleMode::gue : EnsembleMode::haar_conjugated_diagonal;
  s.seed = seed + static_cast<std::uint64_t>(trial);
  return s;
}

bool ExperimentConfig::exact_supported() const { return g == "poly" || law().is_atomic(); }
bool ExperimentConfig::run_exact() const { return route != "matrix"; }
bool ExperimentConfig::run_matrix() const { return route != "exact"; }

void ExperimentConfig::validate() const {
  auto fail = [](std::string const& m) { throw ConfigError(m); };
  if (xlaw != "rademacher" && xlaw != "semicircle" && xlaw != "uniform" && xlaw != "atomic")
    fail("xlaw must be rademacher, semicircle, uniform or atomic");
  if (xlaw == "atomic" && atoms.empty()) fail("xlaw = atomic needs `atoms`");
  if (xlaw != "atomic" && !(sigma > 0)) fail("sigma must be positive");
  if (g != "exp" && g != "poly") fail("g must be exp or poly");
  if (g == "poly" && (g_coeffs.empty() || g_coeffs[0] != 1.0)) fail("g_coeffs must start with 1");
  if (!(gamma > 0 && gamma <= 1)) fail("gamma must lie in (0, 1]");
  if (mode != "auto" && mode != "gue" && mode != "haar") fail("mode must be auto, gue or haar");
  if (route != "exact" && route != "matrix" && route != "both") fail("route must be exact, matrix or both");
  if (n_grid.empty()) fail("n_grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) fail("n_grid entries must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) fail("n_grid must be strictly increasing");
  }
  if (K < 1 || K > 16) fail("K must lie in [1, 16]");
  if (k_max < 1 || k_max > K) fail("k_max must lie in [1, K]");
  if (N < 2) fail("N must be at least 2");
  if (trials < 1) fail("trials must be positive");
  if (r_values.empty()) fail("r is empty");
  for (double r : r_values)
    if (!(r >= 1)) fail("r values must be at least 1");
  if (quantile_points < 16) fail("quantile_points must be at least 16");
  if (workers < 0) fail("workers must be non-negative");
  if (out_dir.empty()) fail("out must not be empty");
  try {
    ModelSpec const m = model();
    if (run_matrix()) ensemble(0).validate();
    (void)m;
  } catch (ConfigError const&) {
    throw;
  } catch (Error const& e) {
    throw ConfigError(e.what());
  }
}

void set_config_value(ExperimentConfig& cfg, std::string const& key, std::string const& value) {
  std::string const v = trim(value);
  if (key == "xlaw") cfg.xlaw = v;
  else if (key == "sigma") cfg.sigma = to_double(key, v);
  else if (key == "atoms") {
    cfg.atoms.clear();
    for (auto const& item : split(v, ',')) {
      auto const parts = split(item, ':');
      if (parts.size() != 2) throw ConfigError("`atoms`: expected atom:weight entries");
      cfg.atoms.emplace_back(to_double(key, parts[0]), to_double(key, parts[1]));
    }
  } else if (key == "g") cfg.g = v;
  else if (key == "g_coeffs") cfg.g_coeffs = to_list<double>(key, v, to_double);
  else if (key == "gamma") cfg.gamma = to_double(key, v);
  else if (key == "mode") cfg.mode = v;
  else if (key == "route") cfg.route = v;
  else if (key == "n_grid") cfg.n_grid = to_list<int>(key, v, to_small_int);
  else if (key == "K") cfg.K = to_small_int(key, v);
  else if (key == "k_max") cfg.k_max = to_small_int(key, v);
  else if (key == "N") cfg.N = to_small_int(key, v);
  else if (key == "trials") cfg.trials = to_small_int(key, v);
  else if (key == "seed") {
    long long const s = to_int(key, v);
    if (s < 0) throw ConfigError("`seed` must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "r") cfg.r_values = to_list<double>(key, v, to_double);
  else if (key == "quantile_points") cfg.quantile_points = to_small_int(key, v);
  else if (key == "workers") cfg.workers = to_small_int(key, v);
  else if (key == "out") cfg.out_dir = v;
  else if (key == "svg") cfg.svg = to_bool(key, v);
  else throw ConfigError("unknown key `" + key + "`");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0, keys = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto const hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto const eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected `key = value`");
    std::string const key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": missing key");
    try {
      set_config_value(cfg, key, line.substr(eq + 1));
    } catch (ConfigError const& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
    ++keys;
  }
  if (keys == 0) throw ConfigError("config file contains no settings");
  return cfg;
}

ExperimentConfig load_config(std::string const& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

CommandResult cmd_cumulants(ExperimentConfig const& cfg, std::ostream& log) {
  cfg.validate();
  if (!cfg.exact_supported())
    throw ConfigError("cumulants need a polynomial g or an atomic x-law (got g = exp with " + cfg.xlaw + ")");
  CommandResult res;
  ModelSpec const model = cfg.model();
  CumulantSeq const limit = limit_cumulants(LimitParams::from_model(model), cfg.K);
  std::vector<CumulantSeq> rows(cfg.n_grid.size());
  parallel_for(rows.size(), cfg.workers, [&](std::size_t i) { rows[i] = yn_cumulants(model, cfg.n_grid[i], cfg.K); });
  auto os = open_out(cfg, "cumulants.csv", res);
  CsvWriter w(os, "cumulants", {"n", "k", "yn_cumulant", "limit_cumulant", "residual"});
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int k = 1; k <= cfg.K; ++k) {
      double const y = rows[i](k), l = limit(k);
      w.row(std::vector<double>{double(cfg.n_grid[i]), double(k), y, l, std::abs(y - l)});
    }
  log << "cumulants: " << rows.size() << " n values, K = " << cfg.K << '\n';
  return res;
}

CommandResult cmd_limit_law(ExperimentConfig const& cfg, std::ostream& log) {
  cfg.validate();
  CommandResult res;
  LimitParams const p = LimitParams::from_model(cfg.model());
  DensityOptions opt;
  opt.workers = cfg.workers;
  DensityTable const loglaw = log_law_density(p.sigma_ho, opt);
  DensityTable const sing = psc_singular_table(p, opt);
  {
    auto os = open_out(cfg, "limit_law_log.csv", res);
    loglaw.write_csv(os, "limit-law");
  }
  {
    auto os = open_out(cfg, "limit_law_singular.csv", res);
    sing.write_csv(os, "limit-law");
  }
  if (cfg.svg) {
    auto os = open_out(cfg, "limit_law.svg", res);
    write_svg_plot(os, "Limit law densities", "t", "density",
                   {{"log-law", loglaw.grid(), loglaw.pdf()}, {"singular values", sing.grid(), sing.pdf()}});
  }
  double const s2 = p.sigma_ho * p.sigma_ho;
  double const mean = loglaw.moment(1);
  log << "limit-law: sigma = " << fmt_num(p.sigma_ho) << ", mass = " << fmt_num(loglaw.mass())
      << ", variance = " << fmt_num(loglaw.moment(2) - mean * mean) << " (expected "
      << fmt_num(4 * s2 + 4 * s2 * s2 / 3) << ")\n";
  return res;
}

CommandResult cmd_convergence(ExperimentConfig const& cfg, std::ostream& log) {
  cfg.validate();
  if (cfg.run_exact() && cfg.route == "exact" && !cfg.exact_supported())
    throw ConfigError("exact route needs a polynomial g or an atomic x-law");
  CommandResult res;
  ModelSpec const model = cfg.model();
  LimitParams const lp = LimitParams::from_model(model);
  std::vector<double> const ns = as_doubles(cfg.n_grid);

  std::vector<std::vector<std::string>> summary;
  auto summary_row = [&](std::string const& route, std::string const& metric, double r, RateFit const& fit,
                         double fitted, RatePrediction const& pred, std::string const& status) {
    summary.push_back({route, metric, r_label(r), fmt_num(cfg.gamma), fmt_num(fitted), fmt_num(fit.beta1),
                       fmt_num(fit.beta2), fmt_num(fit.r2), fmt_num(pred.beta1), fmt_num(pred.beta2),
                       branch_name(pred.branch), status});
  };

  if (cfg.run_exact() && cfg.exact_supported()) {
    CumulantSeq const limit = limit_cumulants(lp, cfg.k_max);
    std::vector<CumulantSeq> rows(cfg.n_grid.size());
    parallel_for(rows.size(), cfg.workers,
                 [&](std::size_t i) { rows[i] = yn_cumulants(model, cfg.n_grid[i], cfg.k_max); });
    auto os = open_out(cfg, "convergence_exact.csv", res);
    CsvWriter w(os, "convergence", {"n", "k", "yn_cumulant", "limit_cumulant", "residual"});
    std::vector<std::vector<double>> resid(static_cast<std::size_t>(cfg.k_max));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (int k = 1; k <= cfg.k_max; ++k) {
        double const y = rows[i](k), l = limit(k);
        resid[static_cast<std::size_t>(k - 1)].push_back(std::abs(y - l));
        w.row(std::vector<double>{ns[i], double(k), y, l, std::abs(y - l)});
      }
    for (int k = 1; k <= cfg.k_max; ++k) {
      auto const& rk = resid[static_cast<std::size_t>(k - 1)];
      bool const zero = std::all_of(rk.begin(), rk.end(), [](double x) { return x == 0.0; });
      double const fitted =
          zero ? std::numeric_limits<double>::infinity() : (ns.size() >= 2 ? fitted_decay_exponent(cfg.n_grid, rk) : kNaN);
      RateFit const fit = zero ? RateFit{kNaN, kNaN, kNaN} : try_rate_fit(ns, rk, true);
      for (double r : cfg.r_values) {
        RatePrediction const pred = rate_lookup(r, cfg.gamma);
        bool const ok = zero || (std::isfinite(fitted) && fitted >= pred.beta1 - kExactRouteSlack);
        if (!ok)
          res.failures.push_back("exact route kappa_" + std::to_string(k) + ": fitted decay " + fmt_num(fitted) +
                                 " slower than n^-" + fmt_num(pred.beta1) + " (r = " + r_label(r) + ")");
        summary_row("exact", "kappa_" + std::to_string(k), r, fit, fitted, pred, ok ? "pass" : "fail");
      }
    }
  } else if (cfg.run_exact()) {
    log << "convergence: exact route skipped (g = exp needs an atomic x-law)\n";
  }

  if (cfg.run_matrix()) {
    std::vector<double> probs(static_cast<std::size_t>(cfg.quantile_points));
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(probs.size());
    DensityOptions opt;
    opt.workers = cfg.workers;
    SpectralSample const ref(psc_singular_quantiles(lp, probs, opt));
    std::size_t const nr = cfg.r_values.size(), nn = cfg.n_grid.size();
    std::size_t const T = static_cast<std::size_t>(cfg.trials);
    // dist[t][i][0] = Kolmogorov, dist[t][i][1 + j] = W_{r_j}.
    std::vector<std::vector<std::vector<double>>> dist(T, std::vector<std::vector<double>>(nn, std::vector<double>(nr + 1)));
    parallel_for(T * nn, cfg.workers, [&](std::size_t job) {
      std::size_t const t = job / nn, i = job % nn;
      SpectralSample const sv = product_singular_values(cfg.ensemble(static_cast<int>(t)), model.g, cfg.n_grid[i], 1);
      dist[t][i][0] = kolmogorov(sv, ref);
      for (std::size_t j = 0; j < nr; ++j) dist[t][i][1 + j] = wasserstein_r(sv, ref, cfg.r_values[j]);
    });
    auto os = open_out(cfg, "convergence_matrix.csv", res);
    std::vector<std::string> cols{"trial", "seed", "n", "N", "kolmogorov"};
    for (double r : cfg.r_values) cols.push_back("W_" + r_label(r));
    CsvWriter w(os, "convergence", cols);
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t i = 0; i < nn; ++i) {
        std::vector<std::string> row{std::to_string(t), std::to_string(cfg.seed + t), std::to_string(cfg.n_grid[i]),
                                     std::to_string(cfg.N)};
        for (double d : dist[t][i]) row.push_back(fmt_num(d));
        w.row(row);
      }
    int decreasing = 0;
    for (std::size_t t = 0; t < T; ++t) {
      bool dec = true;
      for (std::size_t i = 1; i < nn; ++i) dec = dec && dist[t][i][0] < dist[t][i - 1][0];
      decreasing += dec;
    }
    for (std::size_t m = 0; m <= nr; ++m) {
      std::vector<double> mean(nn, 0.0);
      for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t t = 0; t < T; ++t) mean[i] += dist[t][i][m];
        mean[i] /= static_cast<double>(T);
      }
      RateFit const fit = try_rate_fit(ns, mean, false);
      if (m == 0) {
        // Kolmogorov: half the r = 1 exponents.
        RatePrediction pred = rate_lookup(1.0, cfg.gamma);
        pred.beta1 /= 2;
        pred.beta2 /= 2;
        summary_row("matrix", "kolmogorov", 1.0, fit, fit.beta1, pred, "reported");
      } else {
        double const r = cfg.r_values[m - 1];
        summary_row("matrix", "W_" + r_label(r), r, fit, fit.beta1, rate_lookup(r, cfg.gamma), "reported");
      }
    }
    log << "convergence: Kolmogorov distance decreasing over the n-grid in " << decreasing << " of " << T
        << " trials\n";
  }

  auto os = open_out(cfg, "convergence_summary.csv", res);
  CsvWriter w(os, "convergence",
              {"route", "metric", "r", "gamma", "fitted_decay", "fit_beta1", "fit_beta2", "fit_r2", "predicted_beta1",
               "predicted_beta2", "branch", "status"});
  for (auto const& row : summary) w.row(row);
  for (auto const& f : res.failures) log << "FAIL " << f << '\n';
  if (!res.failures.empty()) res.exit_code = kExitAssertion;
  return res;
}

CommandResult cmd_verify(ExperimentConfig const& cfg, std::ostream& log) {
  cfg.validate();
  CommandResult res;
  std::vector<std::vector<std::string>> rows;
  auto record = [&](std::string const& check, double value, double tol, bool ok) {
    rows.push_back({check, fmt_num(value), fmt_num(tol), ok ? "pass" : "fail"});
    if (!ok) res.failures.push_back(check + " = " + fmt_num(value) + " (tolerance " + fmt_num(tol) + ")");
  };
  std::uint64_t const seed = cfg.seed;

  {
    double worst = 0;
    for (int s = 0; s < 100; ++s) {
      int const N = 2 << (s % 4);
      Rng rng = stream_rng(seed, static_cast<std::uint64_t>(s));
      std::normal_distribution<double> nd(0.0, 1.0);
      CMatrix X(N, N);
      for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) X(i, j) = {nd(rng), nd(rng)};
      X /= std::sqrt(0.5 * N);
      double const u = std::uniform_real_distribution<double>(-3, 3)(rng);
      worst = std::max(worst, hermitization_check(X, u) / N);
    }
    record("hermitization_per_N", worst, 1e-10, worst <= 1e-10);
  }
  {
    double worst = 0;
    Rng rng = stream_rng(seed, 1000);
    std::normal_distribution<double> nd(0.0, 1.0);
    auto herm = [&](int N) {
      CMatrix a(N, N);
      for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) a(i, j) = {nd(rng), nd(rng)};
      return CMatrix((a + a.adjoint()) / std::sqrt(8.0 * N));
    };
    for (int m = 1; m <= 3; ++m)
      for (int N = 2; N <= 4; ++N) {
        CMatrix const X = herm(N), Y = herm(N);
        worst = std::max(worst, duhamel_check(X, Y, m).scaled());
      }
    record("duhamel_scaled", worst, 1e-8, worst <= 1e-8);
  }
  {
    double worst = 0;
    Rng rng = stream_rng(seed, 2000);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 5), size(1, 6), bit(0, 1);
    for (int t = 0; t < 50; ++t) {
      int const m = len(rng), N = size(rng);
      std::vector<CMatrix> xs;
      std::vector<int> eps;
      for (int i = 0; i < m; ++i) {
        CMatrix a(N, N);
        for (int j = 0; j < N; ++j)
          for (int k = 0; k < N; ++k) a(k, j) = {nd(rng), nd(rng)};
        xs.push_back(a / std::sqrt(0.5 * N));
        eps.push_back(bit(rng));
      }
      worst = std::max(worst, ampliation_check(xs, eps));
    }
    record("ampliation", worst, 1e-12, worst <= 1e-12);
  }
  {
    MatrixEnsembleSpec spec = cfg.ensemble(0);
    GFunc g = cfg.model().g;
    if (!(cfg.exact_supported())) {
      spec.xlaw = XLaw::rademacher(1.0);
      spec.mode = EnsembleMode::haar_conjugated_diagonal;
      g = GFunc::polynomial_real({1.0, 1.0, 0.5});
    }
    spec.N = 8;
    double worst = 0;
    bool holds = true;
    for (int n = 1; n <= 6; ++n)
      for (int p : {2, 4}) {
        auto const rep = partial_product_check(spec, g, n, p, 0);
        holds = holds && rep.surrogate_available && rep.surrogate_holds;
        worst = std::max(worst, rep.surrogate_worst_ratio);
      }
    record("partial_product_surrogate", worst, 1.0 + 1e-9, holds);
  }
  {
    LimitParams const lp = LimitParams::exp_normalized(0.5);
    DensityTable const ref = psc_singular_table(lp);
    MatrixEnsembleSpec spec;
    spec.N = 64;
    spec.seed = seed;
    bool holds = true;
    double worst = 0;
    for (int n : {2, 8, 32}) {
      KwResult const kw = kw_bound_check(product_singular_values(spec, GFunc::exp(), n), ref);
      holds = holds && kw.holds;
      worst = std::max(worst, kw.K / kw.bound);
    }
    record("kw_bound_ratio", worst, 1.0, holds);
  }
  {
    std::vector<double> const eps{0.2, 0.1, 0.05, 0.025}, zeta{0.8, 0.4, 0.2, 0.1};
    IkReport const l1 = ik_scaling_report(TestFunction::monomial(0), {1, 2, 3, 4}, eps, zeta);
    IkReport const l2 = ik_scaling_report(TestFunction::monomial(1), {0, 1, 2, 3, 4}, eps, zeta);
    double excess = -std::numeric_limits<double>::infinity();
    for (auto const* rep : {&l1, &l2})
      for (auto const& row : rep->rows)
        if (!row.predicted.log_case) excess = std::max(excess, row.fitted_eps - row.predicted.eps_exp);
    record("ik_eps_exponent_excess", excess, 0.4, l1.passed() && l2.passed());
  }
  {
    std::vector<double> grid;
    for (int i = 0; i <= 480; ++i) grid.push_back(-12.0 + 0.05 * i);
    double const tr = truncation_error_scan(TestFunction::monomial(0), 0.3, grid);
    record("truncation_ratio", tr, 1 + 1e-6, tr <= 1 + 1e-6);
    double const sm = smoothing_error_scan(TestFunction::monomial(0), 0.3, SmoothingKernel(0.1, 0), grid);
    record("smoothing_ratio", sm, 1 + 1e-6, sm <= 1 + 1e-6);
    std::vector<double> g6;
    for (int i = 0; i < 300; ++i) g6.push_back(-6.0 + 12.0 * i / 299.0);
    SmoothingScaling const sc = smoothing_scaling(TestFunction::monomial(1), 0.2, 0.1, g6);
    record("smoothing_scaling_exponent", sc.fitted, 0.25, sc.within(0.25));
  }
  {
    ModelSpec model = cfg.model();
    if (model.g.kind() != GFunc::Kind::polynomial || !model.xlaw.is_atomic())
      model = ModelSpec{XLaw::rademacher(1.0), GFunc::polynomial_real({1.0, 1.0, 0.5}), 1.0};
    std::vector<int> grid;
    for (int e = 4; e <= 10; ++e) grid.push_back(1 << e);
    B2Report const b2 = lemma_b2_expansion_check(model, grid);
    record("b2_kappa2_exponent", b2.exponent2, 1.4, b2.passed());
    B2Report const lin =
        lemma_b2_expansion_check(ModelSpec{XLaw::rademacher(1.0), GFunc::polynomial_real({1.0, 1.0}), 1.0}, grid);
    double worst = 0;
    for (auto const& r : lin.rows) worst = std::max({worst, r.resid1, r.resid2});
    record("b2_linear_residual", worst, 0.0, worst == 0.0);
  }

  auto os = open_out(cfg, "verify.csv", res);
  CsvWriter w(os, "verify", {"check", "value", "tolerance", "status"});
  for (auto const& row : rows) {
    w.row(row);
    log << row[3] << ' ' << row[0] << " = " << row[1] << " (tolerance " << row[2] << ")\n";
  }
  if (!res.failures.empty()) res.exit_code = kExitAssertion;
  return res;
}

int run_command(std::string const& name, ExperimentConfig const& cfg, std::ostream& log) {
  try {
    CommandResult res;
    if (name == "cumulants") res = cmd_cumulants(cfg, log);
    else if (name == "limit-law") res = cmd_limit_law(cfg, log);
    else if (name == "convergence") res = cmd_convergence(cfg, log);
    else if (name == "verify") res = cmd_verify(cfg, log);
    else {
      log << "error: unknown subcommand '" << name << "'\n";
      return kExitUsage;
    }
    for (auto const& f : res.files) log << "wrote " << f << '\n';
    return res.exit_code;
  } catch (ConfigError const& e) {
    log << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (std::filesystem::filesystem_error const& e) {
    log << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (Error const& e) {
    log << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

} // namespace freemult
