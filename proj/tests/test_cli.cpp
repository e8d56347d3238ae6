#include "doctest.h"

#include "freemult/errors.hpp"
#include "freemult/experiments.hpp"
#include "freemult/metrics.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace freemult;
namespace fs = std::filesystem;

namespace {

fs::path scratch(std::string const& name) {
  fs::path const p = fs::temp_directory_path() / ("freemult_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig parse(std::string const& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(fs::path const& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Data rows of a CSV written by CsvWriter, split into cells.
std::vector<std::vector<std::string>> csv_rows(fs::path const& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  std::getline(in, line);
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

int run_cli(std::string const& args) {
  std::string const cmd = std::string(FREEMULT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int const status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("config parsing") {
  auto const cfg = parse("# model\n"
                         "xlaw = atomic   # two atoms\n"
                         "atoms = -1:0.5, 1:0.5\n"
                         "g = poly\n"
                         "g_coeffs = 1, 1, 0.5\n"
                         "\n"
                         "n_grid = 2,4,8\n"
                         "r = 1, 2, 3\n"
                         "seed = 42\n"
                         "svg = true\n");
  CHECK(cfg.xlaw == "atomic");
  CHECK(cfg.atoms.size() == 2);
  CHECK(cfg.g_coeffs == std::vector<double>{1, 1, 0.5});
  CHECK(cfg.n_grid == std::vector<int>{2, 4, 8});
  CHECK(cfg.r_values.size() == 3);
  CHECK(cfg.seed == 42);
  CHECK(cfg.svg);
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.exact_supported());

  CHECK_THROWS_AS(parse(""), ConfigError);
  CHECK_THROWS_AS(parse("# only a comment\n"), ConfigError);
  CHECK_THROWS_AS(parse("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(parse("N 12\n"), ConfigError);
  CHECK_THROWS_AS(parse("N = 12x\n"), ConfigError);
  CHECK_THROWS_AS(parse("n_grid = 2,,4\n"), ConfigError);
  CHECK_THROWS_AS(parse("svg = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse("seed = -1\n"), ConfigError);

  ExperimentConfig over = parse("N = 64\n");
  set_config_value(over, "N", "128");
  CHECK(over.N == 128);
}

TEST_CASE("config validation") {
  auto bad = [](std::string const& text) { CHECK_THROWS_AS(parse(text).validate(), ConfigError); };
  bad("N = 1\n");
  bad("n_grid = 8, 4\n");
  bad("n_grid = 0, 4\n");
  bad("K = 17\n");
  bad("k_max = 9\n");
  bad("trials = 0\n");
  bad("r = 0.5\n");
  bad("xlaw = cauchy\n");
  bad("g = sin\n");
  bad("g = poly\ng_coeffs = 2, 1\n");
  bad("xlaw = atomic\n");
  bad("xlaw = atomic\natoms = 1:1\n");
  bad("gamma = 1.5\n");
  bad("xlaw = rademacher\nmode = gue\n");
  CHECK_NOTHROW(parse("xlaw = semicircle\nmode = gue\n").validate());
}

TEST_CASE("cumulants subcommand") {
  auto const dir = scratch("cumulants");
  std::ostringstream log;
  SUBCASE("constant g") {
    auto cfg = parse("g = poly\ng_coeffs = 1\nn_grid = 1, 2, 4, 8\nK = 6\n");
    cfg.out_dir = dir.string();
    CHECK(run_command("cumulants", cfg, log) == kExitPass);
    auto const rows = csv_rows(dir / "cumulants.csv");
    CHECK(rows.size() == 24);
    for (auto const& r : rows) CHECK(std::stod(r[4]) == 0.0);
  }
  SUBCASE("exp model") {
    auto cfg = parse("g = exp\nxlaw = rademacher\nsigma = 0.5\nn_grid = 4, 16, 64, 256\nK = 3\n");
    cfg.out_dir = dir.string();
    CHECK(run_command("cumulants", cfg, log) == kExitPass);
    auto const rows = csv_rows(dir / "cumulants.csv");
    std::vector<double> resid2;
    for (auto const& r : rows) {
      if (r[1] == "1") CHECK(std::stod(r[3]) == doctest::Approx(std::exp(0.5)).epsilon(1e-13));
      if (r[1] == "2") resid2.push_back(std::stod(r[4]));
    }
    REQUIRE(resid2.size() == 4);
    for (std::size_t i = 1; i < resid2.size(); ++i) CHECK(resid2[i] < resid2[i - 1]);
  }
  SUBCASE("unsupported exact model is a usage error") {
    auto cfg = parse("xlaw = semicircle\ng = exp\n");
    cfg.out_dir = dir.string();
    CHECK(run_command("cumulants", cfg, log) == kExitUsage);
  }
}

TEST_CASE("limit-law subcommand") {
  auto const dir = scratch("limit");
  std::ostringstream log;
  auto cfg = parse("sigma = 0.5\nsvg = true\n");
  cfg.out_dir = dir.string();
  CHECK(run_command("limit-law", cfg, log) == kExitPass);
  auto const rows = csv_rows(dir / "limit_law_log.csv");
  REQUIRE(rows.size() > 100);
  double mass = 0, m2 = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::abs(std::stod(rows[i][1]) - std::stod(rows[rows.size() - 1 - i][1])) <= 1e-6);
    if (i + 1 < rows.size()) {
      double const t0 = std::stod(rows[i][0]), t1 = std::stod(rows[i + 1][0]);
      double const p0 = std::stod(rows[i][1]), p1 = std::stod(rows[i + 1][1]);
      mass += 0.5 * (t1 - t0) * (p0 + p1);
      m2 += 0.5 * (t1 - t0) * (t0 * t0 * p0 + t1 * t1 * p1);
    }
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
  // 2s S + 2s^2 U, s = 1/2: variance 4s^2 + 4s^4/3.
  CHECK(m2 == doctest::Approx(1.0 + 1.0 / 12).epsilon(1e-3));
  std::string const svg = slurp(dir / "limit_law.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("http://") == svg.find("http://www.w3.org/2000/svg"));
}

TEST_CASE("convergence subcommand") {
  std::ostringstream log;
  SUBCASE("constant g gives zero exact residuals") {
    auto const dir = scratch("conv_one");
    auto cfg = parse("g = poly\ng_coeffs = 1\nroute = exact\nn_grid = 4, 8, 16, 32\n");
    cfg.out_dir = dir.string();
    CHECK(run_command("convergence", cfg, log) == kExitPass);
    for (auto const& r : csv_rows(dir / "convergence_exact.csv")) CHECK(std::stod(r[4]) == 0.0);
    for (auto const& r : csv_rows(dir / "convergence_summary.csv")) CHECK(r.back() == "pass");
  }
  SUBCASE("exact route decay and rate columns") {
    auto const dir = scratch("conv_quad");
    auto cfg = parse("g = poly\ng_coeffs = 1, 1, 0.5\nsigma = 1\nroute = exact\nn_grid = 16, 32, 64, 128, 256\n");
    cfg.out_dir = dir.string();
    CHECK(run_command("convergence", cfg, log) == kExitPass);
    auto const rows = csv_rows(dir / "convergence_summary.csv");
    CHECK(rows.size() == 6);
    for (auto const& r : rows) {
      CHECK(std::stod(r[4]) >= 0.4);
      CHECK(r.back() == "pass");
    }
  }
  SUBCASE("synthetic injection recovers exponents") {
    std::vector<double> ns, ds;
    for (int e = 4; e <= 12; ++e) {
      ns.push_back(std::ldexp(1.0, e));
      ds.push_back(0.3 * std::pow(ns.back(), -0.25) * std::pow(std::log(ns.back()), 0.5));
    }
    auto const fit = rate_fit(ns, ds, true);
    CHECK(fit.beta1 == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(fit.beta2 == doctest::Approx(0.5).epsilon(1e-8));
  }
  SUBCASE("matrix route distances decrease") {
    auto const dir = scratch("conv_matrix");
    auto cfg = parse("xlaw = semicircle\nsigma = 0.5\ng = exp\nroute = matrix\nn_grid = 1, 4, 32\nN = 192\n"
                     "trials = 3\nr = 1\nseed = 5\n");
    cfg.out_dir = dir.string();
    CHECK(run_command("convergence", cfg, log) == kExitPass);
    std::vector<double> k(3, 0.0), w(3, 0.0);
    for (auto const& r : csv_rows(dir / "convergence_matrix.csv")) {
      std::size_t const i = r[2] == "1" ? 0 : r[2] == "4" ? 1 : 2;
      k[i] += std::stod(r[4]);
      w[i] += std::stod(r[5]);
    }
    CHECK(k[1] < k[0]);
    CHECK(k[2] < k[1]);
    CHECK(w[1] < w[0]);
    CHECK(w[2] < w[1]);
  }
  SUBCASE("byte-identical reruns for any worker count") {
    auto const a = scratch("conv_det_a"), b = scratch("conv_det_b");
    auto cfg = parse("xlaw = rademacher\nsigma = 0.5\ng = exp\nn_grid = 2, 4, 8, 16\nN = 48\ntrials = 3\nseed = 9\n");
    cfg.out_dir = a.string();
    cfg.workers = 1;
    CHECK(run_command("convergence", cfg, log) == kExitPass);
    cfg.out_dir = b.string();
    cfg.workers = 3;
    CHECK(run_command("convergence", cfg, log) == kExitPass);
    for (char const* f : {"convergence_exact.csv", "convergence_matrix.csv", "convergence_summary.csv"}) {
      CAPTURE(f);
      CHECK(!slurp(a / f).empty());
      CHECK(slurp(a / f) == slurp(b / f));
    }
  }
}

TEST_CASE("verify subcommand") {
  auto const dir = scratch("verify");
  std::ostringstream log;
  auto cfg = parse("seed = 1\n");
  cfg.out_dir = dir.string();
  CHECK(run_command("verify", cfg, log) == kExitPass);
  auto const rows = csv_rows(dir / "verify.csv");
  CHECK(rows.size() >= 10);
  for (auto const& r : rows) {
    CAPTURE(r[0]);
    CHECK(r[3] == "pass");
  }
}

TEST_CASE("command-line binary") {
  auto const dir = scratch("binary");
  std::ofstream(dir / "ok.cfg") << "g = poly\ng_coeffs = 1, 1\nn_grid = 4, 8\nK = 3\n";
  std::ofstream(dir / "empty.cfg") << "# nothing\n";
  std::ofstream(dir / "corrupt.cfg") << "sigma = abc\n";
  std::string const out = (dir / "out").string();
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("cumulants") == 2);
  CHECK(run_cli("cumulants --config " + (dir / "missing.cfg").string()) == 2);
  CHECK(run_cli("verify --config " + (dir / "empty.cfg").string()) == 2);
  CHECK(run_cli("verify --config " + (dir / "corrupt.cfg").string()) == 2);
  CHECK(run_cli("cumulants --config " + (dir / "ok.cfg").string() + " --out " + out + " --n-grid 2,4,8") == 0);
  CHECK(csv_rows(fs::path(out) / "cumulants.csv").size() == 9);
  CHECK(run_cli("cumulants --config " + (dir / "ok.cfg").string() + " --out " + out + " --n-grid 8,2") == 2);
  std::string const diag = (dir / "diag.txt").string();
  int const rc =
      std::system((std::string(FREEMULT_CLI_PATH) + " verify --config " + (dir / "corrupt.cfg").string() + " 2> " + diag)
                      .c_str());
  CHECK(WEXITSTATUS(rc) == 2);
  CHECK(slurp(diag).find("sigma") != std::string::npos);
}
