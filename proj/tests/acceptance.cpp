// Acceptance suite: one pass/fail line per criterion.

#include "freemult/errors.hpp"
#include "freemult/experiments.hpp"
#include "freemult/freecalc.hpp"
#include "freemult/limitlaw.hpp"
#include "freemult/matrixlab.hpp"
#include "freemult/metrics.hpp"
#include "freemult/model.hpp"
#include "freemult/ncpart.hpp"
#include "freemult/parallel.hpp"
#include "freemult/regkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace freemult;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

fs::path scratch(std::string const& name) {
  fs::path const p = fs::temp_directory_path() / ("freemult_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(fs::path const& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

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

ExperimentConfig config(std::string const& text) {
  std::istringstream in(text);
  return parse_config(in);
}

// 1. Combinatorics.
Outcome criterion1() {
  bool ok = true;
  for (int m = 1; m <= 12; ++m) ok = ok && BigInt(enumerate_nc(m).size()) == catalan(m);
  // Catalan numbers from the ballot recursion.
  std::vector<long long> cat{1};
  for (int m = 1; m <= 12; ++m) {
    long long c = 0;
    for (int i = 0; i < m; ++i) c += cat[static_cast<std::size_t>(i)] * cat[static_cast<std::size_t>(m - 1 - i)];
    cat.push_back(c);
    ok = ok && catalan(m) == c;
  }
  bool const counts = ok;

  bool mob = true;
  for (int m = 1; m <= 6; ++m) {
    auto const all = enumerate_nc(m);
    for (auto const& s : all)
      for (auto const& p : all) {
        if (!s.refines(p)) continue;
        long long sum = 0;
        for (auto const& t : all)
          if (s.refines(t) && t.refines(p)) sum += mobius_nc(s, t);
        mob = mob && sum == (s == p ? 1 : 0);
      }
  }

  bool nk = true;
  int cases = 0;
  for (int k = 2; k <= 12; ++k)
    for (int n = 1; k * n <= 12; ++n) {
      int const m = k * n;
      long long brute = 0;
      for (auto const& p : enumerate_nc(m)) {
        auto const sizes = p.block_sizes();
        if (!std::all_of(sizes.begin(), sizes.end(), [n](int s) { return s == n; })) continue;
        NCPartition const kr = kreweras(p);
        if (p.block_count() + kr.block_count() != m + 1) nk = false;
        bool same_factor = true;
        for (auto const& b : kr.blocks())
          for (int e : b) same_factor = same_factor && (e - b.front()) % n == 0;
        if (!same_factor) continue;
        auto const ks = kr.block_sizes();
        if (std::all_of(ks.begin(), ks.end(), [](int s) { return s <= 2; })) ++brute;
      }
      nk = nk && count_nc_nk21(n, k) == brute;
      ++cases;
    }
  return {counts && mob && nk, "Catalan m<=12 " + std::string(counts ? "ok" : "FAILED") + ", Moebius sums m<=6 " +
                                   (mob ? "ok" : "FAILED") + ", nk21 counts " + (nk ? "ok" : "FAILED") + " over " +
                                   std::to_string(cases) + " (n,k)"};
}

// 2. Limit cumulants against an independent evaluator.
Outcome criterion2() {
  double worst = 0, consistency = 0;
  for (double sigma : {0.25, 0.5}) {
    LimitParams const p = LimitParams::exp_normalized(sigma);
    for (int k = 1; k <= 8; ++k) {
      long double fact = 1;
      for (int j = 2; j <= k; ++j) fact *= j;
      long double const ref = std::pow(static_cast<long double>(k), k - 1) / fact *
                              std::pow(2.0L * sigma, 2.0L * (k - 1)) * std::exp(2.0L * k * sigma * sigma);
      worst = std::max(worst, static_cast<double>(std::abs(limit_cumulant(p, k) - ref) / ref));
    }
    consistency = std::max(consistency, s_transform_consistency(p, 8));
  }
  return {worst <= 1e-13 && consistency <= 1e-8,
          "max rel. deviation " + num(worst) + ", S-transform consistency " + num(consistency)};
}

// 3. Series route against partition enumeration.
Outcome criterion3() {
  std::vector<ModelSpec> models{
      {XLaw::rademacher(1.0), GFunc::polynomial_real({1.0, 1.0, 0.5}), 1.0},
      {XLaw::rademacher(0.5), GFunc::exp(), 1.0},
      {XLaw::semicircle(0.3), GFunc::polynomial_real({1.0, 0.7, -0.2, 0.1}), 1.0},
      {XLaw::uniform(1.2), GFunc::polynomial_real({1.0, -0.5, 0.4}), 1.0},
      {XLaw::two_point(0.25, 1.5, -0.5), GFunc::polynomial({1.0, {0.6, 0.3}, {0.1, -0.2}}), 1.0},
      {XLaw::atomic({{-1.0, 0.3}, {0.0, 0.3}, {0.75, 0.4}}), GFunc::exp(), 1.0},
  };
  double worst = 0;
  int pairs = 0;
  for (auto const& spec : models)
    for (int n = 1; n <= 12; ++n) {
      int const kmax = 12 / n;
      CumulantSeq const single = moments_to_cumulants(gsq_moments(spec, n, kmax));
      CumulantSeq const series = yn_cumulants(spec, n, kmax);
      for (int k = 1; k <= kmax; ++k) {
        double const a = series(k), b = product_cumulant(k, single, n);
        double const scale = std::max({std::abs(a), std::abs(b), 1e-300});
        worst = std::max(worst, std::abs(a - b) / scale);
        ++pairs;
      }
    }
  return {worst <= 1e-9, std::to_string(models.size()) + " models, " + std::to_string(pairs) +
                             " (k,n) pairs, max rel. deviation " + num(worst)};
}

// 4. Exact moment convergence.
Outcome criterion4() {
  ModelSpec const spec{XLaw::rademacher(1.0), GFunc::polynomial_real({1.0, 1.0, 0.5}), 1.0};
  CumulantSeq const limit = limit_cumulants(LimitParams::from_model(spec), 3);
  std::vector<int> ns;
  for (int e = 4; e <= 12; ++e) ns.push_back(1 << e);
  std::vector<std::vector<double>> resid(3);
  for (int n : ns) {
    CumulantSeq const y = yn_cumulants(spec, n, 3);
    for (int k = 1; k <= 3; ++k) resid[static_cast<std::size_t>(k - 1)].push_back(std::abs(y(k) - limit(k)));
  }
  bool ok = true;
  std::string detail = "fitted exponents";
  for (int k = 1; k <= 3; ++k) {
    auto const& r = resid[static_cast<std::size_t>(k - 1)];
    bool dec = true;
    for (std::size_t i = 1; i < r.size(); ++i) dec = dec && r[i] < r[i - 1];
    double const e = fitted_decay_exponent(ns, r);
    ok = ok && dec && e >= 0.4;
    detail += " k=" + std::to_string(k) + ": " + num(e) + (dec ? "" : " (not decreasing)");
  }
  return {ok, detail};
}

// 5. Cumulant expansions.
Outcome criterion5() {
  std::vector<int> grid;
  for (int e = 4; e <= 10; ++e) grid.push_back(1 << e);
  B2Report const quad =
      lemma_b2_expansion_check({XLaw::rademacher(1.0), GFunc::polynomial_real({1.0, 1.0, 0.5}), 1.0}, grid);
  B2Report const lin = lemma_b2_expansion_check({XLaw::rademacher(1.0), GFunc::polynomial_real({1.0, 1.0}), 1.0}, grid);
  double lin_max = 0;
  for (auto const& r : lin.rows) lin_max = std::max({lin_max, r.resid1, r.resid2});
  bool const ok = quad.exponent2 >= 1.4 && quad.passed() && lin.k1_exact_zero && lin.k2_exact_zero && lin_max == 0.0;
  return {ok, "kappa_2 residual exponent " + num(quad.exponent2) + " (kappa_1 " + num(quad.exponent1) +
                  "), g=1+x max residual " + num(lin_max)};
}

CMatrix ginibre(int N, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix a(N, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) a(i, j) = {nd(rng), nd(rng)};
  return a / std::sqrt(N / 2.0);
}

// 6. Operator identities.
Outcome criterion6() {
  double herm = 0;
  for (int s = 0; s < 100; ++s) {
    int const N = 2 << (s % 4);
    Rng rng = stream_rng(60, static_cast<std::uint64_t>(s));
    CMatrix const X = ginibre(N, rng);
    double const u = std::uniform_real_distribution<double>(-4, 4)(rng);
    herm = std::max(herm, hermitization_check(X, u) / N);
  }
  double amp = 0;
  {
    Rng rng = stream_rng(61, 0);
    std::uniform_int_distribution<int> len(1, 5), size(1, 6), bit(0, 1);
    for (int t = 0; t < 50; ++t) {
      int const m = len(rng), N = size(rng);
      std::vector<CMatrix> xs;
      std::vector<int> eps;
      for (int i = 0; i < m; ++i) {
        xs.push_back(ginibre(N, rng));
        eps.push_back(bit(rng));
      }
      amp = std::max(amp, ampliation_check(xs, eps));
    }
  }
  double duh = 0;
  {
    Rng rng = stream_rng(62, 0);
    for (int m = 1; m <= 3; ++m)
      for (int N = 1; N <= 4; ++N)
        for (int t = 0; t < 2; ++t) {
          CMatrix const a = ginibre(N, rng), b = ginibre(N, rng);
          CMatrix const X = (a + a.adjoint()) / 2.0, Y = (b + b.adjoint()) / 4.0;
          duh = std::max(duh, duhamel_check(X, Y, m).scaled());
        }
  }
  return {herm <= 1e-10 && amp <= 1e-12 && duh <= 1e-8, "hermitization/N " + num(herm) + ", ampliation " + num(amp) +
                                                              ", Duhamel scaled " + num(duh)};
}

double cdf_area(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> pts(a);
  pts.insert(pts.end(), b.begin(), b.end());
  std::sort(pts.begin(), pts.end());
  auto F = [](std::vector<double> const& s, double t) {
    return static_cast<double>(std::upper_bound(s.begin(), s.end(), t) - s.begin()) / static_cast<double>(s.size());
  };
  double area = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) area += std::abs(F(a, pts[i]) - F(b, pts[i])) * (pts[i + 1] - pts[i]);
  return area;
}

DensityTable semicircle_table(double variance) {
  double const R = 2 * std::sqrt(variance);
  std::vector<double> x, p;
  for (int i = 0; i <= 4000; ++i) {
    double const t = -R + 2 * R * i / 4000.0;
    x.push_back(t);
    p.push_back(2 / (M_PI * R * R) * std::sqrt(std::max(0.0, R * R - t * t)));
  }
  return {x, p};
}

// 7. Distances and rate table.
Outcome criterion7() {
  std::mt19937_64 rng(70);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> corpus;
  for (int size : {1, 2, 5, 17, 64, 200}) {
    std::vector<double> v(static_cast<std::size_t>(size));
    for (auto& x : v) x = std::round(8 * nd(rng)) / 8;
    corpus.push_back(v);
  }
  bool metric = true;
  for (auto const& a : corpus)
    for (auto const& b : corpus) {
      SpectralSample const sa(a), sb(b);
      for (double r : {1.0, 2.0}) {
        double const w = wasserstein_r(sa, sb, r);
        metric = metric && w >= 0 && w == wasserstein_r(sb, sa, r) && wasserstein_r(sa, sa, r) == 0.0;
        for (double c : {0.5, 3.0, -2.0})
          metric = metric && std::abs(wasserstein_r(sa.scaled(c), sb.scaled(c), r) - std::abs(c) * w) <= 1e-12 * (1 + w);
        for (auto const& c : corpus)
          metric = metric && w <= wasserstein_r(sa, SpectralSample(c), r) + wasserstein_r(SpectralSample(c), sb, r) + 1e-12;
      }
      double const k = kolmogorov(sa, sb);
      metric = metric && k >= 0 && k <= 1 && k == kolmogorov(sb, sa) && kolmogorov(sa, sa) == 0.0;
      metric = metric && kolmogorov(sa.scaled(2.5), sb.scaled(2.5)) == k;
      for (auto const& c : corpus)
        metric = metric && k <= kolmogorov(sa, SpectralSample(c)) + kolmogorov(SpectralSample(c), sb) + 1e-12;
      // Duality: W1 is the area between the cdfs.
      metric = metric && std::abs(wasserstein_r(sa, sb, 1.0) - cdf_area(a, b)) <= 1e-12 * (1 + cdf_area(a, b));
    }

  bool kw = true;
  int pairs = 0;
  double worst_ratio = 0;
  auto kw_pair = [&](SpectralSample const& s, DensityTable const& ref) {
    KwResult const r = kw_bound_check(s, ref);
    kw = kw && r.holds;
    worst_ratio = std::max(worst_ratio, r.K / r.bound);
    ++pairs;
  };
  for (double sigma : {0.25, 0.5}) {
    DensityTable const ref = psc_singular_table(LimitParams::exp_normalized(sigma));
    MatrixEnsembleSpec spec;
    spec.N = 96;
    spec.xlaw = XLaw::semicircle(sigma * sigma);
    spec.seed = 71;
    for (int n : {1, 4, 16}) kw_pair(product_singular_values(spec, GFunc::exp(), n), ref);
    DensityTable const loglaw = log_law_density(sigma);
    std::vector<double> probs;
    for (int i = 0; i < 300; ++i) probs.push_back((i + 0.5) / 300);
    std::vector<double> q;
    for (double u : probs) q.push_back(loglaw.quantile(u));
    kw_pair(SpectralSample(q), loglaw);
  }
  {
    DensityTable const sc = semicircle_table(0.5);
    Rng r = stream_rng(72, 0);
    for (int size : {10, 100, 1000}) kw_pair(SpectralSample(sample_law(XLaw::semicircle(0.5), size, r)), sc);
  }

  // Table cells, coded independently of the library.
  struct Cell {
    double r;
    std::function<double(double)> crit, m1, p1;
    double m2, p2;
  };
  std::vector<Cell> cells{
      {1, [](double) { return 0.8; }, [](double g) { return g / 8; }, [](double) { return 0.1; }, 0, 0},
      {1.5, [](double r) { return (r * r + r + 2) / (r * r + r + 4); }, [](double g) { return g / (2 * 2.25 + 3 + 4); },
       [](double) { return 1 / (2 * 2.25 + 3 + 8); }, 0, 0},
      {2, [](double) { return 2.0 / 3; }, [](double g) { return g / 8; }, [](double) { return 1.0 / 12; }, 0.5, 0},
      {3, [](double) { return 15.0 / 16; }, [](double g) { return g / 30; }, [](double) { return 1.0 / 32; }, 0, 0},
      {4, [](double) { return 1.0; }, [](double g) { return g / 48; }, [](double) { return 1.0 / 48; }, 0, 0.25},
      {5, [](double) { return 1.0; }, [](double g) { return g / 60; }, [](double) { return 1.0 / 60; }, 0, 0},
  };
  bool table = true;
  int asserted = 0;
  for (auto const& c : cells)
    for (double g : {0.2, 0.5, 0.9, 1.0}) {
      auto const minus = rate_cell(c.r, g, RateBranch::minus), plus = rate_cell(c.r, g, RateBranch::plus);
      double const crit = c.crit(c.r);
      table = table && std::abs(minus.gamma_crit - crit) <= 1e-15;
      table = table && std::abs(minus.beta1 - c.m1(g)) <= 1e-15 && minus.beta2 == c.m2;
      table = table && std::abs(plus.beta1 - c.p1(g)) <= 1e-15 && plus.beta2 == c.p2;
      auto const pick = rate_lookup(c.r, g);
      table = table && pick.branch == (g > crit ? RateBranch::plus : RateBranch::minus);
      asserted += 2;
    }
  // r = 3 cross-check: rate_- = gamma / 30.
  auto const r3 = rate_lookup(3, 0.6);
  bool const cross = r3.branch == RateBranch::minus && std::abs(r3.beta1 - 0.6 / 30) <= 1e-15;
  return {metric && kw && table && cross,
          std::string("metric/scaling/duality ") + (metric ? "ok" : "FAILED") + ", KW bound on " +
              std::to_string(pairs) + " pairs (max K/bound " + num(worst_ratio) + "), 12 table cells x 4 gammas " +
              (table ? "ok" : "FAILED") + ", r=3 rate gamma/30 " + (cross ? "ok" : "FAILED")};
}

// 8. Matrix simulation.
Outcome criterion8() {
  auto const dir = scratch("c8");
  auto cfg = config("xlaw = semicircle\nsigma = 0.5\ng = exp\nroute = matrix\nN = 512\ntrials = 8\n"
                    "n_grid = 8, 32, 128\nr = 1\nseed = 1\n");
  cfg.out_dir = dir.string();
  cfg.workers = default_workers();
  std::ostringstream log;
  int const rc = run_command("convergence", cfg, log);
  if (rc != kExitPass) return {false, "convergence run failed: " + log.str()};
  std::vector<std::vector<double>> K(8, std::vector<double>(3, 0.0));
  for (auto const& row : csv_rows(dir / "convergence_matrix.csv")) {
    int const t = std::stoi(row[0]), n = std::stoi(row[2]);
    K[static_cast<std::size_t>(t)][n == 8 ? 0 : n == 32 ? 1 : 2] = std::stod(row[4]);
  }
  int decreasing = 0, small = 0;
  double worst128 = 0;
  std::string trace;
  for (auto const& k : K) {
    decreasing += k[1] < k[0] && k[2] < k[1];
    small += k[2] <= 0.15;
    worst128 = std::max(worst128, k[2]);
    trace += " (" + num(k[0]) + "," + num(k[1]) + "," + num(k[2]) + ")";
  }
  return {small == 8 && decreasing >= 7, "max K at n=128 " + num(worst128) + ", decreasing in " +
                                             std::to_string(decreasing) + "/8 trials; K(8,32,128):" + trace};
}

// 9. Regularisation.
Outcome criterion9() {
  std::vector<double> const eps{0.2, 0.1, 0.05, 0.025}, zeta{0.8, 0.4, 0.2, 0.1};
  IkReport const l1 = ik_scaling_report(TestFunction::monomial(0), {1, 2, 3, 4}, eps, zeta);
  IkReport const l2 = ik_scaling_report(TestFunction::random(1, 1.0, 3, 1.5, 2), {0, 1, 2, 3, 4}, eps, zeta);
  bool ik = true;
  std::string fits = "eps-exponents L1:";
  for (auto const& row : l1.rows) {
    ik = ik && row.eps_ok;
    fits += " " + num(row.fitted_eps) + "/" + num(row.predicted.eps_exp);
  }
  fits += " L2:";
  for (auto const& row : l2.rows) {
    ik = ik && row.eps_ok;
    fits += " " + num(row.fitted_eps) + (row.predicted.log_case ? "/log" : "/" + num(row.predicted.eps_exp));
  }

  std::vector<double> grid;
  for (int i = 0; i <= 480; ++i) grid.push_back(-12.0 + 0.05 * i);
  double scans = 0;
  std::vector<TestFunction> lips{TestFunction::monomial(0), TestFunction::kinks(0, 1.0, {0.0}, {1.0}),
                                 TestFunction::random(0, 1.0, 3, 4.0, 3)};
  for (auto const& f : lips)
    for (double z : {0.1, 0.5}) {
      scans = std::max(scans, truncation_error_scan(f, z, grid));
      scans = std::max(scans, smoothing_error_scan(f, z, SmoothingKernel(0.1, 0), grid));
    }
  std::vector<double> g6;
  for (int i = 0; i < 300; ++i) g6.push_back(-6.0 + 12.0 * i / 299.0);
  bool scaling = true;
  double worst_fit = 0;
  for (std::uint64_t s : {5, 7}) {
    SmoothingScaling const sc = smoothing_scaling(TestFunction::random(1, 1.0, 4, 3.0, s), 0.2, 0.1, g6);
    scaling = scaling && sc.within(0.25);
    worst_fit = std::max(worst_fit, std::abs(sc.fitted - sc.predicted));
  }
  return {ik && scans <= 1 + 1e-6 && scaling, fits + "; L1 scan max ratio " + num(scans) +
                                                   ", L2 smoothing exponent deviation " + num(worst_fit)};
}

// 10. Determinism.
Outcome criterion10() {
  auto const a = scratch("c10a"), b = scratch("c10b"), c = scratch("c10c");
  auto cfg = config("xlaw = rademacher\nsigma = 0.5\ng = exp\nN = 96\ntrials = 4\nn_grid = 4, 8, 16, 32\nseed = 17\n");
  std::ostringstream log;
  bool ok = true;
  for (auto const& [dir, workers] : {std::pair{a, 1}, std::pair{b, 1}, std::pair{c, 4}}) {
    cfg.out_dir = dir.string();
    cfg.workers = workers;
    ok = ok && run_command("convergence", cfg, log) == kExitPass;
  }
  int files = 0;
  for (char const* f : {"convergence_exact.csv", "convergence_matrix.csv", "convergence_summary.csv"}) {
    std::string const x = slurp(a / f);
    ok = ok && !x.empty() && x == slurp(b / f) && x == slurp(c / f);
    ++files;
  }
  return {ok, std::to_string(files) + " CSV files compared across two runs and worker counts 1 and 4"};
}

} // namespace

int main() {
  struct Criterion {
    int id;
    char const* name;
    Outcome (*run)();
    double budget; // seconds
  };
  Criterion const list[] = {
      {1, "combinatorial exactness", criterion1, 60},
      {2, "limit cumulants", criterion2, 0},
      {3, "route agreement", criterion3, 300},
      {4, "moment CLT convergence", criterion4, 0},
      {5, "cumulant expansions", criterion5, 0},
      {6, "identity suite", criterion6, 120},
      {7, "distance layer", criterion7, 0},
      {8, "matrix simulation", criterion8, 900},
      {9, "regularization scaling", criterion9, 180},
      {10, "determinism", criterion10, 0},
  };
  int failed = 0;
  for (auto const& c : list) {
    auto const t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (std::exception const& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool const in_time = c.budget == 0 || secs <= c.budget;
    bool const pass = out.pass && in_time;
    failed += !pass;
    std::printf("[%s] criterion %d %s: %s (%.1f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
