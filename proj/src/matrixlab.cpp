#include "freemult/matrixlab.hpp"

#include "freemult/errors.hpp"
#include "freemult/parallel.hpp"
#include "freemult/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace freemult {

namespace {

constexpr int kChunk = 8;
constexpr int kDuhamelOrder = 25;
constexpr int kMaxRetries = 10;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hermitian exponential e^{c H} through a fixed eigendecomposition.
struct HermExp {
  explicit HermExp(CMatrix const& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) throw SolverError("Hermitian eigendecomposition failed");
    V = es.eigenvectors();
    lambda = es.eigenvalues();
  }
  CMatrix operator()(double c) const {
    Eigen::VectorXcd d(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) d(i) = std::exp(c * lambda(i));
    return V * d.asDiagonal() * V.adjoint();
  }
  CMatrix V;
  Eigen::VectorXd lambda;
};

void require_hermitian(CMatrix const& a, char const* what) {
  if (a.rows() != a.cols()) throw DimensionError(std::string(what) + " must be square");
  double const tol = 1e-12 * std::max(1.0, a.norm());
  if ((a - a.adjoint()).norm() > tol) throw InvalidArgument(std::string(what) + " must be Hermitian");
}

double op_norm(CMatrix const& a) {
  if (a.size() == 0) return 0;
  return Eigen::JacobiSVD<CMatrix>(a).singularValues()(0);
}

} // namespace

void MatrixEnsembleSpec::validate() const {
  if (N < 2) throw InvalidArgument("matrix size N must be at least 2");
  if (mode == EnsembleMode::gue && xlaw.kind() != XLaw::Kind::semicircle)
    throw InvalidArgument("gue mode requires a semicircle law");
}

Rng stream_rng(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t const a = splitmix(seed ^ splitmix(index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

std::complex<double> normalized_trace(CMatrix const& a) {
  if (a.rows() == 0) throw DimensionError("trace of an empty matrix");
  return a.trace() / static_cast<double>(a.rows());
}

CMatrix sample_gue(int N, double variance, Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CMatrix g(N, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) g(i, j) = {nd(rng), nd(rng)};
  return (g + g.adjoint()) * (std::sqrt(variance / (2.0 * N)));
}

CMatrix sample_haar_unitary(int N, Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CMatrix g(N, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) g(i, j) = {nd(rng), nd(rng)};
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(N, N);
  CMatrix const& r = qr.matrixQR();
  for (int j = 0; j < N; ++j) {
    std::complex<double> const d = r(j, j);
    double const a = std::abs(d);
    q.col(j) *= a > 0 ? d / a : std::complex<double>(1.0);
  }
  return q;
}

std::vector<double> sample_law(XLaw const& law, int N, Rng& rng) {
  std::vector<double> out(static_cast<std::size_t>(N));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  switch (law.kind()) {
  case XLaw::Kind::semicircle: {
    std::gamma_distribution<double> ga(1.5, 1.0);
    double const radius = 2 * law.sigma();
    for (auto& x : out) {
      double const a = ga(rng), b = ga(rng);
      x = radius * (2 * a / (a + b) - 1);
    }
    break;
  }
  case XLaw::Kind::uniform: {
    double const c = std::sqrt(3 * law.variance());
    std::uniform_real_distribution<double> ud(-c, c);
    for (auto& x : out) x = ud(rng);
    break;
  }
  default: {
    auto const& atoms = law.atoms();
    for (auto& x : out) {
      double v = u01(rng);
      x = atoms.back().first;
      for (auto const& [a, w] : atoms) {
        if (v < w) {
          x = a;
          break;
        }
        v -= w;
      }
    }
  }
  }
  return out;
}

CMatrix Factor::matrix() const { return U * lambda.cast<std::complex<double>>().asDiagonal() * U.adjoint(); }

Factor sample_factor_decomposed(MatrixEnsembleSpec const& spec, Rng& rng) {
  spec.validate();
  Factor f;
  if (spec.mode == EnsembleMode::gue) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sample_gue(spec.N, spec.xlaw.variance(), rng));
    if (es.info() != Eigen::Success) throw SolverError("GUE eigendecomposition failed");
    f.U = es.eigenvectors();
    f.lambda = es.eigenvalues();
  } else {
    f.U = sample_haar_unitary(spec.N, rng);
    auto const d = sample_law(spec.xlaw, spec.N, rng);
    f.lambda = Eigen::Map<Eigen::VectorXd const>(d.data(), spec.N);
  }
  return f;
}

CMatrix sample_factor(MatrixEnsembleSpec const& spec, Rng& rng) { return sample_factor_decomposed(spec, rng).matrix(); }

CMatrix apply_g(Factor const& x, GFunc const& g, double scale) {
  if (g.is_constant_one()) return CMatrix::Identity(x.U.rows(), x.U.cols());
  Eigen::VectorXcd d(x.lambda.size());
  for (Eigen::Index i = 0; i < x.lambda.size(); ++i) d(i) = g(std::complex<double>(scale * x.lambda(i)));
  return x.U * d.asDiagonal() * x.U.adjoint();
}

SpectralSample product_singular_values(MatrixEnsembleSpec const& spec, GFunc const& g, int n, int workers) {
  spec.validate();
  if (n < 1) throw InvalidArgument("product length n must be positive");
  double const scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::size_t const chunks = static_cast<std::size_t>((n + kChunk - 1) / kChunk);
  std::vector<CMatrix> partial(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    CMatrix acc;
    int const lo = static_cast<int>(c) * kChunk, hi = std::min(n, lo + kChunk);
    for (int i = lo; i < hi; ++i) {
      Rng rng = stream_rng(spec.seed, static_cast<std::uint64_t>(i));
      CMatrix const gi = apply_g(sample_factor_decomposed(spec, rng), g, scale);
      acc = i == lo ? gi : CMatrix(acc * gi);
    }
    partial[c] = std::move(acc);
  });
  CMatrix prod = std::move(partial[0]);
  for (std::size_t c = 1; c < chunks; ++c) prod = prod * partial[c];
  Eigen::BDCSVD<CMatrix> svd(prod);
  if (svd.info() != Eigen::Success) throw SolverError("SVD of the product failed (N = " + std::to_string(spec.N) + ")");
  Eigen::VectorXd const s = svd.singularValues();
  return SpectralSample(std::vector<double>(s.data(), s.data() + s.size()), n, spec.N);
}

double hermitization_check(CMatrix const& X, double u) {
  if (X.rows() != X.cols() || X.rows() == 0) throw DimensionError("hermitization_check: X must be square");
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      if (!std::isfinite(X(i, j).real()) || !std::isfinite(X(i, j).imag()))
        throw InvalidArgument("hermitization_check: non-finite entry");
  Eigen::Index const N = X.rows();
  CMatrix H = CMatrix::Zero(2 * N, 2 * N);
  H.topRightCorner(N, N) = X;
  H.bottomLeftCorner(N, N) = X.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  if (es.info() != Eigen::Success) throw SolverError("hermitization_check: eigendecomposition failed");
  Eigen::VectorXcd d(2 * N);
  for (Eigen::Index i = 0; i < 2 * N; ++i) d(i) = std::exp(std::complex<double>(0, u * es.eigenvalues()(i)));
  CMatrix const E = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
  std::complex<double> const lhs =
      0.5 * (normalized_trace(E.topLeftCorner(N, N)) + normalized_trace(E.bottomRightCorner(N, N)));
  Eigen::VectorXd const s = Eigen::JacobiSVD<CMatrix>(X).singularValues();
  double rhs = 0;
  for (Eigen::Index i = 0; i < N; ++i) rhs += std::cos(u * s(i));
  rhs /= static_cast<double>(N);
  return std::abs(lhs - rhs);
}

CMatrix simplex_term(CMatrix const& X, CMatrix const& Y, int k, bool tail_sum) {
  if (k < 1 || k > 4) throw InvalidArgument("simplex_term: dimension outside [1, 4]");
  HermExp const ex(X), ez(tail_sum ? CMatrix(X + Y) : X);
  auto const& g = gauss_legendre(kDuhamelOrder);
  std::size_t const q = g.nodes.size();
  std::vector<double> t(q), w(q);
  for (std::size_t i = 0; i < q; ++i) {
    t[i] = 0.5 * (g.nodes[i] + 1);
    w[i] = 0.5 * g.weights[i];
  }
  CMatrix total = CMatrix::Zero(X.rows(), X.cols());
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  std::vector<double> alpha(static_cast<std::size_t>(k) + 1);
  for (;;) {
    // Collapsed coordinates a_j = t_j prod_{i<j} (1 - t_i), Jacobian prod_j prod_{i<j} (1 - t_i).
    double rest = 1, weight = 1;
    for (int j = 0; j < k; ++j) {
      double const tj = t[idx[j]];
      alpha[j] = rest * tj;
      weight *= w[idx[j]] * rest;
      rest *= 1 - tj;
    }
    alpha[k] = rest;
    CMatrix term = ex(alpha[0]);
    for (int j = 1; j <= k; ++j) term = CMatrix(term * Y) * (j == k ? ez(alpha[j]) : ex(alpha[j]));
    total += weight * term;
    int pos = k - 1;
    while (pos >= 0 && ++idx[pos] == q) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

DuhamelResult duhamel_check(CMatrix const& X, CMatrix const& Y, int m) {
  if (m < 1 || m > 3) throw InvalidArgument("duhamel_check: m must lie in [1, 3]");
  require_hermitian(X, "X");
  require_hermitian(Y, "Y");
  if (X.rows() != Y.rows()) throw DimensionError("duhamel_check: X and Y differ in size");
  if (X.rows() > 8) throw InvalidArgument("duhamel_check: N must be at most 8");
  HermExp const ex(X), es(X + Y);
  CMatrix defect = es(1.0) - ex(1.0);
  for (int k = 1; k <= m; ++k) defect -= simplex_term(X, Y, k, false);
  defect -= simplex_term(X, Y, m + 1, true);
  DuhamelResult r;
  r.residual = defect.norm();
  r.scale = std::pow(op_norm(X) + op_norm(Y), m + 2);
  return r;
}

double ampliation_check(std::vector<CMatrix> const& xs, std::vector<int> const& eps) {
  if (xs.empty() || xs.size() > 5) throw InvalidArgument("ampliation_check: need 1 to 5 elements");
  if (eps.size() != xs.size()) throw DimensionError("ampliation_check: one bit per element");
  Eigen::Index const N = xs[0].rows();
  for (auto const& x : xs)
    if (x.rows() != N || x.cols() != N) throw DimensionError("ampliation_check: elements differ in size");
  for (int e : eps)
    if (e != 0 && e != 1) throw InvalidArgument("ampliation_check: bits must be 0 or 1");
  CMatrix J = CMatrix::Zero(2 * N, 2 * N);
  J.topRightCorner(N, N).setIdentity();
  J.bottomLeftCorner(N, N).setIdentity();
  auto bold = [N](CMatrix const& x) {
    CMatrix b = CMatrix::Zero(2 * N, 2 * N);
    b.topLeftCorner(N, N) = x;
    b.bottomRightCorner(N, N) = x.adjoint();
    return b;
  };
  CMatrix lhs = CMatrix::Identity(2 * N, 2 * N);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lhs = lhs * bold(xs[i]);
    if (eps[i]) lhs = lhs * J;
  }
  // x^{(2l)} = x, x^{(2l+1)} = x*.
  auto power = [](CMatrix const& x, int iota) { return iota % 2 == 0 ? x : CMatrix(x.adjoint()); };
  CMatrix top = CMatrix::Identity(N, N), bottom = CMatrix::Identity(N, N);
  int iota = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    top = top * power(xs[i], iota);
    bottom = bottom * power(xs[i], iota + 1);
    iota += eps[i];
  }
  CMatrix rhs = CMatrix::Zero(2 * N, 2 * N);
  rhs.topLeftCorner(N, N) = top;
  rhs.bottomRightCorner(N, N) = bottom;
  if (iota % 2 == 1) rhs = rhs * J;
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

double lp_norm(CMatrix const& a, int p) {
  if (p < 2 || p % 2 != 0) throw InvalidArgument("lp_norm: p must be an even integer");
  CMatrix const b = a.adjoint() * a;
  CMatrix acc = b;
  for (int j = 1; j < p / 2; ++j) acc = acc * b;
  return std::pow(std::max(0.0, normalized_trace(acc).real()), 1.0 / p);
}

PartialProductReport partial_product_check(MatrixEnsembleSpec const& spec, GFunc const& g, int n, int p, int trials,
                                           double slack) {
  spec.validate();
  if (n < 1) throw InvalidArgument("partial_product_check: n must be positive");
  if (p < 2 || p % 2 != 0) throw InvalidArgument("partial_product_check: p must be an even integer");
  if (trials < 0) throw InvalidArgument("partial_product_check: trials must be non-negative");
  PartialProductReport rep;
  rep.n = n;
  rep.p = p;
  rep.trials = trials;
  double const scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::uint64_t stream = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<CMatrix> xs;
    std::vector<std::complex<double>> traces;
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxRetries)
        throw DegenerateModelError("partial_product_check: factor traces vanish in " + std::to_string(kMaxRetries) +
                                   " consecutive draws");
      xs.clear();
      traces.clear();
      bool degenerate = false;
      for (int j = 0; j < n; ++j) {
        Rng rng = stream_rng(spec.seed, stream++);
        xs.push_back(apply_g(sample_factor_decomposed(spec, rng), g, scale));
        traces.push_back(normalized_trace(xs.back()));
        if (std::abs(traces.back()) < 1e-14) degenerate = true;
      }
      if (!degenerate) break;
    }
    std::vector<double> norms;
    CMatrix pi = xs[0];
    norms.push_back(lp_norm(pi, p));
    for (int j = 1; j < n; ++j) {
      pi = pi * xs[j];
      norms.push_back(lp_norm(pi, p));
    }
    double tail = 1; // |tr X_{i+1} ... tr X_n|
    for (int i = n; i >= 1; --i) {
      double const rhs = norms[n - 1] / tail;
      double const ratio = norms[i - 1] / rhs;
      rep.worst_ratio = std::max(rep.worst_ratio, ratio);
      ++rep.checks;
      if (ratio > slack) ++rep.violations;
      tail *= std::abs(traces[i - 1]);
    }
  }
  try {
    ModelSpec const model{spec.xlaw, g, 1.0};
    int const K = p / 2;
    MomentSeq const single = gsq_moments(model, n, K);
    double const mean = std::abs(g_mean(model, n));
    double const full = free_mult_power(single, static_cast<unsigned long long>(n))(K);
    rep.surrogate_available = true;
    rep.surrogate_holds = true;
    for (int i = 1; i <= n; ++i) {
      double const part = free_mult_power(single, static_cast<unsigned long long>(i))(K);
      double const ratio = std::pow(part / full, 1.0 / p) * std::pow(mean, n - i);
      rep.surrogate_worst_ratio = std::max(rep.surrogate_worst_ratio, ratio);
      if (ratio > 1 + 1e-9) rep.surrogate_holds = false;
    }
  } catch (UnsupportedModelError const&) {
    rep.surrogate_available = false;
  }
  return rep;
}

} // namespace freemult
