#pragma once

// Finite-N realisations of the free model and numerical checks of the
// operator identities used in the Lindeberg argument.

#include "freemult/metrics.hpp"
#include "freemult/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace freemult {

using CMatrix = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

enum class EnsembleMode { gue, haar_conjugated_diagonal };

struct MatrixEnsembleSpec {
  int N = 256;
  XLaw xlaw = XLaw::semicircle(0.25);
  EnsembleMode mode = EnsembleMode::gue;
  std::uint64_t seed = 1;

  /// N >= 2; gue requires a semicircle law.
  void validate() const;
};

/// Independent stream for task `index` of a run seeded with `seed`.
Rng stream_rng(std::uint64_t seed, std::uint64_t index);

/// Normalised trace tr(A) = Tr(A) / rows.
std::complex<double> normalized_trace(CMatrix const& a);

CMatrix sample_gue(int N, double variance, Rng& rng);
/// QR of a complex Ginibre matrix with the phases of diag(R) removed.
CMatrix sample_haar_unitary(int N, Rng& rng);
/// N i.i.d. draws from the law.
std::vector<double> sample_law(XLaw const& law, int N, Rng& rng);

/// Hermitian factor together with its eigendecomposition X = U diag(lambda) U*.
struct Factor {
  CMatrix U;
  Eigen::VectorXd lambda;
  CMatrix matrix() const;
};

Factor sample_factor_decomposed(MatrixEnsembleSpec const& spec, Rng& rng);
CMatrix sample_factor(MatrixEnsembleSpec const& spec, Rng& rng);

/// g(scale X) by spectral calculus.
CMatrix apply_g(Factor const& x, GFunc const& g, double scale);

/// Sorted singular values of g(x_1/sqrt n) ... g(x_n/sqrt n); factor i uses
/// stream_rng(spec.seed, i). Bit-identical for any worker count.
SpectralSample product_singular_values(MatrixEnsembleSpec const& spec, GFunc const& g, int n, int workers = 1);

/// |(tr_2 x tr)(exp(iuH(X))) - tr cos(u|X|)| with H(X) = [[0, X], [X*, 0]].
double hermitization_check(CMatrix const& X, double u);

struct DuhamelResult {
  double residual = 0; ///< Frobenius norm of the identity defect
  double scale = 0;    ///< (||X|| + ||Y||)^{m+2}, operator norms
  double scaled() const { return scale > 0 ? residual / scale : residual; }
};

/// e^{X+Y} - e^X against the m-term simplex expansion plus remainder,
/// X and Y Hermitian, m <= 3.
DuhamelResult duhamel_check(CMatrix const& X, CMatrix const& Y, int m);

/// int over T_k of e^{a_0 X} Y ... Y e^{a_k X} (tail_sum: last exponential of X + Y).
CMatrix simplex_term(CMatrix const& X, CMatrix const& Y, int k, bool tail_sum);

/// bold(x_1) J^{e_1} ... bold(x_m) J^{e_m} against its block-diagonal form;
/// max entry of the difference. m <= 5.
double ampliation_check(std::vector<CMatrix> const& xs, std::vector<int> const& eps);

struct PartialProductReport {
  int n = 0, p = 0, trials = 0;
  int checks = 0, violations = 0;
  double worst_ratio = 0; ///< max lhs / rhs over finite-N checks
  double violation_rate() const { return checks ? static_cast<double>(violations) / checks : 0.0; }
  bool surrogate_available = false; ///< |g|^2 moments computable for the law
  bool surrogate_holds = false;     ///< every i in the exactly free model
  double surrogate_worst_ratio = 0;
};

/// ||pi_i||_p <= ||pi_n||_p / |tr X_{i+1} ... tr X_n| on finite-N samples
/// (violations counted at `slack`) and in the free surrogate through moments.
PartialProductReport partial_product_check(MatrixEnsembleSpec const& spec, GFunc const& g, int n, int p, int trials,
                                           double slack = 1.01);

/// ||A||_p in L^p of the normalised trace, p even.
double lp_norm(CMatrix const& a, int p);

} // namespace freemult
