#include "freemult/freecalc.hpp"

#include "freemult/errors.hpp"
#include "freemult/freecalc_core.hpp"
#include "freemult/ncpart.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <string>

namespace freemult {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

std::vector<Wide> widen(std::vector<double> const& v) { return std::vector<Wide>(v.begin(), v.end()); }

std::vector<double> narrow(std::vector<Wide> const& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (auto const& x : v) out.push_back(static_cast<double>(x));
  return out;
}

BasicPowerSeries<Wide> widen(PowerSeries const& s) {
  BasicPowerSeries<Wide> w(s.order());
  for (int j = 0; j <= s.order(); ++j) w[j] = s[j];
  return w;
}

void check_order(int K, char const* what) {
  if (K > kMaxOrder)
    throw SizeLimitError(std::string(what) + ": order " + std::to_string(K) + " above cap " +
                         std::to_string(kMaxOrder));
}

void check_finite(std::vector<double> const& v, char const* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

} // namespace

MomentSeq::MomentSeq(std::vector<double> m) : m_(std::move(m)) {
  check_order(order(), "MomentSeq");
  check_finite(m_, "MomentSeq");
}

MomentSeq MomentSeq::of_law(std::vector<double> m) {
  MomentSeq s(std::move(m));
  if (s.order() >= 2 && s(2) < s(1) * s(1) - 1e-12 * std::max(1.0, s(2)))
    throw InvalidArgument("MomentSeq: m_2 < m_1^2 for a declared law");
  return s;
}

MomentSeq MomentSeq::point_mass(double c, int K) {
  std::vector<double> m(static_cast<std::size_t>(K));
  double p = 1.0;
  for (auto& x : m) x = (p *= c);
  return MomentSeq(std::move(m));
}

double MomentSeq::operator()(int k) const {
  if (k == 0) return 1.0;
  if (k < 0 || k > order()) throw DimensionError("MomentSeq: index out of range");
  return m_[static_cast<std::size_t>(k - 1)];
}

CumulantSeq::CumulantSeq(std::vector<double> kappa) : k_(std::move(kappa)) {
  check_order(order(), "CumulantSeq");
  check_finite(k_, "CumulantSeq");
}

double CumulantSeq::operator()(int k) const {
  if (k < 1 || k > order()) throw DimensionError("CumulantSeq: index out of range");
  return k_[static_cast<std::size_t>(k - 1)];
}

CumulantSeq moments_to_cumulants(MomentSeq const& m) {
  return CumulantSeq(narrow(core::moments_to_cumulants(widen(m.values()))));
}

MomentSeq cumulants_to_moments(CumulantSeq const& k) {
  return MomentSeq(narrow(core::cumulants_to_moments(widen(k.values()))));
}

MomentSeq free_add_convolve(MomentSeq const& a, MomentSeq const& b) {
  if (a.order() != b.order()) throw DimensionError("free_add_convolve: orders differ");
  auto ka = core::moments_to_cumulants(widen(a.values()));
  auto const kb = core::moments_to_cumulants(widen(b.values()));
  for (std::size_t i = 0; i < ka.size(); ++i) ka[i] += kb[i];
  return MomentSeq(narrow(core::cumulants_to_moments(ka)));
}

MomentSeq free_mult_convolve(MomentSeq const& a, MomentSeq const& b) {
  if (a.order() != b.order()) throw DimensionError("free_mult_convolve: orders differ");
  auto const sa = core::s_series(widen(a.values()));
  auto const sb = core::s_series(widen(b.values()));
  return MomentSeq(narrow(core::s_series_inverse(sa * sb, a.order())));
}

MomentSeq free_mult_power(MomentSeq const& a, unsigned long long n) {
  return MomentSeq(narrow(core::mult_power(widen(a.values()), n)));
}

PowerSeries s_series(MomentSeq const& m) { return core::s_series(m.values()); }

MomentSeq s_series_inverse(PowerSeries const& s, int K) {
  check_order(K, "s_series_inverse");
  return MomentSeq(narrow(core::s_series_inverse(widen(s), K)));
}

double product_cumulant(int k, CumulantSeq const& kappa_single, int n) {
  if (k < 1 || n < 1) throw InvalidArgument("product_cumulant: k and n must be positive");
  if (kappa_single.order() < k) throw DimensionError("product_cumulant: cumulant order below k");
  if (k == 1) return std::pow(kappa_single(1), n);
  Wide total = 0;
  for (auto const& pi : enumerate_k_equal(n, k)) {
    Wide term = 1;
    for (int size : kreweras(pi).block_sizes()) term *= kappa_single(size);
    total += term;
  }
  return static_cast<double>(total);
}

} // namespace freemult
