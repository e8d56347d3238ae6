#pragma once

// Non-crossing partitions of [m] = {1..m}: enumeration, Kreweras complement,
// Moebius function of the NC lattice and the partitions indexing products of
// free variables.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace freemult {

using BigInt = boost::multiprecision::cpp_int;

/// Largest ground set accepted by the enumerators (Catalan(14) ~ 2.7e6).
inline constexpr int kMaxEnumeration = 14;

/// Non-crossing set partition of {1..m} in canonical form.
///
/// Stored as a label per element; labels are assigned in order of block
/// minima, so two partitions are equal iff their label vectors are equal.
class NCPartition {
public:
  using Block = std::vector<int>;

  NCPartition() = default;

  /// Validates that `blocks` is a non-crossing partition of {1..m} and
  /// canonicalises it. Throws InvalidArgument otherwise.
  NCPartition(int m, std::vector<Block> blocks);

  static NCPartition zero(int m); ///< 0_m, all singletons
  static NCPartition one(int m);  ///< 1_m, a single block
  /// Builds from a label vector (label[i] = block id of element i+1).
  /// Labels need not be canonical; throws when the result crosses.
  static NCPartition from_labels(std::vector<int> const& labels);
  /// As from_labels but skips the crossing test; caller guarantees it.
  static NCPartition from_labels_unchecked(std::vector<int> const& labels);

  int size() const { return static_cast<int>(label_.size()); }
  int block_count() const { return blocks_; }
  /// Block id (0-based, ordered by minimum) of element `i` in 1..m.
  int block_of(int i) const { return label_[static_cast<std::size_t>(i - 1)]; }
  std::vector<Block> blocks() const;
  std::vector<int> block_sizes() const; ///< in canonical block order

  /// True if every block of *this is contained in a block of `other`.
  bool refines(NCPartition const& other) const;

  friend bool operator==(NCPartition const&, NCPartition const&) = default;
  friend auto operator<=>(NCPartition const& a, NCPartition const& b) {
    return a.label_ <=> b.label_;
  }

private:
  std::vector<std::uint8_t> label_;
  int blocks_ = 0;
};

/// Counts of non-singleton blocks by size, plus the singleton count.
struct BlockProfile {
  std::map<int, int> counts; ///< size (>= 2) -> number of blocks
  int singletons = 0;

  static BlockProfile of(NCPartition const& p);
  int ground_size() const;
  /// True when every block is a pair or a singleton.
  bool pairs_and_singletons() const;
};

/// True iff the label vector describes a non-crossing partition.
bool is_noncrossing(std::vector<int> const& labels);

BigInt catalan(int m);

/// Calls `visit` on every NC partition of [m] in lexicographic label order.
void for_each_nc(int m, std::function<void(NCPartition const&)> const& visit);

/// All NC(m); exactly Catalan(m) entries. Throws SizeLimitError unless
/// 1 <= m <= kMaxEnumeration.
std::vector<NCPartition> enumerate_nc(int m);

/// All NC(m) whose blocks all have size `block_size`.
std::vector<NCPartition> enumerate_equal_blocks(int m, int block_size);

/// Kreweras complement on the interleaved copy 1,1',...,m,m', relabelled to [m].
NCPartition kreweras(NCPartition const& p);

/// Moebius function of NC(m) on the interval [s, p]. Throws
/// OrderViolationError unless s refines p.
long long mobius_nc(NCPartition const& s, NCPartition const& p);

/// (-1)^(j-1) Catalan(j-1), the Moebius value mu(0_j, 1_j).
long long mobius_full(int j);

/// rho_n^k = {(1..n), (n+1..2n), ..., ((k-1)n+1..kn)}.
NCPartition interval_partition(int n, int k);

/// Join of p with rho_n^k in the full partition lattice (connected
/// components of the union of both block systems).
NCPartition join_with_rho(NCPartition const& p, int n, int k);

/// Partitions of [kn] indexing the k-th free cumulant of a product of n free
/// factors: every block has size n (k blocks), and each Kreweras block only
/// joins positions carrying the same factor, i.e. positions congruent mod n.
/// Requires k >= 2, n >= 1 and kn <= kMaxEnumeration.
std::vector<NCPartition> enumerate_k_equal(int n, int k);

/// True if every block of `sigma` (a partition of [kn]) joins positions with
/// the same residue mod `modulus` and sigma v rho_n^k = 1_{kn}.
bool is_k_completing(NCPartition const& sigma, int n, int k, int modulus);

/// |NC(n,k)_{2,1}| = n (kn-k)! / ((kn-2k+2)! (k-1)!), the number of product
/// partitions whose Kreweras complement has only pairs and singletons.
/// Requires k >= 2 and n >= 1; for n = 1 the count is [k == 2].
BigInt count_nc_nk21(int n, int k);

} // namespace freemult
