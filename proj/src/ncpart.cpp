#include "freemult/ncpart.hpp"

#include "freemult/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace freemult {

namespace {

std::vector<int> canonical_labels(std::vector<int> const& labels, int& blocks) {
  std::map<int, int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, fresh] = remap.try_emplace(labels[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  blocks = static_cast<int>(remap.size());
  return out;
}

void check_enumeration_size(int m, char const* what) {
  if (m < 1 || m > kMaxEnumeration) {
    throw SizeLimitError(std::string(what) + ": ground set size " + std::to_string(m) +
                         " outside [1, " + std::to_string(kMaxEnumeration) + "]");
  }
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int m) : parent(static_cast<std::size_t>(m)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Permutation sending each element to the next element of its block (cyclically), 0-based.
std::vector<int> block_cycle(NCPartition const& p) {
  std::vector<int> next(static_cast<std::size_t>(p.size()));
  for (auto const& b : p.blocks()) {
    for (std::size_t i = 0; i < b.size(); ++i) next[b[i] - 1] = b[(i + 1) % b.size()] - 1;
  }
  return next;
}

// Generic stack-based generator; `block_size` = 0 disables the equal-size filter.
void generate(int m, int block_size, std::function<void(NCPartition const&)> const& visit) {
  std::vector<int> labels(static_cast<std::size_t>(m));
  std::vector<int> stack;
  std::vector<int> sizes;

  std::function<void(int)> rec = [&](int i) {
    if (i == m) {
      if (block_size > 0) {
        for (int s : sizes)
          if (s != block_size) return;
      }
      visit(NCPartition::from_labels_unchecked(labels));
      return;
    }
    for (std::size_t depth = 0; depth < stack.size(); ++depth) {
      int const lab = stack[depth];
      if (block_size > 0) {
        if (sizes[lab] >= block_size) continue;
        bool closes_short = false;
        for (std::size_t above = depth + 1; above < stack.size(); ++above)
          if (sizes[stack[above]] != block_size) closes_short = true;
        if (closes_short) continue;
      }
      std::vector<int> saved(stack.begin() + static_cast<std::ptrdiff_t>(depth) + 1, stack.end());
      stack.resize(depth + 1);
      labels[i] = lab;
      ++sizes[lab];
      rec(i + 1);
      --sizes[lab];
      stack.insert(stack.end(), saved.begin(), saved.end());
    }
    int const lab = static_cast<int>(sizes.size());
    labels[i] = lab;
    sizes.push_back(1);
    stack.push_back(lab);
    rec(i + 1);
    stack.pop_back();
    sizes.pop_back();
  };
  rec(0);
}

} // namespace

NCPartition::NCPartition(int m, std::vector<Block> blocks) {
  if (m < 1) throw InvalidArgument("NCPartition: ground set size must be positive");
  std::vector<int> labels(static_cast<std::size_t>(m), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw InvalidArgument("NCPartition: empty block");
    for (int e : blocks[b]) {
      if (e < 1 || e > m) throw InvalidArgument("NCPartition: element out of range");
      if (labels[e - 1] >= 0) throw InvalidArgument("NCPartition: blocks overlap");
      labels[e - 1] = static_cast<int>(b);
    }
  }
  if (std::find(labels.begin(), labels.end(), -1) != labels.end())
    throw InvalidArgument("NCPartition: blocks do not cover the ground set");
  *this = from_labels(labels);
}

NCPartition NCPartition::zero(int m) {
  std::vector<int> labels(static_cast<std::size_t>(m));
  std::iota(labels.begin(), labels.end(), 0);
  return from_labels_unchecked(labels);
}

NCPartition NCPartition::one(int m) {
  return from_labels_unchecked(std::vector<int>(static_cast<std::size_t>(m), 0));
}

NCPartition NCPartition::from_labels(std::vector<int> const& labels) {
  if (labels.empty()) throw InvalidArgument("NCPartition: empty ground set");
  if (!is_noncrossing(labels)) throw InvalidArgument("NCPartition: partition is crossing");
  return from_labels_unchecked(labels);
}

NCPartition NCPartition::from_labels_unchecked(std::vector<int> const& labels) {
  if (labels.size() > 255) throw SizeLimitError("NCPartition: ground set above 255");
  int blocks = 0;
  auto canon = canonical_labels(labels, blocks);
  NCPartition p;
  p.label_.assign(canon.begin(), canon.end());
  p.blocks_ = blocks;
  return p;
}

std::vector<NCPartition::Block> NCPartition::blocks() const {
  std::vector<Block> out(static_cast<std::size_t>(blocks_));
  for (std::size_t i = 0; i < label_.size(); ++i) out[label_[i]].push_back(static_cast<int>(i) + 1);
  return out;
}

std::vector<int> NCPartition::block_sizes() const {
  std::vector<int> out(static_cast<std::size_t>(blocks_), 0);
  for (auto l : label_) ++out[l];
  return out;
}

bool NCPartition::refines(NCPartition const& other) const {
  if (other.size() != size()) throw DimensionError("refines: ground set sizes differ");
  std::vector<int> image(static_cast<std::size_t>(blocks_), -1);
  for (std::size_t i = 0; i < label_.size(); ++i) {
    int& img = image[label_[i]];
    if (img < 0) img = other.label_[i];
    else if (img != other.label_[i]) return false;
  }
  return true;
}

BlockProfile BlockProfile::of(NCPartition const& p) {
  BlockProfile prof;
  for (int s : p.block_sizes()) {
    if (s == 1) ++prof.singletons;
    else ++prof.counts[s];
  }
  return prof;
}

int BlockProfile::ground_size() const {
  int m = singletons;
  for (auto [size, count] : counts) m += size * count;
  return m;
}

bool BlockProfile::pairs_and_singletons() const {
  return std::all_of(counts.begin(), counts.end(), [](auto const& kv) { return kv.first <= 2; });
}

bool is_noncrossing(std::vector<int> const& labels) {
  std::map<int, std::size_t> last;
  for (std::size_t i = 0; i < labels.size(); ++i) last[labels[i]] = i;
  std::map<int, bool> seen;
  std::vector<int> open;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int const l = labels[i];
    if (seen[l]) {
      if (open.empty() || open.back() != l) return false;
      if (last[l] == i) open.pop_back();
    } else {
      seen[l] = true;
      if (last[l] != i) open.push_back(l);
    }
  }
  return true;
}

BigInt catalan(int m) {
  if (m < 0) throw InvalidArgument("catalan: negative index");
  BigInt c = 1;
  for (int i = 0; i < m; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

void for_each_nc(int m, std::function<void(NCPartition const&)> const& visit) {
  check_enumeration_size(m, "for_each_nc");
  generate(m, 0, visit);
}

std::vector<NCPartition> enumerate_nc(int m) {
  check_enumeration_size(m, "enumerate_nc");
  std::vector<NCPartition> out;
  out.reserve(static_cast<std::size_t>(catalan(m)));
  generate(m, 0, [&](NCPartition const& p) { out.push_back(p); });
  return out;
}

std::vector<NCPartition> enumerate_equal_blocks(int m, int block_size) {
  check_enumeration_size(m, "enumerate_equal_blocks");
  if (block_size < 1) throw InvalidArgument("enumerate_equal_blocks: block size must be positive");
  std::vector<NCPartition> out;
  if (m % block_size != 0) return out;
  generate(m, block_size, [&](NCPartition const& p) { out.push_back(p); });
  return out;
}

NCPartition kreweras(NCPartition const& p) {
  int const m = p.size();
  auto next = block_cycle(p);
  std::vector<int> prev(next.size());
  for (int i = 0; i < m; ++i) prev[next[i]] = i;
  std::vector<int> labels(static_cast<std::size_t>(m), -1);
  int cycle = 0;
  for (int i = 0; i < m; ++i) {
    if (labels[i] >= 0) continue;
    for (int j = i; labels[j] < 0; j = prev[(j + 1) % m]) labels[j] = cycle;
    ++cycle;
  }
  return NCPartition::from_labels_unchecked(labels);
}

long long mobius_full(int j) {
  if (j < 1) throw InvalidArgument("mobius_full: block size must be positive");
  auto c = static_cast<long long>(catalan(j - 1));
  return (j % 2 == 1) ? c : -c;
}

long long mobius_nc(NCPartition const& s, NCPartition const& p) {
  if (s.size() != p.size()) throw DimensionError("mobius_nc: ground set sizes differ");
  if (!s.refines(p)) throw OrderViolationError("mobius_nc: first argument does not refine the second");
  long long mu = 1;
  for (auto const& block : p.blocks()) {
    std::vector<int> restricted;
    restricted.reserve(block.size());
    for (int e : block) restricted.push_back(s.block_of(e));
    auto kr = kreweras(NCPartition::from_labels_unchecked(restricted));
    for (int w : kr.block_sizes()) mu *= mobius_full(w);
  }
  return mu;
}

NCPartition interval_partition(int n, int k) {
  if (n < 1 || k < 1) throw InvalidArgument("interval_partition: n and k must be positive");
  std::vector<int> labels(static_cast<std::size_t>(n * k));
  for (int i = 0; i < n * k; ++i) labels[i] = i / n;
  return NCPartition::from_labels_unchecked(labels);
}

NCPartition join_with_rho(NCPartition const& p, int n, int k) {
  if (n < 1 || k < 1) throw InvalidArgument("join_with_rho: n and k must be positive");
  if (p.size() != n * k) throw DimensionError("join_with_rho: partition is not on [kn]");
  int const m = p.size();
  UnionFind uf(m);
  std::vector<int> first(static_cast<std::size_t>(p.block_count()), -1);
  for (int i = 0; i < m; ++i) {
    int& f = first[p.block_of(i + 1)];
    if (f < 0) f = i;
    else uf.unite(f, i);
    if (i % n != 0) uf.unite(i - 1, i);
  }
  std::vector<int> labels(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) labels[i] = uf.find(i);
  return NCPartition::from_labels(labels);
}

bool is_k_completing(NCPartition const& sigma, int n, int k, int modulus) {
  if (modulus < 1) throw InvalidArgument("is_k_completing: modulus must be positive");
  if (sigma.size() != n * k) throw DimensionError("is_k_completing: partition is not on [kn]");
  for (auto const& b : sigma.blocks()) {
    for (int e : b)
      if ((e - b.front()) % modulus != 0) return false;
  }
  return join_with_rho(sigma, n, k) == NCPartition::one(n * k);
}

std::vector<NCPartition> enumerate_k_equal(int n, int k) {
  if (k < 2) throw InvalidArgument("enumerate_k_equal: k must be at least 2");
  if (n < 1) throw InvalidArgument("enumerate_k_equal: n must be positive");
  if (static_cast<long long>(n) * k > kMaxEnumeration)
    throw SizeLimitError("enumerate_k_equal: kn exceeds the enumeration cap");
  return enumerate_equal_blocks(n * k, n);
}

BigInt count_nc_nk21(int n, int k) {
  if (k < 2) throw InvalidArgument("count_nc_nk21: k must be at least 2");
  if (n < 1) throw InvalidArgument("count_nc_nk21: n must be positive");
  auto fact = [](int x) {
    BigInt f = 1;
    for (int i = 2; i <= x; ++i) f *= i;
    return f;
  };
  int const lower = k * n - 2 * k + 2;
  if (lower < 0) return 0;
  return BigInt(n) * fact(k * n - k) / (fact(lower) * fact(k - 1));
}

} // namespace freemult
