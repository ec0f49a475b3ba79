#pragma once

// Nearest-neighbour walks on Z^d, closed walks and compatible N-path families.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "anderson/errors.hpp"
#include "anderson/multi_index.hpp"

namespace anderson {

inline constexpr int kMaxDim = 4;

/// A point of Z^d; coordinates past d stay zero.
using Site = std::array<int, kMaxDim>;

inline Site operator+(Site a, const Site& b) {
  for (int k = 0; k < kMaxDim; ++k) a[k] += b[k];
  return a;
}

inline Site operator-(Site a, const Site& b) {
  for (int k = 0; k < kMaxDim; ++k) a[k] -= b[k];
  return a;
}

inline Site operator-(Site a) {
  for (int& c : a) c = -c;
  return a;
}

inline int l1(const Site& a) {
  int s = 0;
  for (int c : a) s += std::abs(c);
  return s;
}

/// Unit vector along axis nu, times sign.
inline Site unit(int nu, int sign = 1) {
  Site e{};
  e.at(nu) = sign;
  return e;
}

inline std::string site_str(const Site& s, int d) {
  std::string out = "(";
  for (int k = 0; k < d; ++k) out += (k ? "," : "") + std::to_string(s[k]);
  return out + ")";
}

inline void check_dim(int d) {
  if (d < 1 || d > kMaxDim)
    throw InvalidArgument("lattice dimension must be in [1, " + std::to_string(kMaxDim) + "]");
}

/// gamma = (x_0, ..., x_n) with unit steps.
struct LatticeWalk {
  std::vector<Site> sites;

  int length() const { return static_cast<int>(sites.size()) - 1; }
  const Site& start() const { return sites.front(); }
  const Site& end() const { return sites.back(); }

  /// n_gamma(u) for every visited u; sums to length() + 1.
  std::map<Site, int> visits() const {
    std::map<Site, int> out;
    for (const Site& s : sites) ++out[s];
    return out;
  }

  bool unit_steps() const {
    for (std::size_t k = 1; k < sites.size(); ++k)
      if (l1(sites[k] - sites[k - 1]) != 1) return false;
    return true;
  }
};

/// Gamma = (gamma_1, ..., gamma_N) with start(gamma_1) = 0,
/// start(gamma_{i+1}) = end(gamma_i) + u_i and end(gamma_N) + u_N = 0.
struct NPathFamily {
  std::vector<LatticeWalk> walks;
  std::vector<Site> offsets;

  std::size_t size() const { return walks.size(); }
  int length() const {
    int n = 0;
    for (const auto& w : walks) n += w.length();
    return n;
  }
  bool compatible() const {
    const std::size_t N = walks.size();
    if (N == 0 || offsets.size() != N || walks[0].start() != Site{}) return false;
    for (std::size_t i = 0; i < N; ++i) {
      if (!walks[i].unit_steps()) return false;
      const Site& next = i + 1 < N ? walks[i + 1].start() : walks[0].start();
      if (next - walks[i].end() != offsets[i]) return false;
    }
    return true;
  }
};

/// Site -> (n_{gamma_1}(u), ..., n_{gamma_N}(u)); the totals sum to |Gamma| + N.
inline std::map<Site, MultiIndex> visit_counts(const NPathFamily& family) {
  const std::size_t N = family.size();
  std::map<Site, std::vector<int>> raw;
  for (std::size_t i = 0; i < N; ++i)
    for (const Site& s : family.walks[i].sites) {
      auto& v = raw[s];
      if (v.empty()) v.assign(N, 0);
      ++v[i];
    }
  std::map<Site, MultiIndex> out;
  for (auto& [s, v] : raw) out.emplace(s, MultiIndex(std::move(v)));
  return out;
}

inline constexpr std::uint64_t kDefaultWalkBudget = 10'000'000;

namespace detail {

/// Depth-first enumeration of the N-path families for one composition of the
/// length. Every DFS node counts against the budget.
class FamilyEnumerator {
 public:
  FamilyEnumerator(int d, std::vector<Site> offsets, std::uint64_t budget)
      : d_(d), budget_(budget) {
    family_.offsets = std::move(offsets);
    const std::size_t N = family_.offsets.size();
    family_.walks.resize(N);
    // tail_[i] = u_i + ... + u_N: displacement still owed by the offsets.
    tail_.assign(N + 1, Site{});
    for (std::size_t i = N; i-- > 0;) tail_[i] = tail_[i + 1] + family_.offsets[i];
  }

  std::uint64_t nodes() const { return nodes_; }

  void run(const std::vector<int>& lengths, const std::function<void(const NPathFamily&)>& visit) {
    lengths_ = lengths;
    remaining_after_.assign(lengths.size() + 1, 0);
    for (std::size_t i = lengths.size(); i-- > 0;) remaining_after_[i] = remaining_after_[i + 1] + lengths[i];
    visit_ = &visit;
    family_.walks[0].sites.assign(1, Site{});
    walk(0, Site{});
  }

 private:
  bool reachable(std::size_t i, const Site& at, int steps_left) const {
    const int need = l1(at + tail_[i]);
    const int have = steps_left + remaining_after_[i + 1];
    return need <= have && (have - need) % 2 == 0;
  }

  void tick() {
    if (++nodes_ > budget_)
      throw ResourceLimit("walk enumeration exceeded the budget of " + std::to_string(budget_) +
                          " nodes");
  }

  void walk(std::size_t i, const Site& at) {
    tick();
    auto& sites = family_.walks[i].sites;
    const int left = lengths_[i] - (static_cast<int>(sites.size()) - 1);
    if (!reachable(i, at, left)) return;
    if (left == 0) {
      if (i + 1 == family_.walks.size()) {
        (*visit_)(family_);
        return;
      }
      const Site next = at + family_.offsets[i];
      family_.walks[i + 1].sites.assign(1, next);
      walk(i + 1, next);
      return;
    }
    for (int nu = 0; nu < d_; ++nu)
      for (int s : {1, -1}) {
        const Site to = at + unit(nu, s);
        sites.push_back(to);
        walk(i, to);
        sites.pop_back();
      }
  }

  int d_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  NPathFamily family_;
  std::vector<Site> tail_;
  std::vector<int> lengths_;
  std::vector<int> remaining_after_;
  const std::function<void(const NPathFamily&)>* visit_ = nullptr;
};

}  // namespace detail

/// Visits every compatible family with |Gamma| = n. Order: walk lengths in
/// lexicographic composition order, then depth first with steps tried as
/// +e_1, -e_1, +e_2, ... The family passed to visit is reused between calls.
inline void enumerate_npaths(int d, const std::vector<Site>& offsets, int n,
                             const std::function<void(const NPathFamily&)>& visit,
                             std::uint64_t budget = kDefaultWalkBudget) {
  check_dim(d);
  if (offsets.empty()) throw InvalidArgument("an N-path family needs N >= 1 offsets");
  if (n < 0) throw InvalidArgument("total length must be >= 0");
  for (const Site& u : offsets)
    for (int k = d; k < kMaxDim; ++k)
      if (u[k] != 0) throw InvalidArgument("offset has a coordinate beyond dimension d");
  detail::FamilyEnumerator en(d, offsets, budget);
  for_each_composition(n, offsets.size(), [&](const std::vector<int>& lengths) { en.run(lengths, visit); });
}

/// Closed walks 0 -> 0 of length n in depth-first order.
inline void enumerate_closed_walks(int d, int n, const std::function<void(const LatticeWalk&)>& visit,
                                   std::uint64_t budget = kDefaultWalkBudget) {
  enumerate_npaths(d, {Site{}}, n, [&](const NPathFamily& f) { visit(f.walks[0]); }, budget);
}

/// Number of compatible families with |Gamma| = n.
inline std::uint64_t count_npaths(int d, const std::vector<Site>& offsets, int n,
                                  std::uint64_t budget = kDefaultWalkBudget) {
  std::uint64_t count = 0;
  enumerate_npaths(d, offsets, n, [&](const NPathFamily&) { ++count; }, budget);
  return count;
}

/// Number of closed walks of length n; C(n, n/2) in one dimension.
inline std::uint64_t count_walks(int d, int n, std::uint64_t budget = kDefaultWalkBudget) {
  check_dim(d);
  if (n < 0) throw InvalidArgument("walk length must be >= 0");
  if (n % 2) return 0;
  if (d == 1) return binomial(n, n / 2);
  return count_npaths(d, {Site{}}, n, budget);
}

}  // namespace anderson
