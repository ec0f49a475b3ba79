#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "anderson/errors.hpp"

namespace anderson {

/// Tuple of non-negative integers with the usual multi-index conventions:
/// |n| = sum n_k and n! = prod n_k!.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) { check(); }
  MultiIndex(std::initializer_list<int> entries) : entries_(entries) { check(); }

  static MultiIndex zeros(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }

  std::size_t size() const { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<int>& entries() const { return entries_; }

  int total() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

  /// n! as a double (exact up to 170!).
  double factorial() const;

  MultiIndex operator+(const MultiIndex& o) const {
    if (o.size() != size()) throw InvalidArgument("multi-index length mismatch");
    std::vector<int> r(entries_);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += o.entries_[i];
    return MultiIndex(std::move(r));
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(entries_[i]);
    }
    return s + ")";
  }

 private:
  void check() const {
    for (int e : entries_)
      if (e < 0) throw InvalidArgument("multi-index entries must be non-negative");
  }
  std::vector<int> entries_;
};

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

inline double MultiIndex::factorial() const {
  double f = 1.0;
  for (int e : entries_) f *= anderson::factorial(e);
  return f;
}

/// Calls f(const std::vector<int>& m) for every m in N^parts with |m| = total,
/// in lexicographic order (stars and bars).
template <class F>
void for_each_composition(int total, std::size_t parts, F&& f) {
  if (parts == 0) {
    if (total == 0) f(std::vector<int>{});
    return;
  }
  std::vector<int> m(parts, 0);
  // Recursive fill: position k takes values 0..remaining in increasing order.
  auto rec = [&](auto&& self, std::size_t k, int remaining) -> void {
    if (k + 1 == parts) {
      m[k] = remaining;
      f(static_cast<const std::vector<int>&>(m));
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      m[k] = v;
      self(self, k + 1, remaining - v);
    }
  };
  rec(rec, 0, total);
}

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow("integer product exceeds 64 bits");
  return r;
}

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Overflow("integer sum exceeds 64 bits");
  return r;
}

}  // namespace detail

/// Exact binomial coefficient C(n, k); throws Overflow past 64 bits.
inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) is divisible by i after the multiplication.
    const std::uint64_t num = detail::checked_mul(r, static_cast<std::uint64_t>(n - k + i));
    r = num / static_cast<std::uint64_t>(i);
  }
  return r;
}

struct RestrictedSum {
  std::uint64_t enumerated = 0;   // sum over |m| = r of prod C(m_k + n_k, n_k)
  std::uint64_t closed_form = 0;  // C(r + |n| + L - 1, r)
};

/// Both sides of the restricted multi-index identity
/// sum_{|m|=r} prod (m_k+n_k)!/(m_k! n_k!) = (r+|n|+L-1)! / (r! (|n|+L-1)!).
inline RestrictedSum restricted_multiindex_sum(const MultiIndex& n, int r) {
  if (r < 0) throw InvalidArgument("restricted sum needs r >= 0");
  if (n.size() == 0) throw InvalidArgument("restricted sum needs L >= 1");
  RestrictedSum out;
  for_each_composition(r, n.size(), [&](const std::vector<int>& m) {
    std::uint64_t term = 1;
    for (std::size_t k = 0; k < m.size(); ++k)
      term = detail::checked_mul(term, binomial(m[k] + n[k], n[k]));
    out.enumerated = detail::checked_add(out.enumerated, term);
  });
  const int L = static_cast<int>(n.size());
  out.closed_form = binomial(r + n.total() + L - 1, r);
  return out;
}

}  // namespace anderson
