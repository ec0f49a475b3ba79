#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "anderson/walks.hpp"

using namespace anderson;

namespace {

// Counts families by trying every step sequence of every walk, independent of
// the pruned enumerator.
std::uint64_t brute_force_families(int d, const std::vector<Site>& offsets, const std::vector<int>& lengths) {
  const std::size_t N = offsets.size();
  std::uint64_t count = 0;
  std::function<void(std::size_t, Site)> rec = [&](std::size_t i, Site start) {
    const int len = lengths[i];
    std::uint64_t total = 1;
    for (int k = 0; k < len; ++k) total *= 2 * d;
    for (std::uint64_t code = 0; code < total; ++code) {
      Site at = start;
      std::uint64_t c = code;
      for (int k = 0; k < len; ++k) {
        const int dir = static_cast<int>(c % (2 * d));
        c /= 2 * d;
        at = at + unit(dir / 2, dir % 2 ? -1 : 1);
      }
      const Site next = at + offsets[i];
      if (i + 1 == N) {
        if (next == Site{}) ++count;
      } else {
        rec(i + 1, next);
      }
    }
  };
  rec(0, Site{});
  return count;
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

TEST(Walks, SmallClosedWalks) {
  std::vector<LatticeWalk> got;
  enumerate_closed_walks(1, 2, [&](const LatticeWalk& w) { got.push_back(w); });
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].sites, (std::vector<Site>{Site{}, unit(0), Site{}}));
  EXPECT_EQ(got[1].sites, (std::vector<Site>{Site{}, unit(0, -1), Site{}}));
  EXPECT_EQ(count_walks(2, 2), 4u);
  for (int d = 1; d <= 3; ++d) EXPECT_EQ(count_walks(d, 1), 0u);
  EXPECT_EQ(count_walks(1, 4), 6u);
  EXPECT_EQ(count_walks(2, 4), 36u);
  EXPECT_EQ(count_walks(3, 2), 6u);
  EXPECT_EQ(count_walks(2, 0), 1u);
}

TEST(Walks, OneDimensionalCentralBinomial) {
  for (int n = 0; n <= 12; ++n) {
    const std::uint64_t expected = n % 2 ? 0 : binomial(n, n / 2);
    EXPECT_EQ(count_npaths(1, {Site{}}, n), expected) << n;
    EXPECT_EQ(count_walks(1, n), expected);
  }
}

TEST(Walks, TwoDimensionalBruteForce) {
  for (int n = 0; n <= 8; ++n) {
    const std::uint64_t bf = brute_force_families(2, {Site{}}, {n});
    EXPECT_EQ(count_walks(2, n), bf) << n;
    EXPECT_LE(bf, ipow(4, n));
  }
}

TEST(Walks, NPathFamilies) {
  const Site e = unit(0);
  EXPECT_EQ(count_npaths(1, {e, -e}, 0), 1u);
  enumerate_npaths(1, {e, -e}, 0, [&](const NPathFamily& f) {
    EXPECT_EQ(f.walks[0].sites, std::vector<Site>{Site{}});
    EXPECT_EQ(f.walks[1].sites, std::vector<Site>{e});
    EXPECT_TRUE(f.compatible());
  });
  // N = 1 with zero offset is the closed-walk problem
  for (int n = 0; n <= 6; ++n) EXPECT_EQ(count_npaths(2, {Site{}}, n), count_walks(2, n));
  // parity obstruction
  EXPECT_EQ(count_npaths(2, {e, Site{}}, 2), 0u);

  const std::vector<std::vector<Site>> cases = {
      {Site{}, Site{}}, {e, -e}, {e, e}, {unit(1), -e}, {Site{}, e, -e}};
  for (int d = 1; d <= 3; ++d)
    for (const auto& offs : cases) {
      bool fits = true;
      for (const Site& u : offs)
        for (int k = d; k < kMaxDim; ++k) fits = fits && u[k] == 0;
      if (!fits) continue;
      const int N = static_cast<int>(offs.size());
      for (int n = 0; n <= (d == 3 ? 4 : 6); ++n) {
        std::uint64_t total_bf = 0;
        for_each_composition(n, offs.size(), [&](const std::vector<int>& lens) {
          const std::uint64_t bf = brute_force_families(d, offs, lens);
          EXPECT_LE(bf, ipow(2 * d, n));
          total_bf += bf;
        });
        std::uint64_t count = 0;
        enumerate_npaths(d, offs, n, [&](const NPathFamily& f) {
          ++count;
          EXPECT_TRUE(f.compatible());
          EXPECT_EQ(f.length(), n);
        });
        EXPECT_EQ(count, total_bf) << "d=" << d << " n=" << n;
        EXPECT_LE(count, binomial(n + N - 1, N - 1) * ipow(2 * d, n));
      }
    }
}

TEST(Walks, VisitCounts) {
  LatticeWalk w{{Site{}, unit(0), Site{}}};
  NPathFamily f{{w}, {Site{}}};
  const auto vc = visit_counts(f);
  ASSERT_EQ(vc.size(), 2u);
  EXPECT_EQ(vc.at(Site{}), MultiIndex{2});
  EXPECT_EQ(vc.at(unit(0)), MultiIndex{1});
  NPathFamily z{{LatticeWalk{{Site{}}}}, {Site{}}};
  EXPECT_EQ(visit_counts(z).at(Site{}), MultiIndex{1});

  // random families: offsets fixed by the walks, then recount by hand
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const std::size_t N = 1 + rng() % 3;
    NPathFamily fam;
    Site at{};
    for (std::size_t i = 0; i < N; ++i) {
      if (i > 0) {
        at = at + unit(static_cast<int>(rng() % d), rng() % 2 ? 1 : -1);
      }
      LatticeWalk g{{at}};
      const int len = static_cast<int>(rng() % 7);
      for (int k = 0; k < len; ++k) {
        at = at + unit(static_cast<int>(rng() % d), rng() % 2 ? 1 : -1);
        g.sites.push_back(at);
      }
      fam.walks.push_back(g);
    }
    for (std::size_t i = 0; i < N; ++i) {
      const Site& next = i + 1 < N ? fam.walks[i + 1].start() : fam.walks[0].start();
      fam.offsets.push_back(next - fam.walks[i].end());
    }
    ASSERT_TRUE(fam.compatible());
    const auto counts = visit_counts(fam);
    int total = 0;
    for (const auto& [u, m] : counts) {
      total += m.total();
      for (std::size_t i = 0; i < N; ++i) {
        int hand = 0;
        for (const Site& s : fam.walks[i].sites) hand += s == u;
        EXPECT_EQ(m[i], hand);
      }
    }
    EXPECT_EQ(total, fam.length() + static_cast<int>(N));
  }
}

TEST(Walks, Deterministic) {
  auto digest = [] {
    std::uint64_t h = 1469598103934665603ull;
    enumerate_npaths(2, {unit(0), -unit(0)}, 6, [&](const NPathFamily& f) {
      for (const auto& w : f.walks)
        for (const Site& s : w.sites)
          for (int c : s) h = (h ^ static_cast<std::uint64_t>(c + 1000)) * 1099511628211ull;
    });
    return h;
  };
  EXPECT_EQ(digest(), digest());
}

TEST(Walks, Budget) {
  EXPECT_THROW(count_npaths(3, {Site{}}, 10, 1000), ResourceLimit);
  EXPECT_THROW(enumerate_closed_walks(0, 2, [](const LatticeWalk&) {}), InvalidArgument);
  EXPECT_THROW(count_npaths(1, {unit(1)}, 2), InvalidArgument);
}
