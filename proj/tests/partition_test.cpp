#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "congruent/error.hpp"
#include "congruent/partition.hpp"
#include "support/oracles.hpp"

using congruent::Errc;
using congruent::Error;
using congruent::Partition;

namespace {

Partition P(std::vector<std::vector<int>> one_based) {
  for (auto& b : one_based) {
    for (int& e : b) --e;
  }
  return Partition(one_based);
}

TEST(Partition, CanonicalFormAndPrinting) {
  const auto p = P({{4}, {3, 2, 6}, {5, 1}});
  EXPECT_EQ(p.to_string(), "{{1,5},{2,3,6},{4}}");
  EXPECT_EQ(p.degree(), 6);
  EXPECT_EQ(p.size(), 3);
  EXPECT_TRUE(p.has_singleton());
  EXPECT_EQ(p.max_block_size(), 3);
  EXPECT_EQ(p.block_sizes(), (std::vector<int>{2, 3, 1}));
  EXPECT_EQ(p, P({{1, 5}, {2, 3, 6}, {4}}));
}

TEST(Partition, RejectsInvalidBlocks) {
  auto code = [](std::vector<std::vector<int>> blocks) {
    try {
      Partition p(blocks);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kSchema;
  };
  EXPECT_EQ(code({{0, 1}, {1}}), Errc::kInvalidArgument);
  EXPECT_EQ(code({{0}, {2}}), Errc::kInvalidArgument);
  EXPECT_EQ(code({{0}, {}}), Errc::kInvalidArgument);
  EXPECT_EQ(code({{-1}}), Errc::kInvalidArgument);
}

TEST(Enumerate, SmallCases) {
  const auto one = congruent::enumerate_partitions(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].to_string(), "{{1}}");
  EXPECT_EQ(congruent::enumerate_partitions(3).size(), 5u);
}

TEST(Enumerate, SingletonFreeDegreeFour) {
  const auto sf = congruent::enumerate_singleton_free_partitions(4);
  std::set<std::string> names;
  for (const auto& p : sf) names.insert(p.to_string());
  EXPECT_EQ(names, (std::set<std::string>{"{{1,2,3,4}}", "{{1,2},{3,4}}", "{{1,3},{2,4}}", "{{1,4},{2,3}}"}));
}

TEST(Enumerate, MatchesBruteForceAndBellNumbers) {
  for (int n = 1; n <= 7; ++n) {
    const auto fast = congruent::enumerate_partitions(n);
    const auto slow = oracle::brute_force_partitions(n);
    ASSERT_EQ(fast.size(), oracle::bell(n)) << n;
    ASSERT_EQ(slow.size(), fast.size()) << n;
    std::set<std::vector<std::vector<int>>> a, b;
    for (const auto& p : fast) a.insert(p.blocks());
    for (const auto& p : slow) b.insert(p);
    EXPECT_EQ(a, b) << n;
  }
}

TEST(Enumerate, FinerBeforeCoarser) {
  for (int n = 1; n <= 6; ++n) {
    const auto parts = congruent::enumerate_partitions(n);
    EXPECT_EQ(parts.front(), Partition::singletons(n));
    EXPECT_EQ(parts.back(), Partition::whole(n));
    for (std::size_t a = 0; a < parts.size(); ++a) {
      for (std::size_t b = 0; b < a; ++b) {
        EXPECT_FALSE(congruent::refines(parts[a], parts[b]) && parts[a] != parts[b]);
      }
    }
  }
}

TEST(Enumerate, Limits) {
  EXPECT_THROW(congruent::enumerate_partitions(13), Error);
  EXPECT_THROW(congruent::enumerate_partitions(0), Error);
  EXPECT_EQ(congruent::enumerate_partitions(3, 3).size(), 5u);
  try {
    congruent::enumerate_partitions(4, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDegreeTooLarge);
  }
}

TEST(Refines, Examples) {
  const auto q = P({{1, 3}, {2, 4}});
  EXPECT_TRUE(congruent::refines(Partition::singletons(4), q));
  EXPECT_TRUE(congruent::refines(q, q));
  EXPECT_FALSE(congruent::refines(P({{1, 2}, {3, 4}}), q));
  EXPECT_TRUE(congruent::refines(q, Partition::whole(4)));
  EXPECT_FALSE(congruent::refines(Partition::whole(4), q));
  try {
    congruent::refines(q, Partition::whole(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDegreeMismatch);
  }
}

TEST(Refines, AgreesWithBlockContainment) {
  for (int n = 1; n <= 5; ++n) {
    const auto parts = congruent::enumerate_partitions(n);
    for (const auto& p : parts) {
      for (const auto& q : parts) {
        EXPECT_EQ(congruent::refines(p, q), oracle::block_refines(p.blocks(), q.blocks()));
      }
    }
  }
}

TEST(Refines, IsAPartialOrder) {
  const auto parts = congruent::enumerate_partitions(4);
  for (const auto& a : parts) {
    for (const auto& b : parts) {
      if (congruent::refines(a, b) && congruent::refines(b, a)) EXPECT_EQ(a, b);
      for (const auto& c : parts) {
        if (congruent::refines(a, b) && congruent::refines(b, c)) EXPECT_TRUE(congruent::refines(a, c));
      }
    }
  }
}

TEST(MultiindexPartition, Examples) {
  // (j, i, i, k, j, i) with i = 0, j = 7, k = 3.
  const std::vector<std::size_t> idx{7, 0, 0, 3, 7, 0};
  EXPECT_EQ(congruent::partition_of_multiindex(idx).to_string(), "{{1,5},{2,3,6},{4}}");
  const std::vector<std::size_t> same{2, 2, 2};
  EXPECT_EQ(congruent::partition_of_multiindex(same), Partition::whole(3));
  const std::vector<std::size_t> distinct{4, 1, 0, 9};
  EXPECT_EQ(congruent::partition_of_multiindex(distinct), Partition::singletons(4));
}

TEST(MultiindexPartition, RepresentativeRoundTrips) {
  for (int n = 1; n <= 6; ++n) {
    for (const auto& p : congruent::enumerate_partitions(n)) {
      const auto rep = congruent::representative_multiindex(p);
      EXPECT_EQ(congruent::partition_of_multiindex(rep), p);
      EXPECT_LT(*std::max_element(rep.begin(), rep.end()), static_cast<std::size_t>(p.size()));
    }
  }
}

TEST(DisjointUnion, ShiftsSecondFactor) {
  const auto u = congruent::disjoint_union(P({{1, 2}}), P({{1}, {2, 3}}));
  EXPECT_EQ(u.to_string(), "{{1,2},{3},{4,5}}");
}

TEST(InversePermutation, MovesBlocks) {
  // sigma = (0 -> 1, 1 -> 2, 2 -> 0)
  const std::vector<int> sigma{1, 2, 0};
  const auto p = P({{1, 2}, {3}});
  const auto q = congruent::apply_inverse_permutation(sigma, p);
  // k ~ l in q iff sigma(k) ~ sigma(l) in p.
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      EXPECT_EQ(q.labels()[k] == q.labels()[l], p.labels()[sigma[k]] == p.labels()[sigma[l]]);
    }
  }
}

}  // namespace
