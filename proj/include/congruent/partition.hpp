#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace congruent {

/// Default ceiling on the degree accepted by enumerate_partitions.
/// Bell(12) = 4,213,597.
inline constexpr int kMaxEnumerationDegree = 12;

/// A set partition of {0, ..., n-1} in canonical form: blocks are sorted
/// ascending internally and ordered by their least element. Stored as the
/// restricted growth string (block label of each element).
///
/// Element indices are zero-based in code; to_string() and the CLI print
/// them one-based.
class Partition {
 public:
  /// Blocks in any order; each must be nonempty, disjoint, and together they
  /// must cover {0, ..., n-1}.
  explicit Partition(const std::vector<std::vector<int>>& blocks);

  static Partition from_labels(std::span<const int> labels);
  static Partition singletons(int n);
  static Partition whole(int n);

  int degree() const noexcept { return static_cast<int>(labels_.size()); }
  /// Number of blocks |P|.
  int size() const noexcept { return block_count_; }
  std::vector<std::vector<int>> blocks() const;
  std::vector<int> block_sizes() const;
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }

  bool has_singleton() const;
  int max_block_size() const;

  /// {{1,5},{2,3,6},{4}}
  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  /// Total order used by enumerate_partitions: more blocks first, then
  /// lexicographic label string. Refines a strict refinement relation.
  friend std::strong_ordering operator<=>(const Partition& a, const Partition& b);

 private:
  Partition() = default;

  std::vector<std::uint8_t> labels_;
  int block_count_ = 0;
};

/// All partitions of {0..n-1}, finer partitions before coarser ones.
std::vector<Partition> enumerate_partitions(int n, int max_degree = kMaxEnumerationDegree);

/// Partitions whose blocks all have at least two elements.
std::vector<Partition> enumerate_singleton_free_partitions(int n, int max_degree = kMaxEnumerationDegree);

/// True iff every block of p lies inside a block of q (p <= q).
bool refines(const Partition& p, const Partition& q);

/// Equality classes k ~ l <=> indices[k] == indices[l].
Partition partition_of_multiindex(std::span<const std::size_t> indices);

/// The smallest-label multiindex realizing p: element k gets the label of
/// its block.
std::vector<std::size_t> representative_multiindex(const Partition& p);

/// p on {0..n-1} and q on {n..n+m-1}.
Partition disjoint_union(const Partition& p, const Partition& q);

/// sigma^{-1} p, where sigma[k] is the image of k.
Partition apply_inverse_permutation(std::span<const int> sigma, const Partition& p);

}  // namespace congruent
