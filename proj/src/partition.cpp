#include "congruent/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "congruent/error.hpp"

namespace congruent {

namespace {

// Relabels so that block labels appear in order of first occurrence.
std::vector<std::uint8_t> canonical_labels(std::span<const int> raw, int& block_count) {
  std::map<int, std::uint8_t> relabel;
  std::vector<std::uint8_t> out;
  out.reserve(raw.size());
  for (int label : raw) {
    auto [it, inserted] = relabel.try_emplace(label, static_cast<std::uint8_t>(relabel.size()));
    out.push_back(it->second);
  }
  block_count = static_cast<int>(relabel.size());
  return out;
}

}  // namespace

Partition::Partition(const std::vector<std::vector<int>>& blocks) {
  int n = 0;
  for (const auto& b : blocks) {
    if (b.empty()) throw Error(Errc::kInvalidArgument, "partition blocks must be nonempty");
    n += static_cast<int>(b.size());
  }
  if (n > 255) throw Error(Errc::kDegreeTooLarge, "partition degree above 255");
  std::vector<int> raw(n, -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int e : blocks[b]) {
      if (e < 0 || e >= n) throw Error(Errc::kInvalidArgument, "partition element out of range");
      if (raw[e] != -1) throw Error(Errc::kInvalidArgument, "partition blocks overlap");
      raw[e] = static_cast<int>(b);
    }
  }
  labels_ = canonical_labels(raw, block_count_);
}

Partition Partition::from_labels(std::span<const int> labels) {
  Partition p;
  p.labels_ = canonical_labels(labels, p.block_count_);
  return p;
}

Partition Partition::singletons(int n) {
  std::vector<int> labels(n);
  std::iota(labels.begin(), labels.end(), 0);
  return from_labels(labels);
}

Partition Partition::whole(int n) { return from_labels(std::vector<int>(n, 0)); }

std::vector<std::vector<int>> Partition::blocks() const {
  std::vector<std::vector<int>> out(block_count_);
  for (std::size_t k = 0; k < labels_.size(); ++k) out[labels_[k]].push_back(static_cast<int>(k));
  return out;
}

std::vector<int> Partition::block_sizes() const {
  std::vector<int> out(block_count_, 0);
  for (auto l : labels_) ++out[l];
  return out;
}

bool Partition::has_singleton() const {
  const auto sizes = block_sizes();
  return std::find(sizes.begin(), sizes.end(), 1) != sizes.end();
}

int Partition::max_block_size() const {
  const auto sizes = block_sizes();
  return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

std::string Partition::to_string() const {
  std::string s = "{";
  bool first_block = true;
  for (const auto& b : blocks()) {
    if (!first_block) s += ',';
    first_block = false;
    s += '{';
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (k) s += ',';
      s += std::to_string(b[k] + 1);
    }
    s += '}';
  }
  return s + "}";
}

std::strong_ordering operator<=>(const Partition& a, const Partition& b) {
  if (a.labels_.size() != b.labels_.size()) return a.labels_.size() <=> b.labels_.size();
  if (a.block_count_ != b.block_count_) return b.block_count_ <=> a.block_count_;
  return std::lexicographical_compare_three_way(a.labels_.begin(), a.labels_.end(), b.labels_.begin(),
                                                b.labels_.end());
}

std::vector<Partition> enumerate_partitions(int n, int max_degree) {
  if (n < 1) throw Error(Errc::kInvalidArgument, "partition degree must be at least 1");
  if (n > max_degree) {
    throw Error(Errc::kDegreeTooLarge, "degree " + std::to_string(n) + " exceeds the enumeration limit " +
                                           std::to_string(max_degree));
  }
  // Restricted growth strings: a[0] = 0, a[k] <= 1 + max(a[0..k-1]).
  std::vector<Partition> out;
  std::vector<int> a(n, 0);
  std::vector<int> prefix_max(n, 0);
  while (true) {
    out.push_back(Partition::from_labels(a));
    int k = n - 1;
    while (k > 0 && a[k] == prefix_max[k - 1] + 1) --k;
    if (k == 0) break;
    ++a[k];
    prefix_max[k] = std::max(prefix_max[k - 1], a[k]);
    for (int j = k + 1; j < n; ++j) {
      a[j] = 0;
      prefix_max[j] = prefix_max[k];
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Partition> enumerate_singleton_free_partitions(int n, int max_degree) {
  auto all = enumerate_partitions(n, max_degree);
  std::erase_if(all, [](const Partition& p) { return p.has_singleton(); });
  return all;
}

bool refines(const Partition& p, const Partition& q) {
  if (p.degree() != q.degree()) throw Error(Errc::kDegreeMismatch, "partitions of different degree");
  // p <= q iff the map (p-label -> q-label) is well defined.
  std::vector<int> image(p.size(), -1);
  const auto pl = p.labels();
  const auto ql = q.labels();
  for (std::size_t k = 0; k < pl.size(); ++k) {
    int& slot = image[pl[k]];
    if (slot == -1) {
      slot = ql[k];
    } else if (slot != ql[k]) {
      return false;
    }
  }
  return true;
}

Partition partition_of_multiindex(std::span<const std::size_t> indices) {
  std::vector<int> raw(indices.size());
  std::map<std::size_t, int> ids;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    raw[k] = ids.try_emplace(indices[k], static_cast<int>(ids.size())).first->second;
  }
  return Partition::from_labels(raw);
}

std::vector<std::size_t> representative_multiindex(const Partition& p) {
  return {p.labels().begin(), p.labels().end()};
}

Partition disjoint_union(const Partition& p, const Partition& q) {
  std::vector<int> labels(p.labels().begin(), p.labels().end());
  for (auto l : q.labels()) labels.push_back(p.size() + l);
  return Partition::from_labels(labels);
}

Partition apply_inverse_permutation(std::span<const int> sigma, const Partition& p) {
  if (static_cast<int>(sigma.size()) != p.degree()) {
    throw Error(Errc::kDegreeMismatch, "permutation and partition have different degree");
  }
  // sigma^{-1} P has blocks sigma^{-1}(B): element k lies in the block of sigma(k).
  std::vector<int> labels(sigma.size());
  for (std::size_t k = 0; k < sigma.size(); ++k) labels[k] = p.labels()[sigma[k]];
  return Partition::from_labels(labels);
}

}  // namespace congruent
